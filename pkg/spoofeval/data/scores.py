"""Score files (``TRIAL_ID ATTACK_LABEL KEY SCORE``), score sets and the
protocol join."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from spoofeval.config import MAX_MISSING_LISTED
from spoofeval.data.protocol import TrialRecord
from spoofeval.data.records import (
    KEY_DOMAIN,
    Key,
    ScoreKind,
    iter_fields,
    normalize_attack,
    parse_key,
)
from spoofeval.exceptions import JoinError, ParseError
from spoofeval.logging_config import get_logger

logger = get_logger("data")

SCORE_FIELDS = 4


@dataclass(frozen=True)
class ScoreRecord:
    trial_id: str
    attack_label: str
    key: Key
    score: float


@dataclass(frozen=True)
class ScoreSet:
    """Ordered, labelled detection scores of one CM or ASV system."""

    records: Tuple[ScoreRecord, ...]
    kind: ScoreKind

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def trial_ids(self) -> List[str]:
        return [r.trial_id for r in self.records]

    def attacks(self) -> List[str]:
        """Sorted attack labels of the spoof records."""
        return sorted({r.attack_label for r in self.records if r.key is Key.SPOOF})

    def scores(self, key: Key, attack: Optional[str] = None) -> np.ndarray:
        """Scores of one key, optionally restricted to one attack."""
        return np.array(
            [
                r.score
                for r in self.records
                if r.key is key and (attack is None or r.attack_label == attack)
            ],
            dtype=float,
        )

    def by_trial(self) -> Dict[str, ScoreRecord]:
        return {r.trial_id: r for r in self.records}


@dataclass(frozen=True)
class JoinReport:
    """Outcome of a protocol join besides the joined scores."""

    dropped: int = 0
    mismatches: Tuple[Tuple[str, str, str, str], ...] = field(default_factory=tuple)


def parse_scores(
    text: Union[str, IO[str]], kind: ScoreKind, source: Optional[str] = None
) -> ScoreSet:
    """Parse a score file into a ScoreSet, order preserved.

    Raises:
        ParseError: non-finite or malformed score, duplicate trial id,
            key outside the kind's domain, wrong field count
    """
    domain = KEY_DOMAIN[kind]
    records: List[ScoreRecord] = []
    seen = {}
    for line, (trial, attack, key_token, score_token) in iter_fields(
        text, SCORE_FIELDS, source
    ):
        if trial in seen:
            raise ParseError(
                f"duplicate trial '{trial}' (first seen at line {seen[trial]})",
                line=line,
                source=source,
            )
        seen[trial] = line
        key = parse_key(key_token, domain, line, source)
        try:
            # float() accepts digit-group underscores
            if "_" in score_token:
                raise ValueError(score_token)
            score = float(score_token)
        except ValueError:
            raise ParseError(
                f"invalid score '{score_token}'", line=line, source=source
            )
        if not math.isfinite(score):
            raise ParseError(
                f"non-finite score '{score_token}'", line=line, source=source
            )
        records.append(
            ScoreRecord(
                trial_id=trial,
                attack_label=normalize_attack(attack, key, line, source),
                key=key,
                score=score,
            )
        )
    logger.debug(
        f"Parsed {len(records)} {kind.value} scores",
        extra={"source": source, "score_count": len(records)},
    )
    return ScoreSet(records=tuple(records), kind=kind)


def format_score(score: float) -> str:
    """Fixed-point decimal with 6 significant digits, never an exponent."""
    return np.format_float_positional(
        score, precision=6, unique=False, fractional=False, trim="-"
    )


def emit_scores(scores: Iterable[ScoreRecord]) -> str:
    """Inverse writer of parse_scores, single-space separated."""
    return "".join(
        f"{r.trial_id} {r.attack_label} {r.key.value} {format_score(r.score)}\n"
        for r in scores
    )


def read_scores(path: Union[str, Path], kind: ScoreKind) -> ScoreSet:
    with open(path, "r", encoding="utf-8") as f:
        return parse_scores(f, kind, source=str(path))


def write_scores(path: Union[str, Path], scores: Iterable[ScoreRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(emit_scores(scores))


def _missing_message(missing: Sequence[str]) -> str:
    shown = ", ".join(missing[:MAX_MISSING_LISTED])
    more = len(missing) - MAX_MISSING_LISTED
    suffix = f" ... and {more} more" if more > 0 else ""
    return f"{len(missing)} protocol trials missing from scores: {shown}{suffix}"


def join_with_report(
    protocol: Sequence[TrialRecord], scores: ScoreSet, strict: bool = True
) -> Tuple[ScoreSet, JoinReport]:
    """Restrict scores to the protocol trials with protocol labels.

    The protocol is authoritative for attack label and key. Score records
    for trials outside the protocol are dropped and counted.

    Raises:
        JoinError: missing trials; attack/key mismatches when ``strict``
    """
    by_trial = scores.by_trial()
    missing = [t.trial_id for t in protocol if t.trial_id not in by_trial]
    if missing:
        raise JoinError(_missing_message(missing))

    mismatches = []
    joined = []
    for trial in protocol:
        rec = by_trial[trial.trial_id]
        if rec.attack_label != trial.attack_label:
            mismatches.append(
                (trial.trial_id, "attack", trial.attack_label, rec.attack_label)
            )
        if rec.key is not trial.key:
            mismatches.append((trial.trial_id, "key", trial.key.value, rec.key.value))
        joined.append(
            ScoreRecord(
                trial_id=trial.trial_id,
                attack_label=trial.attack_label,
                key=trial.key,
                score=rec.score,
            )
        )

    if mismatches and strict:
        shown = "; ".join(
            f"{tid} {fld} protocol={want} scores={got}"
            for tid, fld, want, got in mismatches[:MAX_MISSING_LISTED]
        )
        raise JoinError(f"{len(mismatches)} label mismatches: {shown}")

    dropped = len(scores) - len(protocol)
    report = JoinReport(dropped=dropped, mismatches=tuple(mismatches))
    logger.info(
        f"Joined {len(joined)} trials ({dropped} extra score records dropped)",
        extra={
            "joined": len(joined),
            "dropped": dropped,
            "mismatches": len(mismatches),
        },
    )
    return ScoreSet(records=tuple(joined), kind=scores.kind), report


def join(
    protocol: Sequence[TrialRecord], scores: ScoreSet, strict: bool = True
) -> ScoreSet:
    """Join scores against a protocol; see join_with_report."""
    joined, _ = join_with_report(protocol, scores, strict=strict)
    return joined
