"""Protocol files: ``SPEAKER_ID TRIAL_ID SYSTEM_ID ATTACK_LABEL KEY`` per line."""

from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, List, Optional, Union

from spoofeval.data.records import (
    KEY_DOMAIN,
    Key,
    ScoreKind,
    Subset,
    infer_subset,
    iter_fields,
    normalize_attack,
    parse_key,
)
from spoofeval.exceptions import ParseError
from spoofeval.logging_config import get_logger

logger = get_logger("data")

PROTOCOL_FIELDS = 5


@dataclass(frozen=True)
class TrialRecord:
    speaker_id: str
    trial_id: str
    system_id: str
    attack_label: str
    key: Key
    subset: Optional[Subset] = None

    @property
    def is_bonafide(self) -> bool:
        return self.key is Key.BONAFIDE


def parse_protocol(
    text: Union[str, IO[str]],
    subset: Optional[Subset] = None,
    source: Optional[str] = None,
) -> List[TrialRecord]:
    """Parse a protocol into trial records, order preserved.

    Args:
        text: protocol text or text stream
        subset: partition for every trial; inferred from the trial id if None
        source: file name quoted in error messages

    Raises:
        ParseError: wrong field count, duplicate trial id, bad key token
    """
    records: List[TrialRecord] = []
    seen = {}
    domain = KEY_DOMAIN[ScoreKind.CM]
    for line, (speaker, trial, system, attack, key_token) in iter_fields(
        text, PROTOCOL_FIELDS, source
    ):
        if trial in seen:
            raise ParseError(
                f"duplicate trial '{trial}' (first seen at line {seen[trial]})",
                line=line,
                source=source,
            )
        seen[trial] = line
        key = parse_key(key_token, domain, line, source)
        records.append(
            TrialRecord(
                speaker_id=speaker,
                trial_id=trial,
                system_id=system,
                attack_label=normalize_attack(attack, key, line, source),
                key=key,
                subset=subset if subset is not None else infer_subset(trial),
            )
        )
    logger.debug(
        f"Parsed {len(records)} protocol trials",
        extra={"source": source, "trial_count": len(records)},
    )
    return records


def emit_protocol(records: Iterable[TrialRecord]) -> str:
    """Write records in the five-column protocol form."""
    return "".join(
        f"{r.speaker_id} {r.trial_id} {r.system_id} {r.attack_label} {r.key.value}\n"
        for r in records
    )


def read_protocol(
    path: Union[str, Path], subset: Optional[Subset] = None
) -> List[TrialRecord]:
    with open(path, "r", encoding="utf-8") as f:
        return parse_protocol(f, subset=subset, source=str(path))


def write_protocol(path: Union[str, Path], records: Iterable[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(emit_protocol(records))
