"""Ranking several CM submissions against one ASV system."""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from spoofeval.config import DEFAULT_TOP_N, EER_PERCENT_DECIMALS, TDCF_DECIMALS
from spoofeval.data.protocol import TrialRecord
from spoofeval.data.records import ScoreKind, iter_fields, read_text
from spoofeval.data.scores import ScoreSet, join, read_scores
from spoofeval.exceptions import ParseError, SpoofEvalError, SubmissionError
from spoofeval.logging_config import get_logger
from spoofeval.metrics.tandem import TandemReport, evaluate_tandem
from spoofeval.metrics.tdcf import CostModel
from spoofeval.runner.execute import run_ordered

logger = get_logger("runner")

SUBMISSION_FIELDS = 3


class SubmissionLabel(Enum):
    PRIMARY = "primary"
    SINGLE = "single"


@dataclass(frozen=True)
class SubmissionEntry:
    team_id: str
    label: SubmissionLabel
    score_file: Path


@dataclass(frozen=True)
class RankedSubmission:
    rank: int
    entry: SubmissionEntry
    report: TandemReport

    @property
    def team_id(self) -> str:
        return self.entry.team_id

    @property
    def min_tdcf(self) -> float:
        return self.report.pooled.min_tdcf

    @property
    def cm_eer(self) -> float:
        return self.report.pooled.cm_eer

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "team_id": self.team_id,
            "label": self.entry.label.value,
            "min_tdcf": self.min_tdcf,
            "cm_eer": self.cm_eer,
        }


def parse_submissions(
    text: Union[str, IO[str]],
    base_dir: Union[str, Path, None] = None,
    source: Optional[str] = None,
) -> List[SubmissionEntry]:
    """Parse ``TEAM_ID LABEL SCORE_FILE`` lines.

    Relative score paths resolve against ``base_dir``.

    Raises:
        ParseError: wrong field count, unknown label or repeated team id
    """
    base = Path(base_dir) if base_dir is not None else None
    entries: List[SubmissionEntry] = []
    seen = {}
    for line, (team, label, path) in iter_fields(
        read_text(text), SUBMISSION_FIELDS, source
    ):
        if team in seen:
            raise ParseError(
                f"duplicate team '{team}' (first seen at line {seen[team]})",
                line=line,
                source=source,
            )
        seen[team] = line
        try:
            kind = SubmissionLabel(label)
        except ValueError:
            raise ParseError(
                f"unknown submission label '{label}'", line=line, source=source
            )
        score_file = Path(path)
        if base is not None and not score_file.is_absolute():
            score_file = base / score_file
        entries.append(SubmissionEntry(team_id=team, label=kind, score_file=score_file))
    return entries


def read_submissions(path: Union[str, Path]) -> List[SubmissionEntry]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        return parse_submissions(f, base_dir=path.parent, source=str(path))


def evaluate_submission(
    entry: SubmissionEntry,
    asv: ScoreSet,
    cost: Optional[CostModel] = None,
    protocol: Optional[Sequence[TrialRecord]] = None,
    **tandem_options,
) -> TandemReport:
    """Read and evaluate one submission.

    Raises:
        SubmissionError: any read, join or metric failure, naming the team
    """
    try:
        cm = read_scores(entry.score_file, ScoreKind.CM)
        if protocol is not None:
            cm = join(protocol, cm)
        return evaluate_tandem(cm, asv, cost, **tandem_options)
    except OSError as e:
        message = f"cannot read {entry.score_file}: {e}"
        raise SubmissionError(entry.team_id, message) from e
    except SpoofEvalError as e:
        raise SubmissionError(entry.team_id, str(e)) from e


def rank_submissions(
    entries: Sequence[SubmissionEntry],
    asv: ScoreSet,
    cost: Optional[CostModel] = None,
    protocol: Optional[Sequence[TrialRecord]] = None,
    max_workers: int = 1,
    **tandem_options,
) -> List[RankedSubmission]:
    """Evaluate every submission and order by pooled min t-DCF.

    Metrics are compared at report precision; ties fall to the lower pooled
    CM EER, then to the team id.
    """

    def _evaluate(entry: SubmissionEntry) -> TandemReport:
        return evaluate_submission(entry, asv, cost, protocol, **tandem_options)

    reports = run_ordered(
        _evaluate, entries, max_workers=max_workers, label=lambda e: e.team_id
    )
    order = sorted(
        zip(entries, reports),
        key=lambda pair: (
            round(pair[1].pooled.min_tdcf, TDCF_DECIMALS),
            round(100.0 * pair[1].pooled.cm_eer, EER_PERCENT_DECIMALS),
            pair[0].team_id,
        ),
    )
    ranked = [
        RankedSubmission(rank=i, entry=entry, report=report)
        for i, (entry, report) in enumerate(order, start=1)
    ]
    if ranked:
        logger.info(
            f"Ranked {len(ranked)} submissions, best {ranked[0].team_id} "
            f"with min t-DCF {ranked[0].min_tdcf:.4f}",
            extra={"submission_count": len(ranked), "best_team": ranked[0].team_id},
        )
    return ranked


def ranking_frame(ranked: Sequence[RankedSubmission]) -> pd.DataFrame:
    return pd.DataFrame(
        [r.to_dict() for r in ranked],
        columns=["rank", "team_id", "label", "min_tdcf", "cm_eer"],
    )


def teams_beating_baseline(
    ranked: Sequence[RankedSubmission], baselines: Iterable[str]
) -> int:
    """Non-baseline teams whose min t-DCF is below the best baseline's.

    Raises:
        SubmissionError: a baseline team is not among the submissions
    """
    baselines = list(baselines)
    by_team = {r.team_id: r for r in ranked}
    for team in baselines:
        if team not in by_team:
            raise SubmissionError(team, "baseline team is not among the submissions")
    if not baselines:
        return 0
    best = min(by_team[t].min_tdcf for t in baselines)
    return sum(
        1 for r in ranked if r.team_id not in baselines and r.min_tdcf < best
    )


def boxplot_frame(
    ranked: Sequence[RankedSubmission], top_n: int = DEFAULT_TOP_N
) -> pd.DataFrame:
    """Per-attack spread of min t-DCF across the top ``top_n`` submissions.

    Also carries the ASV EER under each attack and the median CM EER over
    every submission.
    """
    top = list(ranked[:top_n])
    attacks = sorted({a.attack_label for r in ranked for a in r.report.attacks})
    rows = []
    for label in attacks:
        tdcfs = [
            _attack(r.report, label).min_tdcf
            for r in top
            if _attack(r.report, label) is not None
            and _attack(r.report, label).defined
        ]
        evaluations = [
            _attack(r.report, label)
            for r in ranked
            if _attack(r.report, label) is not None
        ]
        row = {"attack_label": label, "n_submissions": len(tdcfs)}
        if tdcfs:
            q = np.percentile(tdcfs, [0, 25, 50, 75, 100])
            row.update(
                {"min": q[0], "q1": q[1], "median": q[2], "q3": q[3], "max": q[4]}
            )
        else:
            row.update({k: np.nan for k in ("min", "q1", "median", "q3", "max")})
        row["asv_spoof_eer"] = evaluations[0].asv_spoof_eer
        row["median_cm_eer"] = float(np.median([e.cm_eer for e in evaluations]))
        rows.append(row)
    return pd.DataFrame(
        rows,
        columns=[
            "attack_label",
            "n_submissions",
            "min",
            "q1",
            "median",
            "q3",
            "max",
            "asv_spoof_eer",
            "median_cm_eer",
        ],
    )


def _attack(report: TandemReport, label: str):
    try:
        return report.by_label(label)
    except KeyError:
        return None
