"""Report files for tandem evaluations and submission rankings."""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import pandas as pd

from spoofeval import __version__
from spoofeval.config import (
    DEFAULT_TOP_N,
    EER_PERCENT_DECIMALS,
    REPORT_SCHEMA_VERSION,
    TDCF_DECIMALS,
)
from spoofeval.data.records import Key
from spoofeval.data.scores import ScoreSet
from spoofeval.metrics.det import det_curve, det_curve_frame
from spoofeval.metrics.tandem import AttackEvaluation, TandemReport
from spoofeval.report.plot import plot_det
from spoofeval.runner.aggregate import (
    RankedSubmission,
    boxplot_frame,
    ranking_frame,
    teams_beating_baseline,
)

PathLike = Union[str, Path]


def format_tdcf(value: float) -> str:
    return f"{value:.{TDCF_DECIMALS}f}"


def format_eer(value: float) -> str:
    """EER as a percentage."""
    return f"{100.0 * value:.{EER_PERCENT_DECIMALS}f}"


def _envelope(kind: str, body: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "spoofeval_version": __version__,
        "report": kind,
        **body,
    }


def write_json(path: PathLike, payload: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(
            payload, f, ensure_ascii=False, indent=2, sort_keys=True, default=str
        )
        f.write("\n")


def attack_row(evaluation: AttackEvaluation) -> Dict[str, Any]:
    """Undefined beta and t-DCF are written as empty cells."""
    defined = evaluation.defined
    return {
        "attack_label": evaluation.attack_label,
        "beta": f"{evaluation.beta:.6g}" if defined else "",
        "min_tdcf": format_tdcf(evaluation.min_tdcf) if defined else "",
        "beta_undefined": not defined,
        "cm_eer_percent": format_eer(evaluation.cm_eer),
        "asv_spoof_eer_percent": format_eer(evaluation.asv_spoof_eer),
        "p_miss_spoof_asv": f"{evaluation.asv_rates.p_miss_spoof_asv:.6g}",
        "n_bonafide": evaluation.n_bonafide,
        "n_spoof": evaluation.n_spoof,
        "high_penalty": evaluation.high_penalty,
        "known": "" if evaluation.known is None else evaluation.known,
    }


def attacks_frame(report: TandemReport) -> pd.DataFrame:
    """Pooled row first, then one row per attack in label order."""
    return pd.DataFrame(
        [attack_row(report.pooled)] + [attack_row(a) for a in report.attacks]
    )


def summary(report: TandemReport) -> Dict[str, str]:
    return {
        "pooled_min_tdcf": format_tdcf(report.pooled.min_tdcf),
        "pooled_cm_eer_percent": format_eer(report.pooled.cm_eer),
        "asv_eer_percent": format_eer(report.asv_eer),
    }


def write_evaluation_report(
    out_dir: PathLike,
    report: TandemReport,
    cm: ScoreSet,
    context: Optional[Dict[str, Any]] = None,
    plot: bool = False,
) -> Path:
    """Write ``report.json``, ``attacks.tsv``, ``det.csv`` and optionally
    ``det.svg`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(
        out / "report.json",
        _envelope(
            "evaluation",
            {
                "summary": summary(report),
                "tandem": report.to_dict(),
                "context": context or {},
            },
        ),
    )
    attacks_frame(report).to_csv(out / "attacks.tsv", sep="\t", index=False)
    curve = det_curve(cm.scores(Key.BONAFIDE), cm.scores(Key.SPOOF))
    det_curve_frame(curve).to_csv(out / "det.csv", index=False)
    if plot:
        curves = {"pooled": curve}
        for a in report.attacks:
            curves[a.attack_label] = det_curve(
                cm.scores(Key.BONAFIDE), cm.scores(Key.SPOOF, a.attack_label)
            )
        plot_det(curves, out / "det.svg")
    return out


def write_ranking_report(
    out_dir: PathLike,
    ranked: Sequence[RankedSubmission],
    top_n: int = DEFAULT_TOP_N,
    baselines: Sequence[str] = (),
    context: Optional[Dict[str, Any]] = None,
) -> Path:
    """Write ``ranking.json``, ``ranking.tsv`` and ``boxplot.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table = ranking_frame(ranked)
    printed = table.assign(
        min_tdcf=table["min_tdcf"].map(format_tdcf),
        cm_eer=table["cm_eer"].map(format_eer),
    ).rename(columns={"cm_eer": "cm_eer_percent"})
    printed.to_csv(out / "ranking.tsv", sep="\t", index=False)
    boxplot_frame(ranked, top_n).to_csv(out / "boxplot.csv", index=False)
    body: Dict[str, Any] = {
        "ranking": [r.to_dict() for r in ranked],
        "top_n": top_n,
        "context": context or {},
    }
    if baselines:
        body["baselines"] = list(baselines)
        body["teams_beating_baseline"] = teams_beating_baseline(ranked, baselines)
    write_json(out / "ranking.json", _envelope("ranking", body))
    return out
