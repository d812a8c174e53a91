import argparse
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from spoofeval import __version__
from spoofeval.backend import TrainConfig, llr_score, read_gmm, train_em_with_log
from spoofeval.backend.serialize import write_gmm, write_gmm_json
from spoofeval.config import (
    DEFAULT_MAX_WORKERS,
    DEFAULT_OUT_DIR,
    ENV_JOBS,
    ENV_OUT_DIR,
    config_hash,
    get_env,
    load_run_config,
)
from spoofeval.context import RunContext, RunContextFactory
from spoofeval.data import (
    Key,
    ScoreKind,
    ScoreRecord,
    join,
    read_protocol,
    read_scores,
    read_wav,
    write_scores,
)
from spoofeval.data.records import iter_fields
from spoofeval.exceptions import (
    FeatureExtractionError,
    JoinError,
    SpoofEvalError,
    TrainingError,
)
from spoofeval.features import (
    CqccConfig,
    FeatureKind,
    FeatureMatrix,
    LfccConfig,
    extract,
    read_features,
    write_features,
)
from spoofeval.features.base import read_feature_manifest, write_feature_manifest
from spoofeval.logging_config import get_logger, setup_logging
from spoofeval.metrics import CostModel, EvaluationOptions, evaluate_tandem
from spoofeval.report.generate import (
    format_eer,
    format_tdcf,
    write_evaluation_report,
    write_ranking_report,
)
from spoofeval.runner.aggregate import rank_submissions, read_submissions
from spoofeval.runner.execute import atomic_output_dir, run_ordered
from spoofeval.simulation import (
    SeedSpace,
    directory_loader,
    generate_dataset,
    grid_protocol,
    load_category_table,
    write_dataset,
)

logger = get_logger("runner")

BONAFIDE_MODEL = "bonafide.gmm"
SPOOF_MODEL = "spoof.gmm"


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _context(args, prefix: str) -> RunContext:
    if args.out:
        return RunContextFactory.create_fixed(
            args.out, seed=_seed(args), jobs=args.jobs
        )
    return RunContextFactory.create_timestamped(
        prefix=prefix,
        out_dir=get_env(ENV_OUT_DIR, DEFAULT_OUT_DIR),
        seed=_seed(args),
        jobs=args.jobs,
    )


def _read_audio_list(path: str) -> List[tuple]:
    """``UTTERANCE_ID WAV_PATH`` per line; relative paths resolve against
    the list file's directory."""
    base = Path(path).parent
    with open(path, "r", encoding="utf-8") as f:
        rows = list(iter_fields(f.read(), 2, source=path))
    return [
        (uid, Path(wav) if Path(wav).is_absolute() else base / wav)
        for _, (uid, wav) in rows
    ]


def _load_features(manifest: Dict[str, Path], trial_id: str) -> FeatureMatrix:
    if trial_id not in manifest:
        raise JoinError(f"no features for trial '{trial_id}'")
    return read_features(manifest[trial_id])


def _extract(args, sections) -> Path:
    ctx = _context(args, "extract")
    kind = FeatureKind(args.feature)
    if kind is FeatureKind.CQCC:
        cfg = CqccConfig.from_mapping(sections.get("cqcc"))
    else:
        cfg = LfccConfig.from_mapping(sections.get("lfcc"))
    digest = config_hash({"feature": kind.value, **cfg.to_dict()})
    utterances = _read_audio_list(args.audio_list)

    def run(item):
        uid, wav = item
        try:
            return uid, extract(read_wav(wav), kind, cfg)
        except SpoofEvalError as e:
            raise FeatureExtractionError(f"utterance '{uid}': {e}") from e

    results = run_ordered(
        run, utterances, max_workers=ctx.jobs, label=lambda u: u[0]
    )
    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        rows = []
        for uid, features in results:
            name = f"{uid}.feat"
            write_features(staging / name, features)
            rows.append(
                {
                    "utterance_id": uid,
                    "feature_file": name,
                    "frames": features.frames,
                    "dims": features.dims,
                    "config_hash": digest,
                }
            )
        write_feature_manifest(staging / "manifest.csv", rows)
    print(f"Extracted {len(rows)} {kind.value} feature files to {ctx.run_dir}")
    return ctx.run_dir


def _train(args, sections) -> Path:
    ctx = _context(args, "train")
    cfg = TrainConfig.from_mapping(
        sections.get("gmm"), n_components=args.components, seed=args.seed
    )
    manifest = read_feature_manifest(args.features)
    protocol = read_protocol(args.protocol)
    models = {}
    log_rows = []
    for key in (Key.BONAFIDE, Key.SPOOF):
        trials = [t for t in protocol if t.key is key]
        if not trials:
            raise TrainingError(f"missing {key.value} class: no {key.value} utterances")
        frames = FeatureMatrix.concatenate(
            [_load_features(manifest, t.trial_id) for t in trials]
        )
        model, history = train_em_with_log(frames, cfg, max_workers=ctx.jobs)
        models[key] = model
        log_rows.extend(
            {"class": key.value, "iteration": i, "log_likelihood": ll}
            for i, ll in enumerate(history)
        )

    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        write_gmm(staging / BONAFIDE_MODEL, models[Key.BONAFIDE])
        write_gmm(staging / SPOOF_MODEL, models[Key.SPOOF])
        if args.export_json:
            write_gmm_json(staging / "bonafide.json", models[Key.BONAFIDE])
            write_gmm_json(staging / "spoof.json", models[Key.SPOOF])
        pd.DataFrame(log_rows).to_csv(
            staging / "training_log.csv", index=False, float_format="%.10g"
        )
    print(f"Trained bona fide and spoof GMMs in {ctx.run_dir}")
    return ctx.run_dir


def _score(args, sections) -> Path:
    ctx = _context(args, "score")
    models = Path(args.models)
    bonafide = read_gmm(models / BONAFIDE_MODEL)
    spoof = read_gmm(models / SPOOF_MODEL)
    manifest = read_feature_manifest(args.features)
    protocol = read_protocol(args.protocol)
    # fail on the first missing trial before any scoring work
    for t in protocol:
        if t.trial_id not in manifest:
            raise JoinError(f"no features for trial '{t.trial_id}'")

    def run(trial) -> ScoreRecord:
        score = llr_score(bonafide, spoof, _load_features(manifest, trial.trial_id))
        return ScoreRecord(trial.trial_id, trial.attack_label, trial.key, score)

    records = run_ordered(
        run, protocol, max_workers=ctx.jobs, label=lambda t: t.trial_id
    )
    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        write_scores(staging / "scores.txt", records)
    print(f"Wrote {len(records)} CM scores to {ctx.run_dir / 'scores.txt'}")
    return ctx.run_dir


def _evaluation_options(args, sections) -> EvaluationOptions:
    known = None
    if args.known_attacks:
        known = tuple(a for a in args.known_attacks.split(",") if a)
    return EvaluationOptions.from_mapping(
        sections.get("evaluation"),
        normalization=args.normalization,
        pooled_beta=args.pooled_beta,
        known_attacks=known,
        top_n=getattr(args, "top_n", None),
    )


def _evaluate(args, sections) -> Path:
    ctx = _context(args, "evaluate")
    cost = CostModel.from_mapping(sections.get("cost"))
    options = _evaluation_options(args, sections)
    cm = read_scores(args.cm, ScoreKind.CM)
    asv = read_scores(args.asv, ScoreKind.ASV)
    if args.protocol:
        cm = join(read_protocol(args.protocol), cm)
    asv_dev = read_scores(args.asv_dev, ScoreKind.ASV) if args.asv_dev else None
    report = evaluate_tandem(
        cm,
        asv,
        cost,
        asv_dev=asv_dev,
        max_workers=ctx.jobs,
        **options.tandem_kwargs(),
    )
    context = {
        "cost_hash": config_hash(cost),
        "options_hash": config_hash(options),
        "cm_scores": Path(args.cm).name,
        "asv_scores": Path(args.asv).name,
    }
    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        write_evaluation_report(staging, report, cm, context=context, plot=args.plot)
    print(
        f"min t-DCF {format_tdcf(report.pooled.min_tdcf)}  "
        f"CM EER {format_eer(report.pooled.cm_eer)}%  -> {ctx.run_dir}"
    )
    return ctx.run_dir


def _rank(args, sections) -> Path:
    ctx = _context(args, "rank")
    cost = CostModel.from_mapping(sections.get("cost"))
    options = _evaluation_options(args, sections)
    entries = read_submissions(args.submissions)
    asv = read_scores(args.asv, ScoreKind.ASV)
    protocol = read_protocol(args.protocol) if args.protocol else None
    ranked = rank_submissions(
        entries,
        asv,
        cost,
        protocol=protocol,
        max_workers=ctx.jobs,
        **options.tandem_kwargs(),
    )
    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        write_ranking_report(
            staging,
            ranked,
            top_n=options.top_n,
            baselines=args.baseline or (),
            context={"cost_hash": config_hash(cost)},
        )
    for r in ranked:
        print(
            f"{r.rank:>3}  {r.team_id:<12} {format_tdcf(r.min_tdcf)}  "
            f"{format_eer(r.cm_eer)}%"
        )
    return ctx.run_dir


def _simulate_pa(args, sections) -> Path:
    ctx = _context(args, "simulate_pa")
    table = load_category_table(args.categories, overrides=sections.get("categories"))
    space = SeedSpace.UNKNOWN if args.eval_mode else SeedSpace.KNOWN
    if args.protocol:
        protocol = read_protocol(args.protocol)
    else:
        source_ids = sorted(p.stem for p in Path(args.sources).glob("*.wav"))
        protocol = grid_protocol(
            source_ids, prefix="PA_E" if args.eval_mode else "PA_T"
        )
    rendered = generate_dataset(
        protocol,
        directory_loader(args.sources),
        table,
        master_seed=ctx.seed,
        space=space,
        max_workers=ctx.jobs,
    )
    with atomic_output_dir(ctx.run_dir, overwrite=args.overwrite) as staging:
        write_dataset(staging, rendered)
    print(f"Rendered {len(rendered)} trials to {ctx.run_dir}")
    return ctx.run_dir


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, help="YAML run configuration")
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument(
        "--jobs",
        type=int,
        default=int(get_env(ENV_JOBS, str(DEFAULT_MAX_WORKERS))),
        help=f"worker threads (or set {ENV_JOBS})",
    )
    common.add_argument(
        "--out",
        type=str,
        help=f"output directory (default: timestamped under {ENV_OUT_DIR} "
        f"or {DEFAULT_OUT_DIR})",
    )
    common.add_argument(
        "--overwrite",
        action="store_true",
        help="replace an existing non-empty output directory",
    )
    common.add_argument(
        "--log-json", action="store_true", help="structured JSON log records"
    )
    common.add_argument("--log-dir", type=str, help="also write rotating log files")
    return common


def _evaluation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--asv", required=True, type=str, help="ASV score file")
    p.add_argument("--protocol", type=str, help="CM protocol to join scores against")
    p.add_argument(
        "--known-attacks", type=str, help="comma-separated attacks seen in training"
    )
    p.add_argument("--normalization", choices=["beta", "min_c1_c2"])
    p.add_argument("--pooled-beta", choices=["pooled_rates", "mean_attack"])


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    p = argparse.ArgumentParser(
        prog="spoofeval",
        description="Spoofing countermeasure evaluation and baselines",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = p.add_subparsers(dest="cmd", required=True)

    p1 = subs.add_parser(
        "extract", parents=[common], help="Extract CQCC or LFCC features"
    )
    p1.add_argument(
        "--audio-list", required=True, type=str, help="UTTERANCE_ID WAV_PATH lines"
    )
    p1.add_argument("--feature", required=True, choices=["cqcc", "lfcc"])
    p1.set_defaults(func=_extract)

    p2 = subs.add_parser(
        "train", parents=[common], help="Train bona fide and spoof GMMs"
    )
    p2.add_argument("--features", required=True, type=str, help="feature manifest")
    p2.add_argument("--protocol", required=True, type=str)
    p2.add_argument("--components", type=int, help="override gmm.n_components")
    p2.add_argument(
        "--export-json", action="store_true", help="also write models as JSON"
    )
    p2.set_defaults(func=_train)

    p3 = subs.add_parser("score", parents=[common], help="Score trials with a GMM pair")
    p3.add_argument(
        "--models", required=True, type=str, help="directory written by 'train'"
    )
    p3.add_argument("--features", required=True, type=str, help="feature manifest")
    p3.add_argument("--protocol", required=True, type=str)
    p3.set_defaults(func=_score)

    p4 = subs.add_parser(
        "evaluate", parents=[common], help="Tandem t-DCF and EER report"
    )
    p4.add_argument("--cm", required=True, type=str, help="CM score file")
    _evaluation_flags(p4)
    p4.add_argument(
        "--asv-dev", type=str, help="development ASV scores fixing the threshold"
    )
    p4.add_argument("--plot", action="store_true", help="also write det.svg")
    p4.set_defaults(func=_evaluate)

    p5 = subs.add_parser("rank", parents=[common], help="Rank CM submissions")
    p5.add_argument(
        "--submissions",
        required=True,
        type=str,
        help="TEAM_ID LABEL SCORE_FILE lines",
    )
    _evaluation_flags(p5)
    p5.add_argument("--top-n", type=int, help="submissions in the boxplot data")
    p5.add_argument(
        "--baseline", action="append", help="baseline team id (repeatable)"
    )
    p5.set_defaults(func=_rank)

    p6 = subs.add_parser(
        "simulate-pa", parents=[common], help="Render a simulated PA dataset"
    )
    p6.add_argument(
        "--sources", required=True, type=str, help="directory of source WAVs"
    )
    p6.add_argument(
        "--protocol", type=str, help="PA protocol (default: full category grid)"
    )
    p6.add_argument("--categories", type=str, help="category table YAML")
    p6.add_argument(
        "--eval-mode",
        action="store_true",
        help="draw configurations from the held-out seed space",
    )
    p6.set_defaults(func=_simulate_pa)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(
        json_format=True if args.log_json else None,
        log_dir=args.log_dir,
        enable_file=args.log_dir is not None,
    )
    try:
        sections = load_run_config(args.config)
        args.func(args, sections)
    except (SpoofEvalError, OSError) as e:
        logger.error(str(e), extra={"command": args.cmd})
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
