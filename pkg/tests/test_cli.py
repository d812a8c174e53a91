import json
import logging
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest
import soundfile as sf

from spoofeval.cli import build_parser, main
from spoofeval.context import RunContext
from spoofeval.data.audio import AudioBuffer, write_wav
from spoofeval.data.protocol import read_protocol
from spoofeval.data.records import ScoreKind
from spoofeval.data.scores import read_scores, write_scores
from spoofeval.features.base import read_feature_manifest
from spoofeval.simulation.dataset import generate_dataset, synthetic_source
from spoofeval.simulation.sampling import trial_seed
from tests.runner.test_aggregate import write_cm


class CliTestCase:
    """Restores root logging handlers, which main() replaces."""

    def setup_method(self):
        root = logging.getLogger()
        self.saved_handlers = list(root.handlers)
        self.saved_level = root.level

    def teardown_method(self):
        root = logging.getLogger()
        for handler in root.handlers:
            if handler not in self.saved_handlers:
                handler.close()
        root.handlers[:] = self.saved_handlers
        root.setLevel(self.saved_level)


@pytest.fixture
def score_files(tmp_path, sample_cm, sample_asv):
    cm = tmp_path / "cm.txt"
    asv = tmp_path / "asv.txt"
    write_scores(cm, sample_cm)
    write_scores(asv, sample_asv)
    return cm, asv


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_feature_choice_enforced(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(
                ["extract", "--audio-list", "a.txt", "--feature", "mfcc"]
            )

    def test_jobs_default_from_environment(self, monkeypatch):
        monkeypatch.setenv("SPOOFEVAL_JOBS", "3")

        args = build_parser().parse_args(["evaluate", "--cm", "c", "--asv", "a"])

        assert args.jobs == 3


class TestEvaluateCommand(CliTestCase):
    def test_writes_report(self, tmp_path, score_files, capsys):
        cm, asv = score_files
        out = tmp_path / "eval"

        code = main(
            [
                "evaluate",
                "--cm", str(cm),
                "--asv", str(asv),
                "--known-attacks", "A01",
                "--out", str(out),
            ]
        )

        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["report"] == "evaluation"
        assert report["context"]["cm_scores"] == "cm.txt"
        known = {a["attack_label"]: a["known"] for a in report["tandem"]["attacks"]}
        assert known == {"A01": True, "A02": False}
        assert (out / "attacks.tsv").is_file()
        assert not (out / "det.svg").exists()
        assert "min t-DCF" in capsys.readouterr().out

    def test_rerun_is_byte_identical(self, tmp_path, score_files):
        cm, asv = score_files
        base = ["evaluate", "--cm", str(cm), "--asv", str(asv), "--plot"]

        assert main(base + ["--out", str(tmp_path / "a")]) == 0
        assert main(base + ["--out", str(tmp_path / "b"), "--jobs", "1"]) == 0

        for name in ("report.json", "attacks.tsv", "det.csv", "det.svg"):
            first = (tmp_path / "a" / name).read_bytes()
            assert first == (tmp_path / "b" / name).read_bytes()

    def test_existing_results_need_overwrite(self, tmp_path, score_files, capsys):
        cm, asv = score_files
        argv = ["evaluate", "--cm", str(cm), "--asv", str(asv)]
        argv += ["--out", str(tmp_path / "eval")]
        assert main(argv) == 0

        assert main(argv) == 1
        assert "already holds results" in capsys.readouterr().err
        assert main(argv + ["--overwrite"]) == 0

    def test_timestamped_output_dir(self, tmp_path, score_files, monkeypatch):
        cm, asv = score_files
        monkeypatch.setenv("SPOOFEVAL_OUT_DIR", str(tmp_path / "runs"))

        assert main(["evaluate", "--cm", str(cm), "--asv", str(asv)]) == 0

        runs = list((tmp_path / "runs").iterdir())
        assert len(runs) == 1
        assert runs[0].name.startswith("evaluate_")
        assert (runs[0] / "report.json").is_file()

    def test_missing_score_file(self, tmp_path, score_files, capsys):
        _, asv = score_files

        code = main(
            [
                "evaluate",
                "--cm", str(tmp_path / "absent.txt"),
                "--asv", str(asv),
                "--out", str(tmp_path / "eval"),
            ]
        )

        assert code == 1
        err = capsys.readouterr().err.splitlines()
        assert err[-1].startswith("error: ")
        assert not (tmp_path / "eval").exists()

    def test_unknown_config_section(self, tmp_path, score_files, capsys):
        cm, asv = score_files
        config = tmp_path / "run.yaml"
        config.write_text("version: 1\nbogus:\n  a: 1\n")

        code = main(
            ["evaluate", "--cm", str(cm), "--asv", str(asv), "--config", str(config)]
        )

        assert code == 1
        assert "unknown config key 'bogus'" in capsys.readouterr().err

    def test_config_section_applied(self, tmp_path, score_files):
        cm, asv = score_files
        config = tmp_path / "run.yaml"
        config.write_text("evaluation:\n  normalization: min_c1_c2\n")
        out = tmp_path / "eval"

        argv = ["evaluate", "--cm", str(cm), "--asv", str(asv)]
        assert main(argv + ["--config", str(config), "--out", str(out)]) == 0

        report = json.loads((out / "report.json").read_text())
        assert report["tandem"]["normalization"] == "min_c1_c2"

    def test_log_dir(self, tmp_path, score_files):
        cm, asv = score_files
        logs = tmp_path / "logs"

        argv = ["evaluate", "--cm", str(cm), "--asv", str(asv)]
        argv += ["--out", str(tmp_path / "eval"), "--log-dir", str(logs)]
        assert main(argv) == 0

        assert "Evaluated 2 attacks" in (logs / "spoofeval.log").read_text()


class TestRankCommand(CliTestCase):
    def test_ranking_with_baseline(self, tmp_path, sample_asv, capsys):
        write_cm(tmp_path / "b01.txt", 1.0)
        write_cm(tmp_path / "t01.txt", 5.0)
        listing = tmp_path / "submissions.txt"
        listing.write_text("B01 single b01.txt\nT01 primary t01.txt\n")
        asv = tmp_path / "asv.txt"
        write_scores(asv, sample_asv)
        out = tmp_path / "rank"

        code = main(
            [
                "rank",
                "--submissions", str(listing),
                "--asv", str(asv),
                "--baseline", "B01",
                "--top-n", "1",
                "--out", str(out),
            ]
        )

        assert code == 0
        ranking = json.loads((out / "ranking.json").read_text())
        assert [r["team_id"] for r in ranking["ranking"]] == ["T01", "B01"]
        assert ranking["teams_beating_baseline"] == 1
        assert ranking["top_n"] == 1
        assert capsys.readouterr().out.splitlines()[0].split()[:2] == ["1", "T01"]


class TestBaselinePipeline(CliTestCase):
    """extract -> train -> score on two synthetic utterances."""

    def write_inputs(self, tmp_path):
        t = np.arange(16000) / 16000.0
        gen = np.random.default_rng(3)
        tone = 0.5 * np.sin(2 * np.pi * 1000.0 * t) + gen.normal(0.0, 0.01, t.size)
        write_wav(tmp_path / "u1.wav", AudioBuffer(samples=tone, sample_rate=16000))
        noise = gen.uniform(-0.5, 0.5, 16000)
        write_wav(tmp_path / "u2.wav", AudioBuffer(samples=noise, sample_rate=16000))
        (tmp_path / "audio.txt").write_text(
            "LA_T_0000001 u1.wav\nLA_T_0000002 u2.wav\n"
        )
        (tmp_path / "protocol.txt").write_text(
            "LA_0001 LA_T_0000001 - - bonafide\nLA_0001 LA_T_0000002 - A01 spoof\n"
        )
        (tmp_path / "run.yaml").write_text("gmm:\n  max_iterations: 5\n")

    def test_extract_train_score(self, tmp_path):
        self.write_inputs(tmp_path)
        common = ["--config", str(tmp_path / "run.yaml"), "--jobs", "2"]
        protocol = str(tmp_path / "protocol.txt")

        assert main(
            ["extract", "--audio-list", str(tmp_path / "audio.txt")]
            + ["--feature", "lfcc", "--out", str(tmp_path / "feat")]
            + common
        ) == 0
        manifest = tmp_path / "feat" / "manifest.csv"
        assert sorted(read_feature_manifest(manifest)) == [
            "LA_T_0000001",
            "LA_T_0000002",
        ]
        rows = pd.read_csv(manifest)
        assert set(rows["dims"]) == {60}
        assert rows["config_hash"].nunique() == 1

        assert main(
            ["train", "--features", str(manifest), "--protocol", protocol]
            + ["--components", "2", "--export-json", "--out", str(tmp_path / "gmm")]
            + common
        ) == 0
        models = tmp_path / "gmm"
        for name in ("bonafide.gmm", "spoof.gmm", "bonafide.json", "training_log.csv"):
            assert (models / name).is_file()
        log = pd.read_csv(models / "training_log.csv")
        assert set(log["class"]) == {"bonafide", "spoof"}

        assert main(
            ["score", "--models", str(models), "--features", str(manifest)]
            + ["--protocol", protocol, "--out", str(tmp_path / "scores")]
            + common
        ) == 0
        scores = read_scores(tmp_path / "scores" / "scores.txt", ScoreKind.CM)
        assert scores.trial_ids == ["LA_T_0000001", "LA_T_0000002"]
        by_trial = scores.by_trial()
        # each utterance is scored by the model trained on it
        assert by_trial["LA_T_0000001"].score > 0
        assert by_trial["LA_T_0000002"].score < 0

    def test_score_missing_features(self, tmp_path, capsys):
        self.write_inputs(tmp_path)
        (tmp_path / "audio.txt").write_text("LA_T_0000001 u1.wav\n")
        assert main(
            ["extract", "--audio-list", str(tmp_path / "audio.txt")]
            + ["--feature", "lfcc", "--out", str(tmp_path / "feat")]
        ) == 0

        code = main(
            ["train", "--features", str(tmp_path / "feat" / "manifest.csv")]
            + ["--protocol", str(tmp_path / "protocol.txt")]
            + ["--components", "2", "--out", str(tmp_path / "gmm")]
        )

        assert code == 1
        assert "no features for trial 'LA_T_0000002'" in capsys.readouterr().err

    def test_empty_wav_reported(self, tmp_path, capsys):
        self.write_inputs(tmp_path)
        sf.write(str(tmp_path / "u2.wav"), np.zeros(0), 16000, subtype="PCM_16")

        code = main(
            ["extract", "--audio-list", str(tmp_path / "audio.txt")]
            + ["--feature", "lfcc", "--out", str(tmp_path / "feat")]
        )

        assert code == 1
        err = capsys.readouterr().err.splitlines()
        assert err[-1].startswith("error: utterance 'LA_T_0000002': invalid audio")
        assert not (tmp_path / "feat").exists()


class TestSimulateCommand(CliTestCase):
    def test_renders_protocol(self, tmp_path):
        sources = tmp_path / "sources"
        sources.mkdir()
        for speaker, seed in (("S1", 1), ("S2", 2)):
            write_wav(sources / f"{speaker}.wav", synthetic_source(seed, duration=0.2))
        protocol = tmp_path / "protocol.txt"
        protocol.write_text(
            "S1 PA_T_0000001 aaa - bonafide\nS2 PA_T_0000002 abc BA spoof\n"
        )
        out = tmp_path / "pa"

        code = main(
            ["simulate-pa", "--sources", str(sources), "--protocol", str(protocol)]
            + ["--seed", "11", "--out", str(out)]
        )

        assert code == 0
        assert sorted(p.name for p in (out / "audio").iterdir()) == [
            "PA_T_0000001.wav",
            "PA_T_0000002.wav",
        ]
        manifest = pd.read_csv(out / "manifest.csv")
        assert manifest["trial_id"].tolist() == ["PA_T_0000001", "PA_T_0000002"]
        written = read_protocol(out / "protocol.txt")
        assert [(r.system_id, r.attack_label) for r in written] == [
            ("aaa", "bonafide"),
            ("abc", "BA"),
        ]

    def test_missing_source(self, tmp_path, capsys):
        (tmp_path / "sources").mkdir()
        protocol = tmp_path / "protocol.txt"
        protocol.write_text("S9 PA_T_0000001 aaa - bonafide\n")

        code = main(
            ["simulate-pa", "--sources", str(tmp_path / "sources")]
            + ["--protocol", str(protocol), "--out", str(tmp_path / "pa")]
        )

        assert code == 1
        assert "PA_T_0000001" in capsys.readouterr().err

    def test_run_context_supplies_seed_and_jobs(self, tmp_path):
        sources = tmp_path / "sources"
        sources.mkdir()
        write_wav(sources / "S1.wav", synthetic_source(1, duration=0.2))
        protocol = tmp_path / "protocol.txt"
        protocol.write_text("S1 PA_T_0000001 aaa - bonafide\n")
        ctx = RunContext(run_id="pa", out_dir=tmp_path, seed=5, jobs=3)

        with patch(
            "spoofeval.cli.RunContextFactory.create_fixed", return_value=ctx
        ), patch("spoofeval.cli.generate_dataset", wraps=generate_dataset) as gen:
            code = main(
                ["simulate-pa", "--sources", str(sources), "--protocol", str(protocol)]
                + ["--seed", "11", "--jobs", "1", "--out", str(tmp_path / "pa")]
            )

        assert code == 0
        assert gen.call_args.kwargs["master_seed"] == 5
        assert gen.call_args.kwargs["max_workers"] == 3
        manifest = pd.read_csv(tmp_path / "pa" / "manifest.csv")
        assert manifest["rng_seed"].tolist() == [trial_seed(5, "PA_T_0000001")]
