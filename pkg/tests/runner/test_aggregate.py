from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from spoofeval.data.protocol import parse_protocol
from spoofeval.data.scores import write_scores
from spoofeval.exceptions import ParseError, SubmissionError
from spoofeval.runner.aggregate import (
    SubmissionEntry,
    SubmissionLabel,
    boxplot_frame,
    evaluate_submission,
    parse_submissions,
    rank_submissions,
    ranking_frame,
    read_submissions,
    teams_beating_baseline,
)
from tests.conftest import cm_scores


def write_cm(path, shift, seed=0):
    """CM whose spoof classes sit ``shift`` below the bona fide class."""
    gen = np.random.default_rng(seed)
    scores = cm_scores(
        bonafide=gen.normal(0.0, 1.0, 60),
        spoof_by_attack={
            "A01": gen.normal(-shift, 1.0, 40),
            "A02": gen.normal(-shift / 2, 1.0, 40),
        },
    )
    write_scores(path, scores)
    return path


def entry(team, path, label=SubmissionLabel.PRIMARY):
    return SubmissionEntry(team_id=team, label=label, score_file=Path(path))


class TestParseSubmissions:
    def test_relative_paths_resolved(self, tmp_path):
        entries = parse_submissions(
            "T01 primary scores/t01.txt\nB01 single /abs/b01.txt\n", base_dir=tmp_path
        )

        assert entries[0].score_file == tmp_path / "scores" / "t01.txt"
        assert entries[0].label is SubmissionLabel.PRIMARY
        assert entries[1].score_file == Path("/abs/b01.txt")

    def test_duplicate_team(self):
        with pytest.raises(ParseError, match="duplicate team 'T01'"):
            parse_submissions("T01 primary a.txt\nT01 single b.txt\n")

    def test_unknown_label(self):
        with pytest.raises(ParseError, match="unknown submission label 'contrastive'"):
            parse_submissions("T01 contrastive a.txt\n")

    def test_read_from_file(self, tmp_path):
        path = tmp_path / "submissions.txt"
        path.write_text("T01 primary t01.txt\n")

        assert read_submissions(path)[0].score_file == tmp_path / "t01.txt"


class TestRankSubmissions:
    def test_ordered_by_min_tdcf(self, tmp_path, sample_asv):
        entries = [
            entry("WEAK", write_cm(tmp_path / "weak.txt", 0.5)),
            entry("STRONG", write_cm(tmp_path / "strong.txt", 6.0)),
            entry("MID", write_cm(tmp_path / "mid.txt", 2.0)),
        ]

        ranked = rank_submissions(entries, sample_asv, max_workers=2)

        assert [r.team_id for r in ranked] == ["STRONG", "MID", "WEAK"]
        assert [r.rank for r in ranked] == [1, 2, 3]
        assert ranked[0].min_tdcf <= ranked[1].min_tdcf <= ranked[2].min_tdcf

    def test_ties_broken_by_team_id(self, tmp_path, sample_asv):
        path = write_cm(tmp_path / "same.txt", 2.0)
        entries = [entry("ZETA", path), entry("ALPHA", path)]

        ranked = rank_submissions(entries, sample_asv)

        assert [r.team_id for r in ranked] == ["ALPHA", "ZETA"]

    def test_ties_broken_by_cm_eer_first(self, tmp_path, sample_asv):
        path = write_cm(tmp_path / "same.txt", 2.0)
        report = evaluate_submission(entry("ANY", path), sample_asv)
        eers = {"ALPHA": 0.2, "ZETA": 0.1}

        def with_eer(e, *args, **kwargs):
            pooled = replace(report.pooled, cm_eer=eers[e.team_id])
            return replace(report, pooled=pooled)

        with patch(
            "spoofeval.runner.aggregate.evaluate_submission", side_effect=with_eer
        ):
            ranked = rank_submissions(
                [entry("ALPHA", path), entry("ZETA", path)], sample_asv
            )

        assert [r.team_id for r in ranked] == ["ZETA", "ALPHA"]

    def test_metrics_compared_at_report_precision(self, tmp_path, sample_asv):
        path = write_cm(tmp_path / "same.txt", 2.0)
        report = evaluate_submission(entry("ANY", path), sample_asv)
        # ALPHA is worse only below the printed digits
        jitter = {"ALPHA": (1e-7, 1e-6), "ZETA": (0.0, 0.0)}

        def jittered(e, *args, **kwargs):
            d_tdcf, d_eer = jitter[e.team_id]
            tdcf = replace(report.pooled.tdcf, min_tdcf=0.25 + d_tdcf)
            pooled = replace(report.pooled, tdcf=tdcf, cm_eer=0.1 + d_eer)
            return replace(report, pooled=pooled)

        with patch(
            "spoofeval.runner.aggregate.evaluate_submission", side_effect=jittered
        ):
            ranked = rank_submissions(
                [entry("ZETA", path), entry("ALPHA", path)], sample_asv
            )

        assert [r.team_id for r in ranked] == ["ALPHA", "ZETA"]

    def test_protocol_restricts_trials(self, tmp_path, sample_asv):
        path = write_cm(tmp_path / "cm.txt", 2.0)
        protocol = parse_protocol(
            "".join(f"S B{i} - - bonafide\n" for i in range(10))
            + "".join(f"S A01_{i} - A01 spoof\n" for i in range(5))
            + "".join(f"S A02_{i} - A02 spoof\n" for i in range(5))
        )

        ranked = rank_submissions([entry("T01", path)], sample_asv, protocol=protocol)

        assert ranked[0].report.pooled.n_bonafide == 10
        assert ranked[0].report.pooled.n_spoof == 10

    def test_join_failure_names_team(self, tmp_path, sample_asv):
        path = write_cm(tmp_path / "cm.txt", 2.0)
        protocol = parse_protocol("S MISSING - - bonafide\n")

        with pytest.raises(SubmissionError, match="submission 'T01': 1 protocol"):
            rank_submissions([entry("T01", path)], sample_asv, protocol=protocol)

    def test_unreadable_file_names_team(self, tmp_path, sample_asv):
        with pytest.raises(SubmissionError, match="submission 'T09': cannot read"):
            rank_submissions([entry("T09", tmp_path / "absent.txt")], sample_asv)


class TestRankingOutputs:
    @pytest.fixture
    def ranked(self, tmp_path, sample_asv):
        entries = [
            entry("B01", write_cm(tmp_path / "b01.txt", 1.0), SubmissionLabel.SINGLE),
            entry("T01", write_cm(tmp_path / "t01.txt", 5.0)),
            entry("T02", write_cm(tmp_path / "t02.txt", 3.0)),
            entry("T03", write_cm(tmp_path / "t03.txt", 0.2)),
        ]
        return rank_submissions(entries, sample_asv)

    def test_ranking_frame(self, ranked):
        frame = ranking_frame(ranked)

        assert list(frame.columns) == ["rank", "team_id", "label", "min_tdcf", "cm_eer"]
        assert frame["team_id"].tolist()[:2] == ["T01", "T02"]
        assert frame.loc[frame["team_id"] == "B01", "label"].item() == "single"

    def test_teams_beating_baseline(self, ranked):
        assert teams_beating_baseline(ranked, ["B01"]) == 2
        assert teams_beating_baseline(ranked, []) == 0

    def test_unknown_baseline(self, ranked):
        with pytest.raises(SubmissionError, match="submission 'B99'"):
            teams_beating_baseline(ranked, ["B99"])

    def test_boxplot_frame(self, ranked):
        frame = boxplot_frame(ranked, top_n=3)

        assert frame["attack_label"].tolist() == ["A01", "A02"]
        assert frame["n_submissions"].tolist() == [3, 3]
        top = [r.report.by_label("A01").min_tdcf for r in ranked[:3]]
        row = frame.iloc[0]
        assert row["min"] == min(top)
        assert row["max"] == max(top)
        assert row["median"] == pytest.approx(np.median(top))
        assert row["asv_spoof_eer"] == ranked[0].report.by_label("A01").asv_spoof_eer
