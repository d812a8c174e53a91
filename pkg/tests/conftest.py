import numpy as np
import pytest

from spoofeval.data.audio import AudioBuffer
from spoofeval.data.records import Key, ScoreKind
from spoofeval.data.scores import ScoreRecord, ScoreSet
from spoofeval.simulation.categories import load_category_table


def make_score_set(kind, rows):
    """ScoreSet from ``(trial_id, attack, key, score)`` tuples."""
    return ScoreSet(
        records=tuple(
            ScoreRecord(trial_id=t, attack_label=a, key=Key(k), score=float(s))
            for t, a, k, s in rows
        ),
        kind=kind,
    )


def cm_scores(bonafide, spoof_by_attack):
    rows = [(f"B{i}", "bonafide", "bonafide", s) for i, s in enumerate(bonafide)]
    for attack, scores in sorted(spoof_by_attack.items()):
        rows += [(f"{attack}_{i}", attack, "spoof", s) for i, s in enumerate(scores)]
    return make_score_set(ScoreKind.CM, rows)


def asv_scores(target, nontarget, spoof_by_attack):
    rows = [(f"T{i}", "bonafide", "target", s) for i, s in enumerate(target)]
    rows += [(f"N{i}", "bonafide", "nontarget", s) for i, s in enumerate(nontarget)]
    for attack, scores in sorted(spoof_by_attack.items()):
        rows += [(f"S{attack}_{i}", attack, "spoof", s) for i, s in enumerate(scores)]
    return make_score_set(ScoreKind.ASV, rows)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def sample_asv():
    """ASV system with a well separated target class and two attacks."""
    gen = np.random.default_rng(7)
    return asv_scores(
        target=gen.normal(3.0, 1.0, 200),
        nontarget=gen.normal(-3.0, 1.0, 200),
        spoof_by_attack={
            "A01": gen.normal(0.0, 1.0, 100),
            "A02": gen.normal(2.0, 1.0, 100),
        },
    )


@pytest.fixture
def sample_cm():
    gen = np.random.default_rng(8)
    return cm_scores(
        bonafide=gen.normal(2.0, 1.0, 150),
        spoof_by_attack={
            "A01": gen.normal(-2.0, 1.0, 80),
            "A02": gen.normal(0.5, 1.0, 80),
        },
    )


@pytest.fixture
def category_table():
    return load_category_table()


@pytest.fixture
def tone():
    """One second of a 1 kHz tone at 16 kHz."""
    t = np.arange(16000) / 16000.0
    return AudioBuffer(samples=0.5 * np.sin(2 * np.pi * 1000.0 * t), sample_rate=16000)
