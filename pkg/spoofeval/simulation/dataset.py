"""Rendering a whole PA protocol into audio plus a manifest."""

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from spoofeval.config import DEFAULT_MAX_WORKERS, SAMPLE_RATE
from spoofeval.data.audio import AudioBuffer, read_wav, write_wav
from spoofeval.data.protocol import TrialRecord, write_protocol
from spoofeval.data.records import Key, infer_subset
from spoofeval.exceptions import SimulationError
from spoofeval.logging_config import get_logger
from spoofeval.runner.execute import run_ordered
from spoofeval.simulation.categories import (
    ACOUSTIC_LEVELS,
    REPLAY_LEVELS,
    CategoryTable,
    category_for_trial,
)
from spoofeval.simulation.render import simulate_bonafide, simulate_replay
from spoofeval.simulation.sampling import PaConfig, SeedSpace, sample_config, trial_seed

logger = get_logger("simulation")

SourceLoader = Callable[[TrialRecord], AudioBuffer]

MANIFEST_COLUMNS = (
    "trial_id",
    "speaker_id",
    "key",
    "category",
    "attack_label",
    "seed_space",
    "rng_seed",
    "config_hash",
    "samples",
)


@dataclass(frozen=True, eq=False)
class RenderedTrial:
    trial: TrialRecord
    audio: AudioBuffer
    config: PaConfig

    def manifest_row(self) -> Dict[str, object]:
        return {
            "trial_id": self.trial.trial_id,
            "speaker_id": self.trial.speaker_id,
            "key": self.trial.key.value,
            "category": str(self.config.category),
            "attack_label": self.trial.attack_label,
            "seed_space": self.config.seed_space.name.lower(),
            "rng_seed": self.config.rng_seed,
            "config_hash": self.config.hash,
            "samples": len(self.audio),
        }


def directory_loader(source_dir: Union[str, Path]) -> SourceLoader:
    """Source audio at ``<dir>/<trial_id>.wav``, else ``<dir>/<speaker_id>.wav``."""
    root = Path(source_dir)

    def load(trial: TrialRecord) -> AudioBuffer:
        for stem in (trial.trial_id, trial.speaker_id):
            path = root / f"{stem}.wav"
            if path.is_file():
                return read_wav(path)
        raise SimulationError(
            f"trial '{trial.trial_id}': no source audio in {root} "
            f"(tried {trial.trial_id}.wav, {trial.speaker_id}.wav)"
        )

    return load


def render_trial(
    trial: TrialRecord,
    speech: AudioBuffer,
    table: CategoryTable,
    master_seed: int,
    space: SeedSpace = SeedSpace.KNOWN,
) -> RenderedTrial:
    category = category_for_trial(trial)
    cfg = sample_config(
        category,
        trial_seed(master_seed, trial.trial_id),
        table,
        space=space,
        sample_rate=speech.sample_rate,
    )
    try:
        if trial.is_bonafide:
            audio = simulate_bonafide(speech, cfg)
        else:
            audio = simulate_replay(speech, cfg)
    except SimulationError as e:
        raise SimulationError(f"trial '{trial.trial_id}': {e}") from e
    return RenderedTrial(trial=trial, audio=audio, config=cfg)


def generate_dataset(
    protocol: Sequence[TrialRecord],
    load_source: SourceLoader,
    table: CategoryTable,
    master_seed: int,
    space: SeedSpace = SeedSpace.KNOWN,
    max_workers: int = DEFAULT_MAX_WORKERS,
) -> List[RenderedTrial]:
    """Render every protocol trial, in protocol order.

    Each trial is seeded from ``(master_seed, trial_id)`` alone, so the
    result does not depend on worker scheduling.

    Raises:
        SimulationError: missing source audio or an unrenderable category,
            naming the trial
    """
    # resolve all categories up front so label errors surface before rendering
    for trial in protocol:
        category_for_trial(trial)

    def render(trial: TrialRecord) -> RenderedTrial:
        return render_trial(trial, load_source(trial), table, master_seed, space)

    rendered = run_ordered(
        render, protocol, max_workers=max_workers, label=lambda t: t.trial_id
    )
    logger.info(
        f"Rendered {len(rendered)} PA trials",
        extra={
            "trial_count": len(rendered),
            "seed_space": space.name,
            "master_seed": master_seed,
        },
    )
    return rendered


def manifest_frame(rendered: Sequence[RenderedTrial]) -> pd.DataFrame:
    return pd.DataFrame(
        [r.manifest_row() for r in rendered], columns=list(MANIFEST_COLUMNS)
    )


def write_dataset(out_dir: Union[str, Path], rendered: Sequence[RenderedTrial]) -> Path:
    """Write ``audio/<trial_id>.wav``, ``manifest.csv`` and ``protocol.txt``."""
    out = Path(out_dir)
    audio_dir = out / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    for r in rendered:
        write_wav(audio_dir / f"{r.trial.trial_id}.wav", r.audio)
    manifest_frame(rendered).to_csv(out / "manifest.csv", index=False)
    write_protocol(out / "protocol.txt", [r.trial for r in rendered])
    return out


def grid_protocol(
    source_ids: Sequence[str],
    prefix: str = "PA_T",
    bonafide_per_environment: int = 1,
) -> List[TrialRecord]:
    """Protocol covering every acoustic environment and replay configuration.

    Each acoustic triple gets ``bonafide_per_environment`` bona fide trials
    and one replay trial per replay pair. Source ids are assigned
    round-robin and used as the speaker column.
    """
    if not source_ids:
        raise SimulationError("grid protocol needs at least one source id")
    speakers = itertools.cycle(source_ids)
    counter = itertools.count(1)
    records: List[TrialRecord] = []

    def add(system_id: str, attack: str, key: Key) -> None:
        trial_id = f"{prefix}_{next(counter):07d}"
        records.append(
            TrialRecord(
                speaker_id=next(speakers),
                trial_id=trial_id,
                system_id=system_id,
                attack_label=attack,
                key=key,
                subset=infer_subset(trial_id),
            )
        )

    for acoustic in itertools.product(ACOUSTIC_LEVELS, repeat=3):
        environment = "".join(acoustic)
        for _ in range(bonafide_per_environment):
            add(environment, "bonafide", Key.BONAFIDE)
        for replay in itertools.product(REPLAY_LEVELS, repeat=2):
            add(environment, "".join(replay), Key.SPOOF)
    return records


def synthetic_source(
    seed: int, duration: float = 1.0, sample_rate: int = SAMPLE_RATE
) -> AudioBuffer:
    """Harmonic test signal with a glottal-like pitch contour, for smoke runs
    without a speech corpus."""
    rng = np.random.default_rng(seed)
    t = np.arange(int(duration * sample_rate)) / sample_rate
    f0 = rng.uniform(100.0, 220.0) * (1.0 + 0.05 * np.sin(2 * np.pi * 3.0 * t))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    harmonics = sum(
        np.sin(k * phase) / k for k in range(1, 20) if k * f0.max() < sample_rate / 2
    )
    noise = 0.05 * rng.standard_normal(t.size)
    return AudioBuffer(samples=0.5 * (harmonics + noise) / 3.0, sample_rate=sample_rate)

