"""Execution context for command runs."""

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from spoofeval.config import DEFAULT_MAX_WORKERS, DEFAULT_OUT_DIR
from spoofeval.logging_config import get_logger

logger = get_logger("runner")


@dataclass
class RunContext:
    """Command run context with run_id, output directory, seed and worker count."""

    run_id: str
    out_dir: Path = Path(DEFAULT_OUT_DIR)
    seed: int = 0
    jobs: int = DEFAULT_MAX_WORKERS
    extra: Dict[str, Any] = field(default_factory=dict)
    created_at: datetime = field(default_factory=datetime.now)
    source: str = "manual"

    @property
    def run_dir(self) -> Path:
        return Path(self.out_dir) / self.run_id


class RunContextFactory:
    """Factory for creating standardized RunContext instances."""

    @staticmethod
    def create_timestamped(
        prefix: str = "run",
        out_dir: Optional[str] = None,
        seed: int = 0,
        jobs: int = DEFAULT_MAX_WORKERS,
    ) -> RunContext:
        """Create a RunContext with timestamp-based ID.

        Args:
            prefix: Prefix for the run ID (usually the subcommand)
            out_dir: Output directory override
            seed: Master seed for the run
            jobs: Worker count

        Returns:
            RunContext with timestamped run_id
        """
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        run_id = f"{prefix}_{timestamp}"

        output_dir = Path(out_dir) if out_dir else Path(DEFAULT_OUT_DIR)

        logger.info(
            f"Created timestamped RunContext: {run_id}",
            extra={"run_id": run_id, "seed": seed, "jobs": jobs},
        )

        return RunContext(
            run_id=run_id,
            out_dir=output_dir,
            seed=seed,
            jobs=jobs,
            source="manual",
            extra={"created_by": "RunContextFactory.create_timestamped"},
        )

    @staticmethod
    def create_fixed(
        out_dir: str, seed: int = 0, jobs: int = DEFAULT_MAX_WORKERS
    ) -> RunContext:
        """Create a RunContext that writes straight into ``out_dir``.

        Used when the caller names the output location explicitly, so that
        reruns land in the same place and can be compared byte for byte.
        """
        path = Path(out_dir)
        return RunContext(
            run_id=path.name,
            out_dir=path.parent,
            seed=seed,
            jobs=jobs,
            source="cli",
            extra={"created_by": "RunContextFactory.create_fixed"},
        )
