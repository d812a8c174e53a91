"""Parallel execution of independent work items with ordered merging."""

import os
import shutil
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, List, Sequence, TypeVar, Union

from spoofeval.config import DEFAULT_MAX_WORKERS
from spoofeval.exceptions import OutputCollisionError, SpoofEvalError
from spoofeval.logging_config import get_logger

logger = get_logger("runner")

T = TypeVar("T")
R = TypeVar("R")


def _execute_single(fn: Callable[[T], R], item: T, label: str) -> R:
    start_time = time.time()
    try:
        result = fn(item)
    except Exception as e:
        execution_time = time.time() - start_time
        logger.error(
            f"Item {label} failed after {execution_time:.2f}s: {e}",
            extra={"item": label, "execution_time": execution_time, "error": str(e)},
        )
        raise
    execution_time = time.time() - start_time
    logger.debug(
        f"Item {label} completed in {execution_time:.2f}s",
        extra={"item": label, "execution_time": execution_time},
    )
    return result


def run_ordered(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: int = DEFAULT_MAX_WORKERS,
    label: Callable[[T], str] = str,
) -> List[R]:
    """Apply ``fn`` to every item, in parallel when ``max_workers > 1``.

    Results come back in input order whatever the completion order. The
    first failure (in input order) is re-raised once all items finished.
    """
    items = list(items)
    overall_start = time.time()
    if max_workers <= 1 or len(items) <= 1:
        results = [_execute_single(fn, item, label(item)) for item in items]
    else:
        slots: List = [None] * len(items)
        errors = {}
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_index = {
                executor.submit(_execute_single, fn, item, label(item)): i
                for i, item in enumerate(items)
            }
            for future in as_completed(future_to_index):
                i = future_to_index[future]
                try:
                    slots[i] = future.result()
                except Exception as e:
                    errors[i] = e
        if errors:
            raise errors[min(errors)]
        results = slots

    total_time = time.time() - overall_start
    logger.debug(
        f"Completed {len(results)} items in {total_time:.2f}s",
        extra={
            "item_count": len(results),
            "max_workers": max_workers,
            "total_time": total_time,
        },
    )
    return results


@contextmanager
def atomic_output_dir(
    path: Union[str, Path], overwrite: bool = False
) -> Iterator[Path]:
    """Stage outputs in a sibling temp dir and move them into ``path`` on success.

    Nothing is left at ``path`` when the block raises.
    """
    target = Path(path)
    if target.exists() and any(target.iterdir()) and not overwrite:
        raise OutputCollisionError(
            f"Output directory already holds results: {target}"
        )
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{target.name}.", dir=target.parent))
    try:
        yield staging
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    try:
        if target.exists():
            shutil.rmtree(target)
        os.replace(staging, target)
    except OSError as e:
        shutil.rmtree(staging, ignore_errors=True)
        raise SpoofEvalError(f"Could not move outputs into {target}: {e}")
    logger.info(f"Wrote outputs to {target}", extra={"out_dir": str(target)})
