"""Self-describing little-endian binary containers for features and models.

Layout: 8-byte magic, ``<u4`` version, ``<u4`` reserved (16-byte header),
then ``<u4`` counts, then row-major ``<f8`` payload.
"""

from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from spoofeval.exceptions import ContainerFormatError

CONTAINER_VERSION = 1
HEADER_BYTES = 16


def pack_container(
    magic: bytes, counts: Sequence[int], payload: np.ndarray
) -> bytes:
    if len(magic) != 8:
        raise ValueError("container magic must be 8 bytes")
    header = magic + np.array([CONTAINER_VERSION, 0], dtype="<u4").tobytes()
    return (
        header
        + np.asarray(counts, dtype="<u4").tobytes()
        + np.ascontiguousarray(payload, dtype="<f8").tobytes()
    )


def unpack_container(
    data: bytes, magic: bytes, n_counts: int, source: str = "<bytes>"
) -> Tuple[Tuple[int, ...], np.ndarray]:
    """Return ``(counts, flat float64 payload)``.

    Raises:
        ContainerFormatError: bad magic, unsupported version or truncated data
    """
    if len(data) < HEADER_BYTES + 4 * n_counts:
        raise ContainerFormatError(f"{source}: truncated header")
    if data[:8] != magic:
        raise ContainerFormatError(f"{source}: bad magic {data[:8]!r}")
    version = int(np.frombuffer(data, dtype="<u4", count=1, offset=8)[0])
    if version != CONTAINER_VERSION:
        raise ContainerFormatError(f"{source}: unsupported version {version}")
    counts = tuple(
        int(c)
        for c in np.frombuffer(data, dtype="<u4", count=n_counts, offset=HEADER_BYTES)
    )
    body = data[HEADER_BYTES + 4 * n_counts :]
    if len(body) % 8:
        raise ContainerFormatError(f"{source}: payload is not a float64 array")
    return counts, np.frombuffer(body, dtype="<f8").astype(float)


def write_container(
    path: Union[str, Path], magic: bytes, counts: Sequence[int], payload: np.ndarray
) -> None:
    Path(path).write_bytes(pack_container(magic, counts, payload))


def read_container(
    path: Union[str, Path], magic: bytes, n_counts: int
) -> Tuple[Tuple[int, ...], np.ndarray]:
    return unpack_container(Path(path).read_bytes(), magic, n_counts, source=str(path))
