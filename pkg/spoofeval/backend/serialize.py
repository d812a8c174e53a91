"""Binary and JSON persistence of GMM back-ends."""

import json
from pathlib import Path
from typing import Union

import numpy as np

from spoofeval.backend.gmm import GmmModel
from spoofeval.data.containers import pack_container, unpack_container
from spoofeval.exceptions import ContainerFormatError

GMM_MAGIC = b"SPGMM\0\0\0"


def gmm_to_bytes(model: GmmModel) -> bytes:
    """Counts ``(components, dims)``, then weights, means and variances."""
    payload = np.concatenate(
        (model.weights, model.means.ravel(), model.variances.ravel())
    )
    return pack_container(GMM_MAGIC, (model.n_components, model.dims), payload)


def gmm_from_bytes(data: bytes, source: str = "<bytes>") -> GmmModel:
    (k, d), payload = unpack_container(data, GMM_MAGIC, 2, source)
    if payload.size != k + 2 * k * d:
        raise ContainerFormatError(
            f"{source}: expected {k + 2 * k * d} values for a {k}x{d} GMM, "
            f"found {payload.size}"
        )
    try:
        return GmmModel(
            weights=payload[:k],
            means=payload[k : k + k * d].reshape(k, d),
            variances=payload[k + k * d :].reshape(k, d),
        )
    except ValueError as e:
        raise ContainerFormatError(f"{source}: {e}") from e


def write_gmm(path: Union[str, Path], model: GmmModel) -> None:
    Path(path).write_bytes(gmm_to_bytes(model))


def read_gmm(path: Union[str, Path]) -> GmmModel:
    return gmm_from_bytes(Path(path).read_bytes(), source=str(path))


def write_gmm_json(path: Union[str, Path], model: GmmModel) -> None:
    """Human-readable export for inspection."""
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model.to_dict(), f, indent=2)
