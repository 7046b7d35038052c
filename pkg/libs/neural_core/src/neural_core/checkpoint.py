"""Checkpoint container: an ``.npz``-compatible zip of ``.npy`` members plus ``meta.json``.

Every member carries the same fixed timestamp and members are written in
sorted order, so equal payloads produce equal files.
"""

from __future__ import annotations

import io
import json
import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .adam import OptimizerState
from .errors import CheckpointFormatError
from .mlp import Layer, MlpParams

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
META_MEMBER = "meta.json"
FIXED_DATE = (1980, 1, 1, 0, 0, 0)


@dataclass
class Checkpoint:
    networks: dict[str, MlpParams]
    optimizers: dict[str, OptimizerState] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)


def _npy_bytes(array: np.ndarray) -> bytes:
    buffer = io.BytesIO()
    np.lib.format.write_array(buffer, np.ascontiguousarray(array), allow_pickle=False)
    return buffer.getvalue()


def _write_member(archive: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=FIXED_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    archive.writestr(info, data)


def _arrays(checkpoint: Checkpoint) -> dict[str, np.ndarray]:
    arrays: dict[str, np.ndarray] = {}
    for name, params in checkpoint.networks.items():
        for i, layer in enumerate(params.layers):
            arrays[f"{name}/w{i}.npy"] = layer.weight
            arrays[f"{name}/b{i}.npy"] = layer.bias
    for name, state in checkpoint.optimizers.items():
        for i in range(len(state.m_weights)):
            arrays[f"opt_{name}/mw{i}.npy"] = state.m_weights[i]
            arrays[f"opt_{name}/vw{i}.npy"] = state.v_weights[i]
            arrays[f"opt_{name}/mb{i}.npy"] = state.m_biases[i]
            arrays[f"opt_{name}/vb{i}.npy"] = state.v_biases[i]
    return arrays


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "format_version": FORMAT_VERSION,
        "networks": {
            name: {"sizes": params.sizes, "output_activation": params.output_activation.value}
            for name, params in checkpoint.networks.items()
        },
        "optimizers": {
            name: {
                "lr": state.lr,
                "beta1": state.beta1,
                "beta2": state.beta2,
                "eps": state.eps,
                "step": state.step,
                "layers": len(state.m_weights),
            }
            for name, state in checkpoint.optimizers.items()
        },
        "metadata": checkpoint.metadata,
    }
    arrays = _arrays(checkpoint)
    with zipfile.ZipFile(target, "w") as archive:
        _write_member(archive, META_MEMBER, json.dumps(meta, sort_keys=True).encode("utf-8"))
        for name in sorted(arrays):
            _write_member(archive, name, _npy_bytes(arrays[name]))
    logger.info(f"Wrote checkpoint {target} ({len(arrays)} arrays)")
    return target


def load_checkpoint(path: str | Path) -> Checkpoint:
    source = Path(path)
    try:
        with zipfile.ZipFile(source) as archive:
            meta = json.loads(archive.read(META_MEMBER))
            if meta.get("format_version") != FORMAT_VERSION:
                raise CheckpointFormatError(
                    f"{source}: format version {meta.get('format_version')} is not supported"
                )

            def read(name: str) -> np.ndarray:
                return np.lib.format.read_array(io.BytesIO(archive.read(name)), allow_pickle=False)

            networks = {}
            for name, spec in meta["networks"].items():
                n_layers = len(spec["sizes"]) - 1
                layers = [
                    Layer(read(f"{name}/w{i}.npy"), read(f"{name}/b{i}.npy"))
                    for i in range(n_layers)
                ]
                networks[name] = MlpParams(layers, spec["output_activation"])

            optimizers = {}
            for name, spec in meta["optimizers"].items():
                n_layers = spec["layers"]
                prefix = f"opt_{name}"
                optimizers[name] = OptimizerState(
                    lr=spec["lr"],
                    beta1=spec["beta1"],
                    beta2=spec["beta2"],
                    eps=spec["eps"],
                    step=spec["step"],
                    m_weights=[read(f"{prefix}/mw{i}.npy") for i in range(n_layers)],
                    v_weights=[read(f"{prefix}/vw{i}.npy") for i in range(n_layers)],
                    m_biases=[read(f"{prefix}/mb{i}.npy") for i in range(n_layers)],
                    v_biases=[read(f"{prefix}/vb{i}.npy") for i in range(n_layers)],
                )
    except (zipfile.BadZipFile, KeyError, json.JSONDecodeError) as exc:
        raise CheckpointFormatError(f"{source}: unreadable checkpoint: {exc}") from exc

    logger.info(f"Loaded checkpoint {source}")
    return Checkpoint(networks, optimizers, meta.get("metadata", {}))
