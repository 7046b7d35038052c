"""Fully connected networks: ReLU hidden layers, tanh or identity output.

Layers compute ``x @ weight + bias`` on row-major batches, so a weight has
shape ``(n_in, n_out)``. Every in-place update bumps ``MlpParams.version``;
a forward cache remembers the version it was computed with and backward
refuses a cache taken before the last update.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import CacheMismatchError, ShapeMismatchError


class OutputActivation(str, Enum):
    TANH = "tanh"
    IDENTITY = "identity"


@dataclass
class Layer:
    weight: np.ndarray
    bias: np.ndarray

    @property
    def n_in(self) -> int:
        return int(self.weight.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.weight.shape[1])


@dataclass
class MlpParams:
    layers: list[Layer]
    output_activation: OutputActivation = OutputActivation.IDENTITY
    version: int = 0

    def __post_init__(self) -> None:
        self.output_activation = OutputActivation(self.output_activation)
        if not self.layers:
            raise ShapeMismatchError("an MLP needs at least one layer")
        for i, layer in enumerate(self.layers):
            if layer.weight.ndim != 2 or layer.bias.shape != (layer.n_out,):
                raise ShapeMismatchError(
                    f"layer {i}: weight {layer.weight.shape} and bias {layer.bias.shape} do not match"
                )
        for i, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.n_out != b.n_in:
                raise ShapeMismatchError(f"layer {i} outputs {a.n_out}, layer {i + 1} takes {b.n_in}")

    @property
    def sizes(self) -> list[int]:
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    @property
    def n_inputs(self) -> int:
        return self.layers[0].n_in

    @property
    def n_outputs(self) -> int:
        return self.layers[-1].n_out

    def copy(self) -> MlpParams:
        return MlpParams(
            [Layer(layer.weight.copy(), layer.bias.copy()) for layer in self.layers],
            self.output_activation,
        )

    def is_finite(self) -> bool:
        return all(
            np.all(np.isfinite(layer.weight)) and np.all(np.isfinite(layer.bias))
            for layer in self.layers
        )

    def touch(self) -> None:
        self.version += 1


@dataclass
class GradientSet:
    """Gradients mirroring the layer structure of an MlpParams."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def zeros_like(cls, params: MlpParams) -> GradientSet:
        return cls(
            [np.zeros_like(layer.weight) for layer in params.layers],
            [np.zeros_like(layer.bias) for layer in params.layers],
        )

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(g)) for g in self.weights + self.biases)

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g**2)) for g in self.weights + self.biases)))

    def check_matches(self, params: MlpParams) -> None:
        if len(self.weights) != len(params.layers) or len(self.biases) != len(params.layers):
            raise ShapeMismatchError("gradient set and parameters have different layer counts")
        for i, (gw, gb, layer) in enumerate(zip(self.weights, self.biases, params.layers)):
            if gw.shape != layer.weight.shape or gb.shape != layer.bias.shape:
                raise ShapeMismatchError(f"layer {i}: gradient shapes do not match parameters")


@dataclass(frozen=True)
class MlpCache:
    inputs: list[np.ndarray]
    pre_activations: list[np.ndarray]
    output: np.ndarray
    sizes: tuple[int, ...]
    version: int
    squeezed: bool = field(default=False)


def init_mlp(
    sizes: list[int],
    output_activation: OutputActivation | str = OutputActivation.IDENTITY,
    rng: np.random.Generator | None = None,
    final_scale: float = 3e-3,
) -> MlpParams:
    """Fan-in uniform initialisation; the last layer draws from ±final_scale.

    Args:
        sizes: ``[n_inputs, hidden..., n_outputs]``.
        output_activation: ``"tanh"`` for bounded outputs, ``"identity"`` otherwise.
        rng: Generator for reproducible draws.
        final_scale: Half-width of the last layer's uniform init.
    """
    if len(sizes) < 2 or any(size < 1 for size in sizes):
        raise ShapeMismatchError(f"invalid layer sizes {sizes}")
    rng = rng or np.random.default_rng()
    layers = []
    for i, (n_in, n_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        bound = final_scale if i == len(sizes) - 2 else 1.0 / np.sqrt(n_in)
        layers.append(
            Layer(
                weight=rng.uniform(-bound, bound, size=(n_in, n_out)),
                bias=rng.uniform(-bound, bound, size=n_out),
            )
        )
    return MlpParams(layers, OutputActivation(output_activation))


def forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, MlpCache]:
    """Evaluate the network on one input vector or a ``(batch, n_inputs)`` array."""

    x = np.asarray(x, dtype=float)
    squeezed = x.ndim == 1
    batch = x[None, :] if squeezed else x
    if batch.ndim != 2 or batch.shape[1] != params.n_inputs:
        raise ShapeMismatchError(f"expected {params.n_inputs} input features, got shape {x.shape}")

    inputs: list[np.ndarray] = []
    pre: list[np.ndarray] = []
    a = batch
    last = len(params.layers) - 1
    for i, layer in enumerate(params.layers):
        inputs.append(a)
        z = a @ layer.weight + layer.bias
        pre.append(z)
        if i < last:
            a = np.maximum(z, 0.0)
        elif params.output_activation is OutputActivation.TANH:
            a = np.tanh(z)
        else:
            a = z

    cache = MlpCache(inputs, pre, a, tuple(params.sizes), params.version, squeezed)
    return (a[0] if squeezed else a), cache


def backward(
    params: MlpParams, cache: MlpCache, grad_output: np.ndarray
) -> tuple[GradientSet, np.ndarray]:
    """Gradients of ``sum(output * grad_output)`` w.r.t. parameters and input.

    Batch contributions are summed; scale ``grad_output`` by ``1/batch`` for
    a mean loss.
    """
    if cache.sizes != tuple(params.sizes) or cache.version != params.version:
        raise CacheMismatchError(
            f"cache from version {cache.version} of {list(cache.sizes)}, "
            f"params at version {params.version} of {params.sizes}"
        )
    g = np.asarray(grad_output, dtype=float)
    if cache.squeezed and g.ndim == 1:
        g = g[None, :]
    if g.shape != cache.output.shape:
        raise ShapeMismatchError(f"grad_output shape {g.shape} != output shape {cache.output.shape}")

    last = len(params.layers) - 1
    if params.output_activation is OutputActivation.TANH:
        g = g * (1.0 - cache.output**2)

    weights: list[np.ndarray] = [np.empty(0)] * len(params.layers)
    biases: list[np.ndarray] = [np.empty(0)] * len(params.layers)
    for i in range(last, -1, -1):
        if i < last:
            g = g * (cache.pre_activations[i] > 0.0)
        weights[i] = cache.inputs[i].T @ g
        biases[i] = g.sum(axis=0)
        g = g @ params.layers[i].weight.T

    grad_input = g[0] if cache.squeezed else g
    return GradientSet(weights, biases), grad_input


def soft_update(target: MlpParams, online: MlpParams, tau: float) -> MlpParams:
    """Polyak averaging ``target <- tau * online + (1 - tau) * target`` in place."""

    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must be in (0, 1], got {tau}")
    if target.sizes != online.sizes:
        raise ShapeMismatchError(f"target {target.sizes} and online {online.sizes} differ")
    for t, o in zip(target.layers, online.layers):
        t.weight *= 1.0 - tau
        t.weight += tau * o.weight
        t.bias *= 1.0 - tau
        t.bias += tau * o.bias
    target.touch()
    return target
