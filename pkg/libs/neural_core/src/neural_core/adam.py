from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import GradientSet, MlpParams


@dataclass
class OptimizerState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m_weights: list[np.ndarray] = field(default_factory=list)
    v_weights: list[np.ndarray] = field(default_factory=list)
    m_biases: list[np.ndarray] = field(default_factory=list)
    v_biases: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: MlpParams, lr: float, **kwargs: float) -> OptimizerState:
        zeros = GradientSet.zeros_like(params)
        return cls(
            lr=lr,
            m_weights=[w.copy() for w in zeros.weights],
            v_weights=[w.copy() for w in zeros.weights],
            m_biases=[b.copy() for b in zeros.biases],
            v_biases=[b.copy() for b in zeros.biases],
            **kwargs,
        )


def _update(
    param: np.ndarray, grad: np.ndarray, m: np.ndarray, v: np.ndarray, state: OptimizerState
) -> None:
    m *= state.beta1
    m += (1.0 - state.beta1) * grad
    v *= state.beta2
    v += (1.0 - state.beta2) * grad**2
    m_hat = m / (1.0 - state.beta1**state.step)
    v_hat = v / (1.0 - state.beta2**state.step)
    param -= state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


def adam_step(
    params: MlpParams, grads: GradientSet, state: OptimizerState
) -> tuple[MlpParams, OptimizerState]:
    """Bias-corrected Adam update of ``params`` and ``state`` in place."""

    grads.check_matches(params)
    state.step += 1
    for i, layer in enumerate(params.layers):
        _update(layer.weight, grads.weights[i], state.m_weights[i], state.v_weights[i], state)
        _update(layer.bias, grads.biases[i], state.m_biases[i], state.v_biases[i], state)
    params.touch()
    return params, state
