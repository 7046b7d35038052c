"""Polar Newton-Raphson power flow.

All non-slack buses are PQ buses; the slack bus fixes the voltage
magnitude and the angle reference.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.sparse import bmat, csc_matrix, csr_matrix, diags
from scipy.sparse.linalg import splu

from grid_model import AdmittanceMatrix, Grid, build_admittance

from .models import InjectionSet, PowerFlowOptions, PowerFlowSolution

logger = logging.getLogger(__name__)


def _complex_voltage(v_mag: np.ndarray, v_ang: np.ndarray) -> np.ndarray:
    return v_mag * np.exp(1j * v_ang)


def _check_injections(grid: Grid, inj: InjectionSet) -> None:
    n = grid.n_buses
    if inj.p.shape != (n,) or inj.q.shape != (n,):
        raise ValueError(
            f"injection vectors must have length {n}, got {inj.p.shape} and {inj.q.shape}"
        )
    if not (np.all(np.isfinite(inj.p)) and np.all(np.isfinite(inj.q))):
        raise ValueError("injection vectors must be finite")


def _power_derivatives(ybus: csr_matrix, v: np.ndarray) -> tuple[csr_matrix, csr_matrix]:
    """Partial derivatives of the complex nodal power w.r.t. |V| and angle."""

    ibus = ybus @ v
    diag_v = diags(v)
    diag_i = diags(ibus)
    diag_vnorm = diags(v / np.abs(v))
    ds_dvm = diag_v @ (ybus @ diag_vnorm).conj() + diag_i.conj() @ diag_vnorm
    ds_dva = 1j * diag_v @ (diag_i - ybus @ diag_v).conj()
    return csr_matrix(ds_dvm), csr_matrix(ds_dva)


def _jacobian(ybus: csr_matrix, v: np.ndarray, pq: np.ndarray) -> csc_matrix:
    ds_dvm, ds_dva = _power_derivatives(ybus, v)
    dva = ds_dva[pq][:, pq]
    dvm = ds_dvm[pq][:, pq]
    return csc_matrix(bmat([[dva.real, dvm.real], [dva.imag, dvm.imag]]))


def _nodal_power(ybus: csr_matrix, v: np.ndarray) -> np.ndarray:
    return v * np.conj(ybus @ v)


def mismatch(
    grid: Grid,
    inj: InjectionSet,
    v_mag: np.ndarray,
    v_ang: np.ndarray,
    *,
    admittance: AdmittanceMatrix | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-bus (P, Q) residuals of the polar power-flow equations.

    The slack bus balances the network, so its residuals are reported as 0.
    """
    _check_injections(grid, inj)
    if v_mag.shape != (grid.n_buses,) or v_ang.shape != (grid.n_buses,):
        raise ValueError("voltage vectors must have one entry per bus")
    admittance = admittance or build_admittance(grid)
    s_calc = _nodal_power(admittance.ybus, _complex_voltage(v_mag, v_ang))
    res_p = s_calc.real - inj.p
    res_q = s_calc.imag - inj.q
    slack = grid.slack_index
    res_p[slack] = 0.0
    res_q[slack] = 0.0
    return res_p, res_q


def branch_flows(
    grid: Grid,
    v_mag: np.ndarray,
    v_ang: np.ndarray,
    *,
    admittance: AdmittanceMatrix | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Terminal flows S_f, S_t of every line and its relative apparent-power loading."""

    admittance = admittance or build_admittance(grid)
    v = _complex_voltage(v_mag, v_ang)
    f = np.array([line.from_bus for line in grid.lines], dtype=int)
    t = np.array([line.to_bus for line in grid.lines], dtype=int)
    s_max = np.array([line.s_max for line in grid.lines], dtype=float)
    s_from = v[f] * np.conj(admittance.yf @ v)
    s_to = v[t] * np.conj(admittance.yt @ v)
    loading = np.maximum(np.abs(s_from), np.abs(s_to)) / s_max if s_max.size else np.zeros(0)
    return s_from, s_to, loading


def solve_power_flow(
    grid: Grid,
    inj: InjectionSet,
    opts: PowerFlowOptions | None = None,
    *,
    admittance: AdmittanceMatrix | None = None,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
) -> PowerFlowSolution:
    """Solve the AC power flow for the given injections.

    Args:
        grid: Valid grid.
        inj: Net injections per bus; slack entries are ignored.
        opts: Solver options, defaults to ``PowerFlowOptions()``.
        admittance: Pre-assembled admittance matrices for repeated solves.
        initial: ``(v_mag, v_ang)`` start point used when ``opts.flat_start``
            is False.

    Returns:
        The final iterate. Non-convergence and singular Jacobians are
        reported through ``converged`` and ``singular``, never raised.
    """
    opts = opts or PowerFlowOptions()
    _check_injections(grid, inj)
    admittance = admittance or build_admittance(grid)
    ybus = admittance.ybus

    n = grid.n_buses
    slack = grid.slack_index
    pq = np.array([i for i in range(n) if i != slack], dtype=int)
    npq = pq.size

    if opts.flat_start or initial is None:
        v_mag = np.ones(n)
        v_ang = np.zeros(n)
    else:
        v_mag = np.array(initial[0], dtype=float, copy=True)
        v_ang = np.array(initial[1], dtype=float, copy=True)
    v_mag[slack] = opts.slack_voltage
    v_ang[slack] = 0.0

    s_spec = inj.p + 1j * inj.q
    v = _complex_voltage(v_mag, v_ang)

    def residual(v: np.ndarray) -> np.ndarray:
        mis = _nodal_power(ybus, v) - s_spec
        return np.concatenate([mis[pq].real, mis[pq].imag])

    f = residual(v)
    norm = float(np.max(np.abs(f))) if f.size else 0.0
    iterations = 0
    singular = False
    converged = norm <= opts.tolerance

    while not converged and iterations < opts.max_iterations:
        jac = _jacobian(ybus, v, pq)
        try:
            dx = -splu(jac).solve(f)
        except RuntimeError as exc:
            logger.warning(f"Singular Jacobian at iteration {iterations}: {exc}")
            singular = True
            break
        iterations += 1
        v_ang[pq] += dx[:npq]
        v_mag[pq] += dx[npq:]
        v = _complex_voltage(v_mag, v_ang)
        f = residual(v)
        norm = float(np.max(np.abs(f)))
        if not np.isfinite(norm):
            logger.debug(f"Power flow diverged to non-finite state after {iterations} iterations")
            break
        converged = norm <= opts.tolerance

    if not converged:
        logger.debug(
            f"Power flow did not converge: {iterations} iterations, mismatch {norm:.3e}"
        )

    s_calc = _nodal_power(ybus, v)
    s_from, s_to, loading = branch_flows(grid, v_mag, v_ang, admittance=admittance)
    return PowerFlowSolution(
        v_mag=v_mag,
        v_ang=v_ang,
        s_from=s_from,
        s_to=s_to,
        loading=loading,
        converged=converged,
        iterations=iterations,
        max_mismatch=norm,
        p_calc=s_calc.real,
        q_calc=s_calc.imag,
        singular=singular,
    )
