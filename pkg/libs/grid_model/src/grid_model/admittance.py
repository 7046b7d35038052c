"""Nodal and branch admittance matrices for the pi-model network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .models import Grid


@dataclass(frozen=True)
class AdmittanceMatrix:
    """Sparse complex admittances of a grid.

    ``ybus @ V`` gives the nodal current injections, ``yf @ V`` and
    ``yt @ V`` the currents entering each line at its from/to terminal.
    """

    ybus: csr_matrix
    yf: csr_matrix
    yt: csr_matrix

    @property
    def dimension(self) -> int:
        return self.ybus.shape[0]

    def dense(self) -> np.ndarray:
        return self.ybus.toarray()


def _line_terms(grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    r = np.array([line.r for line in grid.lines], dtype=float)
    x = np.array([line.x for line in grid.lines], dtype=float)
    b = np.array([line.b_shunt for line in grid.lines], dtype=float)
    y_series = 1.0 / (r + 1j * x) if r.size else np.zeros(0, dtype=complex)
    y_ff = y_series + 1j * b / 2.0
    y_tt = y_ff.copy()
    y_ft = -y_series
    y_tf = -y_series
    return y_ff, y_ft, y_tf, y_tt


def branch_admittances(grid: Grid) -> tuple[csr_matrix, csr_matrix]:
    """Return the (Yf, Yt) terminal admittance matrices, shape (n_lines, n_buses)."""

    nb = grid.n_buses
    nl = grid.n_lines
    f = np.array([line.from_bus for line in grid.lines], dtype=int)
    t = np.array([line.to_bus for line in grid.lines], dtype=int)
    y_ff, y_ft, y_tf, y_tt = _line_terms(grid)

    rows = np.concatenate([np.arange(nl), np.arange(nl)])
    cols = np.concatenate([f, t])
    yf = csr_matrix((np.concatenate([y_ff, y_ft]), (rows, cols)), shape=(nl, nb), dtype=complex)
    yt = csr_matrix((np.concatenate([y_tf, y_tt]), (rows, cols)), shape=(nl, nb), dtype=complex)
    return yf, yt


def build_admittance(grid: Grid) -> AdmittanceMatrix:
    """Assemble Ybus = Cf^T Yf + Ct^T Yt for a valid grid."""

    nb = grid.n_buses
    nl = grid.n_lines
    f = np.array([line.from_bus for line in grid.lines], dtype=int)
    t = np.array([line.to_bus for line in grid.lines], dtype=int)
    ones = np.ones(nl)
    cf = csr_matrix((ones, (np.arange(nl), f)), shape=(nl, nb))
    ct = csr_matrix((ones, (np.arange(nl), t)), shape=(nl, nb))

    yf, yt = branch_admittances(grid)
    ybus = csr_matrix(cf.T @ yf + ct.T @ yt, shape=(nb, nb), dtype=complex)
    ybus.sum_duplicates()
    ybus.sort_indices()
    return AdmittanceMatrix(ybus=ybus, yf=yf, yt=yt)
