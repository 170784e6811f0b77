"""Dense two-phase simplex with Bland's anti-cycling rule.

Solves   minimize c.x   subject to   A x = b,  x >= 0.

Each iteration re-solves with the dense basis matrix taken from the
original data instead of updating a tableau, so round-off does not
accumulate across pivots; the basis condition number is checked at every
solve.  This suits the LPs here, which have few rows and many columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPNumericalFailure

PIVOT_TOL = 1e-9
COST_TOL = 1e-10
FEAS_TOL = 1e-9
COND_LIMIT = 1e12


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    basis: np.ndarray
    duals: np.ndarray  # multipliers for the original rows: B^T y = c_B
    iterations: int


def _basis_solves(A, basis, b, cB):
    B = A[:, basis]
    cond = np.linalg.cond(B)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise LPNumericalFailure(f"basis matrix is ill conditioned (cond {cond:.3g})")
    xB = np.linalg.solve(B, b)
    y = np.linalg.solve(B.T, cB)
    return B, xB, y


def _iterate(A, b, c, basis, allowed, max_iter, start_iter=0):
    """Primal simplex from a feasible basis; returns (basis, iterations)."""
    it = start_iter
    scale = max(1.0, float(np.abs(c).max(initial=0.0)))
    while True:
        B, xB, y = _basis_solves(A, basis, b, c[basis])
        red = c - A.T @ y
        red[~allowed] = 0.0
        red[basis] = 0.0
        entering = np.flatnonzero(red < -COST_TOL * scale)
        if entering.size == 0:
            return basis, it
        col = int(entering[0])  # Bland: lowest index enters
        d = np.linalg.solve(B, A[:, col])
        ok = d > PIVOT_TOL * max(1.0, float(np.abs(d).max()))
        if not ok.any():
            raise Unbounded("objective unbounded below")
        xB = np.maximum(xB, 0.0)
        ratios = np.full(len(d), np.inf)
        ratios[ok] = xB[ok] / d[ok]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, best))
        row = int(ties[np.argmin(basis[ties])])  # Bland: lowest index leaves
        basis = basis.copy()
        basis[row] = col
        it += 1
        if it > max_iter:
            raise LPNumericalFailure(f"simplex exceeded {max_iter} pivots")


def solve_standard(c, A, b, max_iter: int = 100_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    flip = np.where(b < 0, -1.0, 1.0)
    A *= flip[:, None]
    b *= flip

    # phase 1: artificial identity columns n..n+m-1, minimize their sum
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    allowed = np.ones(n + m, dtype=bool)
    basis, it = _iterate(A1, b, c1, np.arange(n, n + m), allowed, max_iter)
    _, xB, _ = _basis_solves(A1, basis, b, c1[basis])
    if c1[basis] @ xB > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise Infeasible(f"phase 1 residual {c1[basis] @ xB:.3g}")

    # pivot zero-level artificials out of the basis; drop redundant rows
    rows = np.arange(m)
    for pos in range(m):
        if basis[pos] < n:
            continue
        B = A1[:, basis]
        tableau_row = np.linalg.solve(B.T, np.eye(m)[pos]) @ A1[:, :n]
        cand = [j for j in np.flatnonzero(np.abs(tableau_row) > 1e-7) if j not in basis]
        if cand:
            basis[pos] = cand[0]
    keep = basis < n
    rows = rows[keep]
    basis = basis[keep]
    A2, b2 = A[rows], b[rows]

    # phase 2
    allowed = np.ones(n, dtype=bool)
    basis, it = _iterate(A2, b2, c, basis, allowed, max_iter, it)
    _, xB, y = _basis_solves(A2, basis, b2, c[basis])
    x = np.zeros(n)
    x[basis] = np.maximum(xB, 0.0)
    duals = np.zeros(m)
    duals[rows] = y * flip[rows]
    return LPResult(x, float(c @ x), basis, duals, it)
