"""Word-length graded outer approximations of the cone of proper deformations.

At grading L the cone C_L is cut out by <f_w, x> > 0 for every class w of
length <= L, where f_w is the linear functional [u] -> alpha_u(w) / l(w) in
cohomology coordinates.  C_L contains the proper cone, so a positive LP
margin at finite L is consistent with properness but never proves it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceeded, DimMismatch, LPNumericalFailure
from .freegrp import ConjClass, enumerate_classes
from .margulis import Cocycle, alpha_functionals, cohomology_basis, cohomology_coords
from .polygon import area as polygon_area, intersect_halfplanes
from .schottky import SchottkyGroup
from .simplex import Infeasible, Unbounded, solve_standard

DEDUP_TOL = 1e-9
POSITIVE_TOL = 1e-9
MAX_L = 12
MAX_ENTRIES = 10 ** 6


@dataclass(frozen=True, eq=False)
class HalfSpaceSet:
    classes: tuple
    lengths: np.ndarray
    functionals: np.ndarray  # (N, dim H^1)
    L: int
    group: SchottkyGroup
    r: int
    raw_count: int  # classes enumerated before merging equal functionals

    def __len__(self):
        return len(self.classes)

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    def truncate(self, L: int, fold_inverses: bool = False) -> "HalfSpaceSet":
        """Entries of word length <= L: what build_halfspaces returns at L."""
        keep = np.array([len(c) <= L for c in self.classes], dtype=bool)
        raw = len(enumerate_classes(self.group.rank, L, fold_inverses))
        return HalfSpaceSet(tuple(c for c, k in zip(self.classes, keep) if k),
                            self.lengths[keep], self.functionals[keep], L, self.group, self.r, raw)


def estimated_class_count(k: int, L: int) -> int:
    """Lower bound on the number of classes of length <= L (cyclic words / length)."""
    total = 0
    for n in range(1, L + 1):
        cyc = (2 * k - 1) ** n + 1 + (k - 1) * (1 + (-1) ** n)
        total += cyc // n
    return total


def _dedupe(f: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Indices of the first member (in order) of each cluster of equal rows."""
    if len(f) == 0:
        return np.zeros(0, dtype=int)
    tree = cKDTree(f)
    taken = np.zeros(len(f), dtype=bool)
    keep = []
    for i in range(len(f)):
        if taken[i]:
            continue
        keep.append(i)
        for j in tree.query_ball_point(f[i], tol):
            taken[j] = True
    return np.array(keep, dtype=int)


def build_halfspaces(group: SchottkyGroup, r: int, L: int, fold_inverses: bool = False) -> HalfSpaceSet:
    if L < 1 or r < 1:
        raise ValueError("need r >= 1 and L >= 1")
    if estimated_class_count(group.rank, L) > MAX_ENTRIES:
        raise BudgetExceeded(f"more than {MAX_ENTRIES} classes at L = {L}")
    classes = enumerate_classes(group.rank, L, fold_inverses)
    func, ell = alpha_functionals(group, r, classes)
    basis = cohomology_basis(group, r)
    f = (func.reshape(len(classes), -1) @ basis) / ell[:, None]
    if np.any(np.linalg.norm(f, axis=1) <= 0):
        raise DimMismatch("a functional vanished identically")
    keep = _dedupe(f)
    return HalfSpaceSet(tuple(classes[i] for i in keep), ell[keep], f[keep], L, group, r,
                        len(classes))


@dataclass(frozen=True, eq=False)
class ConeReport:
    t_star: float
    witness: np.ndarray
    sign: int
    L: int
    lp_objective: float
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.t_star > POSITIVE_TOL

    @property
    def status(self) -> str:
        if not self.feasible:
            return "MixedOnly"
        return "PositiveFeasible" if self.sign > 0 else "NegativeFeasible"

    def to_json(self) -> dict:
        return {"sign": self.sign, "L": self.L, "t_star": self.t_star,
                "witness": self.witness.tolist(), "status": self.status}


def combined_status(plus: ConeReport, minus: ConeReport) -> str:
    if plus.feasible and minus.feasible:
        return "BothFeasible"
    if plus.feasible:
        return "PositiveFeasible"
    if minus.feasible:
        return "NegativeFeasible"
    return "MixedOnly"


def margin_lp(H: HalfSpaceSet, sign: int = 1) -> ConeReport:
    """maximize t subject to sign <f_i, x> >= t and |x|_inf <= 1.

    With y = x + 1 in [0, 2] and t >= 0 (x = 0 already gives t = 0) the
    problem reads max t s.t. A (y, t) <= b, (y, t) >= 0.  Its dual has one
    row per variable, so the simplex runs on the dual and the primal optimum
    is read off as the dual's simplex multipliers.
    """
    if len(H) == 0:
        raise ValueError("empty half-space set")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    F = sign * H.functionals
    n_rows, m = F.shape
    A = np.zeros((n_rows + m, m + 1))
    A[:n_rows, :m] = -F
    A[:n_rows, m] = 1.0
    A[n_rows:, :m] = np.eye(m)
    b = np.concatenate([-F.sum(axis=1), np.full(m, 2.0)])
    cz = np.zeros(m + 1)
    cz[m] = 1.0
    # dual: min b.pi  s.t.  A^T pi - sigma = cz,  pi, sigma >= 0
    M = np.hstack([A.T, -np.eye(m + 1)])
    cost = np.concatenate([b, np.zeros(m + 1)])
    try:
        res = solve_standard(cost, M, cz)
    except (Infeasible, Unbounded) as exc:
        raise LPNumericalFailure(f"margin LP dual failed: {exc}") from exc
    z = res.duals
    x = np.clip(z[:m] - 1.0, -1.0, 1.0)
    t_star = float(np.min(F @ x))
    if abs(t_star - res.objective) > 1e-7 * max(1.0, abs(res.objective)):
        raise LPNumericalFailure(
            f"primal margin {t_star:.12g} disagrees with dual objective {res.objective:.12g}")
    return ConeReport(t_star, x, sign, H.L, res.objective, res.iterations)


@dataclass(frozen=True)
class Membership:
    """AllPositive / AllNegative with the minimal |<f, x>|, or Mixed with a pair.

    Indeterminate means some value is within tolerance of zero and no
    strictly opposite pair exists (a radiant class, for instance).
    """

    kind: str
    margin: float
    negative: Optional[ConjClass] = None
    positive: Optional[ConjClass] = None


def membership(u: Cocycle, H: HalfSpaceSet, tol: float = 1e-8) -> Membership:
    if u.group != H.group or u.r != H.r:
        raise DimMismatch("cocycle and half-space set belong to different (group, r)")
    vals = H.functionals @ cohomology_coords(u).coords
    if np.all(vals > tol):
        return Membership("AllPositive", float(vals.min()))
    if np.all(vals < -tol):
        return Membership("AllNegative", float(-vals.max()))
    neg = np.flatnonzero(vals < -tol)
    pos = np.flatnonzero(vals > tol)
    if neg.size and pos.size:
        return Membership("Mixed", float(np.abs(vals).min()),
                          H.classes[int(neg[0])], H.classes[int(pos[0])])
    return Membership("Indeterminate", float(np.abs(vals).min()))


def _plane_frame(f0: np.ndarray) -> tuple:
    """Point p0 with <f0, p0> = 1 and an orthonormal basis (e1, e2) of f0's complement.

    (e1, e2, f0) is positively oriented, so CCW in the plane is well defined.
    """
    p0 = f0 / float(f0 @ f0)
    _, _, vt = np.linalg.svd(f0[None, :])
    e1, e2 = vt[1], vt[2]
    first = e1[np.flatnonzero(np.abs(e1) > 1e-12)[0]]
    e1 = e1 * np.sign(first)
    e2 = np.cross(f0, e1)
    e2 = e2 / np.linalg.norm(e2)
    return p0, e1, e2


@dataclass(frozen=True, eq=False)
class CrossSection:
    L: int
    plane_index: int
    vertices: np.ndarray
    area: float

    def to_json(self) -> dict:
        return {"L": self.L, "plane_index": self.plane_index,
                "vertices": self.vertices.tolist(), "area": self.area}


def cross_section(H: HalfSpaceSet, normalizing_index: int = 0) -> CrossSection:
    """Slice of C_L by the plane <f_0, x> = 1, in in-plane orthonormal coordinates."""
    if H.dim != 3:
        raise DimMismatch(f"cross sections need 3 cohomology coordinates, not {H.dim}")
    if not 0 <= normalizing_index < len(H):
        raise IndexError("normalizing index out of range")
    f0 = H.functionals[normalizing_index]
    p0, e1, e2 = _plane_frame(f0)
    others = np.delete(H.functionals, normalizing_index, axis=0)
    normals = np.column_stack([others @ e1, others @ e2])
    offsets = -(others @ p0)
    poly = intersect_halfplanes(normals, offsets)
    return CrossSection(H.L, normalizing_index, poly, polygon_area(poly))


def section_point(H: HalfSpaceSet, normalizing_index: int, xy) -> np.ndarray:
    """Lift in-plane coordinates back to cohomology coordinates."""
    p0, e1, e2 = _plane_frame(H.functionals[normalizing_index])
    return p0 + xy[0] * e1 + xy[1] * e2


@dataclass(frozen=True)
class ReportRow:
    L: int
    count: int
    t_plus: float
    t_minus: float
    area: Optional[float]


def convergence_report(group: SchottkyGroup, r: int, L_max: int,
                       fold_inverses: bool = False) -> list:
    if L_max > MAX_L:
        raise ValueError(f"L_max must be at most {MAX_L}")
    full = build_halfspaces(group, r, L_max, fold_inverses)
    rows = []
    for L in range(1, L_max + 1):
        H = full.truncate(L, fold_inverses)
        plus, minus = margin_lp(H, 1), margin_lp(H, -1)
        area = cross_section(H).area if H.dim == 3 else None
        rows.append(ReportRow(L, H.raw_count, plus.t_star, minus.t_star, area))
    return rows

