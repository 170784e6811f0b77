"""Finite geodesic currents, the diffused invariant psi, and sign certificates.

A finite current is a convex combination of the periodic currents of closed
geodesics, one atom per conjugacy class.  On an atom [w] the diffused
invariant is alpha(w) / l(w).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SameSign
from .freegrp import ConjClass, as_word, conj_class, enumerate_classes
from .margulis import Cocycle, alpha, alphas, evaluate_cocycle, ZERO_TOL
from .schottky import element, letter_contraction, min_arc_gap
from .symrep import invariant_form, invariant_splitting


@dataclass(frozen=True)
class FiniteCurrent:
    atoms: tuple  # ((ConjClass, weight), ...)

    def __post_init__(self):
        atoms = tuple((c if isinstance(c, ConjClass) else conj_class(c), float(wt))
                      for c, wt in self.atoms)
        if not atoms:
            raise ValueError("a current needs at least one atom")
        if any(wt < 0 for _, wt in atoms):
            raise ValueError("atom weights must be nonnegative")
        if abs(sum(wt for _, wt in atoms) - 1.0) > 1e-12:
            raise ValueError("atom weights must sum to 1")
        keys = [c for c, _ in atoms]
        if len(set(keys)) != len(keys):
            raise ValueError("atoms must be distinct conjugacy classes")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def single(cls, w) -> "FiniteCurrent":
        return cls(((conj_class(w), 1.0),))

    @classmethod
    def from_json(cls, data: dict) -> "FiniteCurrent":
        return cls(tuple((a["word"], a["weight"]) for a in data["atoms"]))

    def to_json(self) -> dict:
        return {"atoms": [{"word": str(c), "weight": wt} for c, wt in self.atoms]}

    def mix(self, other: "FiniteCurrent", t: float) -> "FiniteCurrent":
        """t * self + (1 - t) * other, merging shared atoms."""
        acc: dict = {}
        for c, wt in self.atoms:
            acc[c] = acc.get(c, 0.0) + t * wt
        for c, wt in other.atoms:
            acc[c] = acc.get(c, 0.0) + (1 - t) * wt
        return FiniteCurrent(tuple(acc.items()))


def psi(u: Cocycle, mu: FiniteCurrent) -> float:
    a, ell = alphas(u, [c for c, _ in mu.atoms])
    weights = np.array([wt for _, wt in mu.atoms])
    return float(np.sum(weights * a / ell))


def smoothstep(t):
    return 3 * t ** 2 - 2 * t ** 3


def smoothstep_derivative(t):
    return 6 * t - 6 * t ** 2


@dataclass(frozen=True, eq=False)
class OrbitSegment:
    """A lifted periodic orbit of length T with a smooth section along it.

    Values are held in the invariant eigenframe of the word (columns V^-,
    x0, V^+), where the holonomy rho(w) is diagonal; ``to_standard`` maps them
    back.  ``start`` and ``end`` are the section at t = 0 and t = T.
    """

    word: object
    period: float
    frame: np.ndarray
    holonomy: np.ndarray  # eigenvalues of rho(w) in frame order
    start: np.ndarray
    end: np.ndarray
    n_steps: int

    def value(self, t):
        s = smoothstep(np.asarray(t) / self.period)
        return (1 - s)[..., None] * self.start + s[..., None] * self.end

    def velocity(self, t):
        ds = smoothstep_derivative(np.asarray(t) / self.period) / self.period
        return ds[..., None] * (self.end - self.start)

    def to_standard(self, c):
        return np.asarray(c) @ self.frame.T

    def holonomy_defect(self, translation: np.ndarray) -> float:
        """Relative residual of end = rho(w) start + u(w), in frame coordinates."""
        target = self.holonomy * self.start + translation
        return float(np.linalg.norm(self.end - target) / max(1.0, np.linalg.norm(target)))


def orbit_segment(u: Cocycle, w, base, n_steps: int) -> tuple:
    """(segment, u(w) in frame coordinates) for base value ``base`` in frame coordinates."""
    w = as_word(w)
    g = element(u.group, w)
    sp = invariant_splitting(g, u.r)
    frame = sp.frame
    cu = np.linalg.solve(frame, evaluate_cocycle(u, w))
    # the neutral coordinate of u(w) is alpha; use the cancellation-free value
    cu[u.r] = alpha(u, w)
    eig = sp.eigenvalues
    base = np.asarray(base, dtype=float)
    end = eig * base + cu
    seg = OrbitSegment(w, 2 * math.acosh(abs(g.trace) / 2), frame, eig, base, end, n_steps)
    return seg, cu


def quadrature_check(u: Cocycle, w, n_steps: int = 10_000, base=None, rng=None) -> tuple:
    """Midpoint-rule integral of F(t) = B(dv/dt, x0(w)) over one period.

    Returns (numeric, exact alpha, |numeric - exact|).  x0(w) is B-unit and
    B-orthogonal to V^+ and V^-, so the pairing reads off the neutral
    coordinate of the velocity.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if base is None:
        rng = np.random.default_rng(0) if rng is None else rng
        base = rng.standard_normal(2 * u.r + 1)
    seg, cu = orbit_segment(u, w, base, n_steps)
    h = seg.period / n_steps
    mids = (np.arange(n_steps) + 0.5) * h
    f = seg.velocity(mids)[:, u.r]
    numeric = float(np.sum(f) * h)
    exact = alpha(u, w)
    return numeric, exact, abs(numeric - exact)


@dataclass(frozen=True)
class SignCertificate:
    """Classes with alpha < 0 and alpha > 0: the deformation is not proper."""

    negative: ConjClass
    positive: ConjClass
    alpha_negative: float
    alpha_positive: float

    def to_json(self) -> dict:
        return {"negative": str(self.negative), "positive": str(self.positive),
                "alpha_negative": self.alpha_negative, "alpha_positive": self.alpha_positive}


def opposite_sign_certificate(u: Cocycle, L: int, tol: float = ZERO_TOL) -> Optional[SignCertificate]:
    """First classes (in enumeration order) with alpha < -tol and alpha > tol."""
    classes = enumerate_classes(u.group.rank, L)
    a, _ = alphas(u, classes)
    neg = np.flatnonzero(a < -tol)
    pos = np.flatnonzero(a > tol)
    if neg.size == 0 or pos.size == 0:
        return None
    i, j = int(neg[0]), int(pos[0])
    return SignCertificate(classes[i], classes[j], float(a[i]), float(a[j]))


def zero_current(u: Cocycle, class1, class2) -> FiniteCurrent:
    """The convex combination of two periodic currents on which psi vanishes."""
    c1, c2 = conj_class(as_word(class1) if not isinstance(class1, ConjClass) else class1.rep), \
        conj_class(as_word(class2) if not isinstance(class2, ConjClass) else class2.rep)
    p1 = psi(u, FiniteCurrent.single(c1.rep))
    p2 = psi(u, FiniteCurrent.single(c2.rep))
    if not (p1 * p2 < 0):
        raise SameSign(f"psi values {p1:.3g} and {p2:.3g} do not have strictly opposite signs")
    t = p2 / (p2 - p1)
    return FiniteCurrent(((c1, t), (c2, 1.0 - t)))


def growth_constant(u: Cocycle) -> float:
    """C with |alpha_u(w)| <= C l(w) for every class, from the ping-pong data.

    Each of the n rotation terms is at most |Q| max|u_i| |x0|, and
    |x0| <= 2^r / sin(gap)^r since the fixed points of a rotation lie in
    distinct arcs.  The attracting fixed point has derivative exp(-l), a
    product of n letter derivatives each at most kappa < 1, so
    l >= n min(-log kappa).
    """
    G = u.group
    kappas = [letter_contraction(G, s) for i in range(G.rank) for s in (i + 1, -(i + 1))]
    if max(kappas) >= 1:
        raise ValueError("letters are not uniformly contracting off their arcs")
    c_min = min(-math.log(k) for k in kappas)
    gap = min_arc_gap(G)
    x_max = (2.0 / math.sin(min(gap, math.pi / 2))) ** u.r
    q_norm = float(np.linalg.norm(invariant_form(u.r), 2))
    u_max = float(np.max(np.linalg.norm(u.values, axis=1)))
    return q_norm * u_max * x_max / c_min
