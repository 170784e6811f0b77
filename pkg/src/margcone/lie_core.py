"""SL(2,R) / PSL(2,R) elements: classification, eigendata, translation length.

Elements act on column vectors of R^2; the induced action on lines is the
action on the projective circle RP^1, parametrized by angle in [0, pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NotHyperbolic

TAU_PAR = 1e-9
DET_TOL = 1e-9


class Kind(str, Enum):
    HYPERBOLIC = "Hyperbolic"
    PARABOLIC = "Parabolic"
    ELLIPTIC = "Elliptic"


def _canonical_sign(entries):
    for x in entries:
        if x != 0.0:
            return 1.0 if x > 0 else -1.0
    return 1.0


@dataclass(frozen=True)
class MobiusElement:
    """An SL(2,R) representative (a, b; c, d) of a PSL(2,R) element.

    The sign is fixed on construction so that the first nonzero entry in the
    order a, b, c, d is positive; two representatives of the same PSL element
    therefore compare equal.
    """

    entries: tuple

    def __post_init__(self):
        e = tuple(float(x) for x in self.entries)
        if len(e) != 4 or not all(math.isfinite(x) for x in e):
            raise ValueError(f"expected four finite numbers, got {self.entries!r}")
        det = e[0] * e[3] - e[1] * e[2]
        # long products lose about eps * |m|^2 of the determinant to cancellation
        scale = max(abs(x) for x in e) ** 2
        if abs(det - 1.0) > DET_TOL + 1e-13 * scale:
            raise ValueError(f"determinant {det!r} is not 1")
        s = _canonical_sign(e)
        object.__setattr__(self, "entries", tuple(s * x for x in e))

    @classmethod
    def from_matrix(cls, m) -> "MobiusElement":
        m = np.asarray(m, dtype=float)
        return cls((m[0, 0], m[0, 1], m[1, 0], m[1, 1]))

    @classmethod
    def normalized(cls, m) -> "MobiusElement":
        """Rescale a matrix of positive determinant into SL(2,R)."""
        m = np.asarray(m, dtype=float)
        det = np.linalg.det(m)
        if det <= 0:
            raise ValueError("matrix must have positive determinant")
        return cls.from_matrix(m / math.sqrt(det))

    @classmethod
    def identity(cls) -> "MobiusElement":
        return cls((1.0, 0.0, 0.0, 1.0))

    @classmethod
    def diagonal(cls, length: float) -> "MobiusElement":
        """diag(e^{l/2}, e^{-l/2}): translation length l along the standard axis."""
        return cls((math.exp(length / 2), 0.0, 0.0, math.exp(-length / 2)))

    @classmethod
    def rotation(cls, theta: float) -> "MobiusElement":
        c, s = math.cos(theta), math.sin(theta)
        return cls((c, -s, s, c))

    @property
    def matrix(self) -> np.ndarray:
        a, b, c, d = self.entries
        return np.array([[a, b], [c, d]])

    @property
    def trace(self) -> float:
        return self.entries[0] + self.entries[3]

    def inverse(self) -> "MobiusElement":
        a, b, c, d = self.entries
        return MobiusElement((d, -b, -c, a))

    def __matmul__(self, other: "MobiusElement") -> "MobiusElement":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return MobiusElement((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h))

    def __pow__(self, n: int) -> "MobiusElement":
        base = self if n >= 0 else self.inverse()
        out = MobiusElement.identity()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def conjugate(self, w: "MobiusElement") -> "MobiusElement":
        """w self w^{-1}."""
        return w @ self @ w.inverse()

    def act_on_angle(self, theta):
        """Image of the line at angle theta, as an angle in [0, pi)."""
        a, b, c, d = self.entries
        ct, st = np.cos(theta), np.sin(theta)
        return np.mod(np.arctan2(c * ct + d * st, a * ct + b * st), np.pi)

    def angle_derivative(self, theta):
        """Derivative of the circle action at theta (det 1 makes it 1/|m v|^2)."""
        a, b, c, d = self.entries
        ct, st = np.cos(theta), np.sin(theta)
        return 1.0 / ((a * ct + b * st) ** 2 + (c * ct + d * st) ** 2)

    def to_list(self) -> list:
        return list(self.entries)

    def __repr__(self):
        return "MobiusElement(({:.6g}, {:.6g}, {:.6g}, {:.6g}))".format(*self.entries)


@dataclass(frozen=True)
class HyperbolicData:
    """Eigendata of a hyperbolic element.

    ``lam`` is the modulus of the contracting eigenvalue; ``sign`` is the sign
    of the SL representative's trace, so m v_plus = sign * lam * v_plus and
    m v_minus = sign * v_minus / lam.
    """

    lam: float
    sign: float
    v_plus: np.ndarray
    v_minus: np.ndarray
    length: float


def classify(m: MobiusElement, tau: float = TAU_PAR) -> Kind:
    t = abs(m.trace)
    if t > 2.0 + tau:
        return Kind.HYPERBOLIC
    if t < 2.0 - tau:
        return Kind.ELLIPTIC
    return Kind.PARABOLIC


def _canonical_unit(v: np.ndarray) -> np.ndarray:
    """Unit rows with the first nonzero component made positive."""
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    first = np.where(v[..., 0] != 0.0, v[..., 0], v[..., 1])
    return v * np.where(first < 0, -1.0, 1.0)[..., None]


def _eigvec(mats: np.ndarray, mu: np.ndarray) -> np.ndarray:
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    cand1 = np.stack([b, mu - a], axis=-1)
    cand2 = np.stack([mu - d, c], axis=-1)
    pick = (np.abs(cand1).sum(axis=-1) >= np.abs(cand2).sum(axis=-1))[:, None]
    return np.where(pick, cand1, cand2)


def hyperbolic_frames(mats) -> tuple:
    """Vectorized eigendata for a stack of SL(2,R) matrices of shape (N, 2, 2).

    Returns ``(lam, sign, v_plus, v_minus, length)`` arrays with the
    canonical normalization used throughout: unit eigenvectors, first nonzero
    component positive, then v_minus flipped if needed so that
    det[v_minus | v_plus] > 0.
    """
    mats = np.asarray(mats, dtype=float).reshape(-1, 2, 2)
    tr = mats[:, 0, 0] + mats[:, 1, 1]
    at = np.abs(tr)
    bad = np.flatnonzero(~(at > 2.0 + TAU_PAR))
    if bad.size:
        raise NotHyperbolic(f"|trace| = {at[bad[0]]!r} is not > 2 + {TAU_PAR}")
    sign = np.where(tr > 0, 1.0, -1.0)
    big = 0.5 * (at + np.sqrt((at - 2.0) * (at + 2.0)))
    lam = 1.0 / big
    v_plus = _canonical_unit(_eigvec(mats, sign * lam))
    v_minus = _canonical_unit(_eigvec(mats, sign * big))
    det = v_minus[:, 0] * v_plus[:, 1] - v_minus[:, 1] * v_plus[:, 0]
    v_minus = v_minus * np.where(det < 0, -1.0, 1.0)[:, None]
    length = 2.0 * np.log(big)
    return lam, sign, v_plus, v_minus, length


def hyperbolic_data(m: MobiusElement) -> HyperbolicData:
    if classify(m) is not Kind.HYPERBOLIC:
        raise NotHyperbolic(f"{m!r} is {classify(m).value.lower()}")
    lam, sign, vp, vm, length = hyperbolic_frames(m.matrix[None])
    ell = float(length[0])
    # redundant with the eigensolve; catches a broken eigenvalue computation
    check = 2.0 * math.acosh(abs(m.trace) / 2.0)
    if abs(ell - check) > 1e-9 * max(1.0, ell):
        raise NotHyperbolic(f"length mismatch {ell!r} vs {check!r}")
    return HyperbolicData(float(lam[0]), float(sign[0]), vp[0], vm[0], ell)


def translation_length(m: MobiusElement) -> float:
    if classify(m) is not Kind.HYPERBOLIC:
        raise NotHyperbolic(f"{m!r} is {classify(m).value.lower()}")
    return 2.0 * math.acosh(abs(m.trace) / 2.0)


def line_angle(v) -> float:
    return float(np.mod(math.atan2(v[1], v[0]), math.pi))


def fixed_points_on_circle(m: MobiusElement) -> tuple:
    """(attracting, repelling) fixed points of the circle action, as angles.

    The attracting point is the line of v_minus (dominant eigenvalue).
    """
    h = hyperbolic_data(m)
    return line_angle(h.v_minus), line_angle(h.v_plus)
