"""Cocycles, coboundaries, cohomology coordinates and the Margulis invariant.

The invariant of a cyclically reduced word s_1 ... s_n is evaluated without
forming u(gamma) or rho(gamma), whose entries grow like exp(l(gamma)).
Writing u(gamma) as a sum of rho(prefix) u(s_j) and moving rho(prefix) onto
the neutral vector turns each term into a pairing of u(s_j) with the neutral
vector of a cyclic rotation of the word:

    s_j = g_i        ->   + B(u_i, x0(s_j ... s_n s_1 ... s_{j-1}))
    s_j = g_i^{-1}   ->   - B(u_i, x0(s_{j+1} ... s_n s_1 ... s_j))

Every rotation is conjugate to gamma, and its eigenvectors are well
conditioned even when its entries are huge.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import BadIndex, DimMismatch, EmptyWord, RankDeficient, ZeroScale
from .freegrp import ConjClass, as_word, cyclic_reduce
from .lie_core import hyperbolic_frames
from .schottky import SchottkyGroup, element
from .symrep import invariant_form, invariant_splitting, neutral_vectors, sym_power

ZERO_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Cocycle:
    """u(g_i) for each free generator; extends uniquely to the free group."""

    values: np.ndarray
    group: SchottkyGroup
    r: int

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        d = 2 * self.r + 1
        if v.ndim != 2 or v.shape != (self.group.rank, d):
            raise DimMismatch(
                f"cocycle needs {self.group.rank} vectors of length {d}, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return 2 * self.r + 1

    def stacked(self) -> np.ndarray:
        return self.values.ravel()

    def __add__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.values + other.values, self.group, self.r)

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        return Cocycle(self.values - other.values, self.group, self.r)

    def __rmul__(self, s: float) -> "Cocycle":
        return Cocycle(s * self.values, self.group, self.r)

    def to_json(self) -> dict:
        return {"u": self.values.tolist()}


def zero_cocycle(group: SchottkyGroup, r: int) -> Cocycle:
    return Cocycle(np.zeros((group.rank, 2 * r + 1)), group, r)


def random_cocycle(group: SchottkyGroup, r: int, rng) -> Cocycle:
    return Cocycle(rng.standard_normal((group.rank, 2 * r + 1)), group, r)


def _rho_letter(group: SchottkyGroup, r: int, x: int) -> np.ndarray:
    g = group.generators[abs(x) - 1]
    return sym_power(g if x > 0 else g.inverse(), r)


def evaluate_cocycle(u: Cocycle, w) -> np.ndarray:
    """u(w) by the recursion u(ab) = u(a) + rho(a) u(b), u(g^-1) = -rho(g^-1) u(g)."""
    w = as_word(w)
    if w.rank_needed > u.group.rank:
        raise BadIndex(f"word {w} uses a generator beyond rank {u.group.rank}")
    out = np.zeros(u.dim)
    prefix = np.eye(u.dim)
    for x in w.letters:
        rho = _rho_letter(u.group, u.r, x)
        i = abs(x) - 1
        step = u.values[i] if x > 0 else -(rho @ u.values[i])
        out = out + prefix @ step
        prefix = prefix @ rho
    return out


def coboundary(group: SchottkyGroup, r: int, v0) -> Cocycle:
    v0 = np.asarray(v0, dtype=float)
    if v0.shape != (2 * r + 1,):
        raise DimMismatch(f"expected a vector of length {2 * r + 1}")
    return Cocycle(np.array([v0 - sym_power(g, r) @ v0 for g in group.generators]), group, r)


def coboundary_matrix(group: SchottkyGroup, r: int) -> np.ndarray:
    """The map v0 -> (v0 - rho(g_i) v0)_i as a (k d) x d matrix."""
    d = 2 * r + 1
    return np.vstack([np.eye(d) - sym_power(g, r) for g in group.generators])


@functools.lru_cache(maxsize=64)
def cohomology_basis(group: SchottkyGroup, r: int) -> np.ndarray:
    """Orthonormal basis (columns) of the complement of the coboundary image.

    Built by Gram-Schmidt on the standard basis vectors after projecting
    away the coboundary image, so it depends only on the generator order.
    """
    d = 2 * r + 1
    D = coboundary_matrix(group, r)
    scale = np.abs(D).max()
    uu, s, _ = np.linalg.svd(D / scale, full_matrices=False)
    rank = int(np.sum(s > 1e-9))
    if rank < d:
        raise RankDeficient(f"coboundary map has rank {rank} < {d}: an invariant vector exists")
    img = uu[:, :rank]
    n = D.shape[0]
    basis: list = []
    for e in np.eye(n):
        v = e - img @ (img.T @ e)
        for _ in range(2):
            for b in basis:
                v = v - (b @ v) * b
            v = v - img @ (img.T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            basis.append(v / nv)
        if len(basis) == n - rank:
            break
    out = np.column_stack(basis)
    out.setflags(write=False)
    return out


def coboundary_singular_values(group: SchottkyGroup, r: int) -> np.ndarray:
    return np.linalg.svd(coboundary_matrix(group, r), compute_uv=False)


@dataclass(frozen=True, eq=False)
class CohomClass:
    rep_cocycle: Cocycle
    coords: np.ndarray


def cohomology_coords(u: Cocycle) -> CohomClass:
    basis = cohomology_basis(u.group, u.r)
    coords = basis.T @ u.stacked()
    rep = Cocycle((basis @ coords).reshape(u.values.shape), u.group, u.r)
    return CohomClass(rep, coords)


def cocycle_from_coords(group: SchottkyGroup, r: int, coords) -> Cocycle:
    basis = cohomology_basis(group, r)
    coords = np.asarray(coords, dtype=float)
    if coords.shape != (basis.shape[1],):
        raise DimMismatch(f"expected {basis.shape[1]} cohomology coordinates")
    return Cocycle((basis @ coords).reshape(group.rank, 2 * r + 1), group, r)


def _letter_arrays(words) -> np.ndarray:
    return np.array([w.letters for w in words], dtype=int)


def _generator_stack(group: SchottkyGroup) -> np.ndarray:
    """Index 2i holds g_{i+1}, index 2i+1 its inverse."""
    mats = []
    for g in group.generators:
        mats += [g.matrix, g.inverse().matrix]
    return np.array(mats)


def _rotation_frames(group: SchottkyGroup, letters: np.ndarray):
    """Eigendata of every cyclic rotation of each row of ``letters``.

    Returns arrays indexed [word, j] for the rotation starting at position j.
    """
    n_words, n = letters.shape
    idx = 2 * (np.abs(letters) - 1) + (letters < 0)
    mats = _generator_stack(group)[idx]  # (N, n, 2, 2)
    # prefix[:, j] = s_1 ... s_j ; suffix[:, j] = s_{j+1} ... s_n (0-based j)
    prefix = np.empty((n_words, n + 1, 2, 2))
    suffix = np.empty((n_words, n + 1, 2, 2))
    prefix[:, 0] = np.eye(2)
    suffix[:, n] = np.eye(2)
    for j in range(n):
        prefix[:, j + 1] = prefix[:, j] @ mats[:, j]
        suffix[:, n - 1 - j] = mats[:, n - 1 - j] @ suffix[:, n - j]
    rot = suffix[:, :n] @ prefix[:, :n]
    lam, sign, vp, vm, length = hyperbolic_frames(rot.reshape(-1, 2, 2))
    return (vp.reshape(n_words, n, 2), vm.reshape(n_words, n, 2),
            length.reshape(n_words, n))


def _functionals_same_length(group: SchottkyGroup, r: int, words) -> tuple:
    letters = _letter_arrays(words)
    n_words, n = letters.shape
    k, d = group.rank, 2 * r + 1
    vp, vm, length = _rotation_frames(group, letters)
    x0 = neutral_vectors(vm.reshape(-1, 2), vp.reshape(-1, 2), r).reshape(n_words, n, d)
    qx0 = x0 @ invariant_form(r)
    # negative letter at j pairs with the rotation starting at j+1
    pos = letters > 0
    which = np.where(pos, np.arange(n), (np.arange(n) + 1) % n)
    terms = np.take_along_axis(qx0, which[:, :, None], axis=1)
    terms = terms * np.where(pos, 1.0, -1.0)[:, :, None]
    func = np.zeros((n_words, k, d))
    gen = np.abs(letters) - 1
    for j in range(n):
        np.add.at(func, (np.arange(n_words), gen[:, j]), terms[:, j])
    return func, length[:, 0]


def _prepare(group: SchottkyGroup, words) -> list:
    out = []
    for w in words:
        w = w.rep if isinstance(w, ConjClass) else as_word(w)
        if not w.letters:
            raise EmptyWord("the identity has no Margulis invariant")
        if w.rank_needed > group.rank:
            raise BadIndex(f"word {w} uses a generator beyond rank {group.rank}")
        out.append(cyclic_reduce(w))
    return out


def alpha_functionals(group: SchottkyGroup, r: int, words) -> tuple:
    """Functionals c(w) of shape (N, k, 2r+1) and lengths l(w) of shape (N,).

    alpha_u(w) = sum_i <c_i(w), u(g_i)> for every cocycle u.
    """
    ws = _prepare(group, words)
    k, d = group.rank, 2 * r + 1
    func = np.zeros((len(ws), k, d))
    ell = np.zeros(len(ws))
    by_len: dict = {}
    for pos, w in enumerate(ws):
        by_len.setdefault(len(w), []).append(pos)
    for n, positions in by_len.items():
        f, l_ = _functionals_same_length(group, r, [ws[p] for p in positions])
        func[positions] = f
        ell[positions] = l_
    return func, ell


def alpha_functional(group: SchottkyGroup, r: int, w) -> np.ndarray:
    return alpha_functionals(group, r, [w])[0][0]


def alphas(u: Cocycle, words) -> tuple:
    """(alpha, l) arrays for many words at once."""
    func, ell = alpha_functionals(u.group, u.r, words)
    return np.einsum("nkd,kd->n", func, u.values), ell


def alpha(u: Cocycle, w) -> float:
    return float(alphas(u, [w])[0][0])


def alpha_direct(u: Cocycle, w) -> float:
    """B(u(w), x0(w)) straight from the definition; accurate for short words only."""
    from .symrep import neutral_vector

    w = as_word(w)
    if not w.letters:
        raise EmptyWord("the identity has no Margulis invariant")
    return float(evaluate_cocycle(u, w) @ invariant_form(u.r) @ neutral_vector(element(u.group, w), u.r))


def fixed_point(u: Cocycle, w, tol: float = ZERO_TOL):
    """A point p with rho(w) p + u(w) = p, or None when alpha_u(w) is not zero.

    Solved in the invariant eigenframe of w with the neutral coordinate set
    to zero, where I - rho(w) is invertible.
    """
    w = as_word(w)
    a = alpha(u, w)
    if abs(a) > tol:
        return None
    sp = invariant_splitting(element(u.group, w), u.r)
    frame = sp.frame
    c = np.linalg.solve(frame, evaluate_cocycle(u, w))
    eig = sp.eigenvalues
    mid = u.r
    x = np.zeros_like(c)
    keep = np.arange(len(c)) != mid
    x[keep] = c[keep] / (1.0 - eig[keep])
    return frame @ x


def homothety_scale(u: Cocycle, lam: float) -> Cocycle:
    if lam == 0:
        raise ZeroScale("homothety by 0 collapses the deformation")
    return Cocycle(lam * u.values, u.group, u.r)
