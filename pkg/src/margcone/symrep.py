"""The irreducible (2r+1)-dimensional representation V_r of PSL(2,R).

V_r is realized on homogeneous polynomials of degree 2r in (x, y), basis
x^{2r}, x^{2r-1} y, ..., y^{2r}.  A matrix m acts by p(x, y) -> p((x, y) m);
the linear form v1 x + v2 y is then carried to the form of m v, so the
symmetric product of vectors v, w corresponds to the product of their forms.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSolve
from .lie_core import MobiusElement, hyperbolic_frames, hyperbolic_data


def _poly_power(forms: np.ndarray, n: int) -> np.ndarray:
    """Coefficients of (u0 x + u1 y)^n for a stack of forms, shape (N, n+1)."""
    out = np.ones((forms.shape[0], 1))
    for _ in range(n):
        nxt = np.zeros((forms.shape[0], out.shape[1] + 1))
        nxt[:, :-1] += out * forms[:, :1]
        nxt[:, 1:] += out * forms[:, 1:2]
        out = nxt
    return out


def _poly_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n, m = p.shape[1], q.shape[1]
    out = np.zeros((p.shape[0], n + m - 1))
    for j in range(m):
        out[:, j:j + n] += p * q[:, j:j + 1]
    return out


def sym_power_matrix(m, r: int) -> np.ndarray:
    """Matrix of the degree-2r action of a 2x2 matrix (any determinant)."""
    m = np.asarray(m, dtype=float)
    n = 2 * r
    # column i holds the coefficients of (a x + c y)^{n-i} (b x + d y)^i
    col_forms = np.array([[m[0, 0], m[1, 0]]])
    row_forms = np.array([[m[0, 1], m[1, 1]]])
    powers_a = [_poly_power(col_forms, n - i) for i in range(n + 1)]
    powers_b = [_poly_power(row_forms, i) for i in range(n + 1)]
    cols = [_poly_mul(powers_a[i], powers_b[i])[0] for i in range(n + 1)]
    return np.stack(cols, axis=1)


def sym_power(m: MobiusElement, r: int) -> np.ndarray:
    if r < 1:
        raise ValueError("r must be a positive integer")
    return sym_power_matrix(m.matrix, r)


def sl2_derivative(x, r: int) -> np.ndarray:
    """The Lie algebra action: d/dt sym_power(exp(t X)) at t = 0."""
    (a, b), (c, d) = np.asarray(x, dtype=float)
    n = 2 * r
    out = np.zeros((n + 1, n + 1))
    for i in range(n + 1):
        out[i, i] = a * (n - i) + d * i
        if i + 1 <= n:
            out[i + 1, i] = c * (n - i)
        if i >= 1:
            out[i - 1, i] = b * i
    return out


SL2_BASIS = (
    np.array([[1.0, 0.0], [0.0, -1.0]]),
    np.array([[0.0, 1.0], [0.0, 0.0]]),
    np.array([[0.0, 0.0], [1.0, 0.0]]),
)


@functools.lru_cache(maxsize=None)
def _invariant_form(r: int) -> np.ndarray:
    dim = 2 * r + 1
    eye = np.eye(dim)
    rows = []
    # vec(X^T Q + Q X) = (I kron X^T + X^T kron I) vec(Q), row-major vec
    for x in SL2_BASIS:
        dx = sl2_derivative(x, r)
        rows.append(np.kron(dx.T, eye) + np.kron(eye, dx.T))
    # symmetry: Q - Q^T = 0
    perm = np.zeros((dim * dim, dim * dim))
    for i in range(dim):
        for j in range(dim):
            perm[i * dim + j, j * dim + i] = 1.0
    rows.append(np.eye(dim * dim) - perm)
    system = np.vstack(rows)
    _, s, vt = np.linalg.svd(system)
    null = int(np.sum(s <= 1e-10 * s[0])) + (vt.shape[0] - s.shape[0])
    if null != 1:
        raise DegenerateSolve(f"invariance system has nullspace of dimension {null}")
    q = vt[-1].reshape(dim, dim)
    q = 0.5 * (q + q.T)
    # x^r y^r is the neutral vector of diag(e^{1/2}, e^{-1/2}); make it unit
    q = q / q[r, r]
    q[np.abs(q) < 1e-14] = 0.0
    q.setflags(write=False)
    return q


def invariant_form(r: int) -> np.ndarray:
    """Gram matrix Q of the invariant symmetric form B on V_r (monomial basis).

    Solves X^T Q + Q X = 0 over a basis of sl(2) together with Q = Q^T and
    normalizes so that the neutral vector of diag(e^{1/2}, e^{-1/2}) has
    B-norm +1.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    return _invariant_form(r)


def signature(q: np.ndarray) -> tuple:
    ev = np.linalg.eigvalsh(q)
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


@dataclass(frozen=True)
class SymPowerRep:
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be a positive integer")

    @property
    def dim(self) -> int:
        return 2 * self.r + 1

    @property
    def form(self) -> np.ndarray:
        return invariant_form(self.r)

    def matrix(self, m: MobiusElement) -> np.ndarray:
        return sym_power(m, self.r)

    def pair(self, v, w) -> float:
        return float(np.asarray(v) @ self.form @ np.asarray(w))

    @property
    def odd(self) -> bool:
        return self.r % 2 == 1

    def to_json(self, elements=()) -> dict:
        n = 2 * self.r
        return {
            "r": self.r,
            "dim": self.dim,
            "basis": [f"x^{n - i} y^{i}" for i in range(n + 1)],
            "form": self.form.ravel().tolist(),
            "matrices": [self.matrix(m).ravel().tolist() for m in elements],
        }


def neutral_vectors(v_minus: np.ndarray, v_plus: np.ndarray, r: int) -> np.ndarray:
    """Stacked neutral vectors c * v_-^r v_+^r with c > 0 and B-norm 1."""
    q = invariant_form(r)
    p = _poly_mul(_poly_power(np.atleast_2d(v_minus), r), _poly_power(np.atleast_2d(v_plus), r))
    norm2 = np.einsum("ni,ij,nj->n", p, q, p)
    if np.any(norm2 <= 0):
        raise DegenerateSolve("neutral direction is not spacelike")
    return p / np.sqrt(norm2)[:, None]


def neutral_vectors_of(mats, r: int) -> np.ndarray:
    """Neutral vectors for a stack of hyperbolic 2x2 matrices."""
    _, _, vp, vm, _ = hyperbolic_frames(mats)
    return neutral_vectors(vm, vp, r)


def neutral_vector(m: MobiusElement, r: int) -> np.ndarray:
    h = hyperbolic_data(m)
    return neutral_vectors(h.v_minus, h.v_plus, r)[0]


@dataclass(frozen=True)
class Splitting:
    """The B-orthogonal invariant decomposition V = V^- + R x0 + V^+.

    ``minus[j-1]`` is v_-^{r+j} v_+^{r-j} with eigenvalue lam^{-2j};
    ``plus[j-1]`` is v_-^{r-j} v_+^{r+j} with eigenvalue lam^{2j}.
    """

    minus: np.ndarray
    neutral: np.ndarray
    plus: np.ndarray
    lam: float

    @property
    def frame(self) -> np.ndarray:
        """Columns ordered V^- (j = r..1), x0, V^+ (j = 1..r)."""
        return np.column_stack([*self.minus[::-1], self.neutral, *self.plus])

    @property
    def eigenvalues(self) -> np.ndarray:
        r = len(self.plus)
        return self.lam ** (2.0 * np.arange(-r, r + 1))


def invariant_splitting(m: MobiusElement, r: int) -> Splitting:
    h = hyperbolic_data(m)
    vm, vp = h.v_minus[None], h.v_plus[None]
    minus = np.array([_poly_mul(_poly_power(vm, r + j), _poly_power(vp, r - j))[0]
                      for j in range(1, r + 1)])
    plus = np.array([_poly_mul(_poly_power(vm, r - j), _poly_power(vp, r + j))[0]
                     for j in range(1, r + 1)])
    return Splitting(minus, neutral_vectors(h.v_minus, h.v_plus, r)[0], plus, h.lam)

