"""Schottky groups in PSL(2,R): ping-pong certificates, words, presets.

Arcs live on the projective circle RP^1, parametrized by angle mod pi. An
arc is stored as (start, end) and runs counterclockwise from start to end.
For generator g_i, I_i^+ surrounds its attracting fixed point and I_i^- its
repelling one; the certificate asserts that g_i maps the complement of I_i^-
into I_i^+ and g_i^{-1} maps the complement of I_i^+ into I_i^-.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadIndex, NoPingPongCertificate, NotHyperbolicGenerator
from .freegrp import Word, as_word, enumerate_classes
from .lie_core import Kind, MobiusElement, classify, fixed_points_on_circle

PI = math.pi
MIN_MARGIN = 1e-6


def _mod(x):
    return np.mod(x, PI)


@dataclass(frozen=True)
class Arc:
    start: float
    length: float

    @property
    def end(self) -> float:
        return float(_mod(self.start + self.length))

    @property
    def center(self) -> float:
        return float(_mod(self.start + self.length / 2))

    def offset(self, theta):
        return _mod(np.asarray(theta) - self.start)

    def contains(self, theta, margin: float = 0.0):
        off = self.offset(theta)
        return (off >= margin) & (off <= self.length - margin)

    def complement(self) -> "Arc":
        return Arc(self.end, PI - self.length)

    def as_pair(self) -> list:
        return [float(_mod(self.start)), self.end]


def centered_arc(center: float, radius: float) -> Arc:
    return Arc(float(_mod(center - radius)), 2 * radius)


def image_margin(g: MobiusElement, source: Arc, target: Arc) -> float:
    """Signed margin of g(source) inside target (negative when it sticks out).

    g preserves the orientation of RP^1, so g(source) is the arc from
    g(source.start) to g(source.end).
    """
    a = float(g.act_on_angle(source.start))
    b = float(g.act_on_angle(source.end))
    off_a = float(target.offset(a))
    span = float(_mod(b - a))
    if off_a > target.length:
        # starts outside; measure how far, symmetric about the arc
        return -min(off_a - target.length, PI - off_a)
    return min(off_a, target.length - (off_a + span))


def arc_gap(p: Arc, q: Arc) -> float:
    """Smallest circular distance between two arcs (negative if they overlap)."""
    d1 = float(_mod(q.start - p.end))
    d2 = float(_mod(p.start - q.end))
    if p.contains(q.start) or q.contains(p.start):
        return -min(p.length, q.length)
    return min(d1, d2)


@dataclass(frozen=True)
class SchottkyGroup:
    generators: tuple
    intervals: tuple  # (I_1^-, I_1^+, I_2^-, I_2^+, ...)
    margin: float
    name: str = "custom"
    params: tuple = field(default=(), compare=False)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def arc_for(self, letter: int) -> Arc:
        """The arc a letter maps into: I^+ for g_i, I^- for g_i^{-1}."""
        i = abs(letter) - 1
        return self.intervals[2 * i + (1 if letter > 0 else 0)]

    def element(self, w) -> MobiusElement:
        return element(self, w)

    def to_json(self) -> dict:
        out = {"generators": [g.to_list() for g in self.generators]}
        if self.name != "custom":
            out["preset"] = self.name
            out["params"] = dict(self.params)
        return out


def _pingpong_margin(g: MobiusElement, minus: Arc, plus: Arc) -> float:
    return min(image_margin(g, minus.complement(), plus),
               image_margin(g.inverse(), plus.complement(), minus))


def _arcs_for(fixed, radii) -> list:
    arcs = []
    for (att, rep), rho in zip(fixed, radii):
        arcs += [centered_arc(rep, rho), centered_arc(att, rho)]
    return arcs


def _min_gap(arcs) -> float:
    gaps = [arc_gap(arcs[i], arcs[j]) for i in range(len(arcs)) for j in range(i + 1, len(arcs))]
    return min(gaps)


def from_generators(ms, name: str = "custom", params: tuple = ()) -> SchottkyGroup:
    """Search for a ping-pong certificate with arcs centered at fixed points.

    For each generator the smallest common radius with ping-pong margin
    MIN_MARGIN is found by bisection; then all radii are grown by a common
    amount until the ping-pong margin balances the gap between arcs.
    """
    ms = tuple(m if isinstance(m, MobiusElement) else MobiusElement(tuple(m)) for m in ms)
    if len(ms) < 2:
        raise ValueError("a Schottky group needs at least two generators")
    for i, m in enumerate(ms):
        if classify(m) is not Kind.HYPERBOLIC:
            raise NotHyperbolicGenerator(i)
    fixed = [fixed_points_on_circle(m) for m in ms]

    def pp(i, rho):
        att, rep = fixed[i]
        return _pingpong_margin(ms[i], centered_arc(rep, rho), centered_arc(att, rho))

    rho_max = PI / 2 - 1e-9
    rho_min = []
    for i in range(len(ms)):
        if pp(i, rho_max / 2) < MIN_MARGIN and pp(i, rho_max * 0.99) < MIN_MARGIN:
            raise NoPingPongCertificate(
                f"g{i + 1} does not map the complement of I{i + 1}- into I{i + 1}+ "
                f"for any arc radius (margin {pp(i, rho_max / 2):.3g}); "
                "the group may still be Schottky")
        lo, hi = 0.0, rho_max / 2 if pp(i, rho_max / 2) >= MIN_MARGIN else rho_max * 0.99
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if pp(i, mid) >= MIN_MARGIN:
                hi = mid
            else:
                lo = mid
        rho_min.append(hi)

    def balance(s):
        radii = [r + s for r in rho_min]
        ppm = min(pp(i, radii[i]) for i in range(len(ms)))
        return ppm, _min_gap(_arcs_for(fixed, radii))

    ppm, gap = balance(0.0)
    if gap < MIN_MARGIN:
        arcs = _arcs_for(fixed, rho_min)
        labels = [f"I{i // 2 + 1}{'-+'[i % 2]}" for i in range(len(arcs))]
        worst = min(((arc_gap(arcs[i], arcs[j]), labels[i], labels[j])
                     for i in range(len(arcs)) for j in range(i + 1, len(arcs))))
        raise NoPingPongCertificate(
            f"arcs {worst[1]} and {worst[2]} overlap (gap {worst[0]:.3g}) at the smallest "
            "radii satisfying the ping-pong inclusions; try longer generators. "
            "The search is sound but not complete: the group may still be Schottky")
    lo, hi = 0.0, PI
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        p, g = balance(mid)
        if g < MIN_MARGIN or g < p:
            hi = mid
        else:
            lo = mid
    radii = [r + lo for r in rho_min]
    arcs = _arcs_for(fixed, radii)
    ppm = min(pp(i, radii[i]) for i in range(len(ms)))
    margin = min(ppm, _min_gap(arcs))
    group = SchottkyGroup(ms, tuple(arcs), margin, name, tuple(params))
    if not verify_pingpong(group):
        raise NoPingPongCertificate("sampled verification of the ping-pong inclusions failed")
    return group


def verify_pingpong(group: SchottkyGroup, samples: int = 512) -> bool:
    """Check the certificate on a dense sample of each complementary arc."""
    arcs = group.intervals
    if _min_gap(arcs) <= 0:
        return False
    t = np.linspace(0.0, 1.0, samples)
    for i, g in enumerate(group.generators):
        minus, plus = arcs[2 * i], arcs[2 * i + 1]
        for h, src, dst in ((g, minus, plus), (g.inverse(), plus, minus)):
            comp = src.complement()
            pts = comp.start + comp.length * t
            img = h.act_on_angle(pts)
            if not np.all(dst.contains(img)):
                return False
            # monotone along the arc: offsets inside the target increase
            if np.any(np.diff(dst.offset(img)) < -1e-12):
                return False
    return True


def _check_letters(group: SchottkyGroup, w: Word):
    if w.rank_needed > group.rank:
        raise BadIndex(f"word {w} uses a generator beyond rank {group.rank}")


def element(group: SchottkyGroup, w) -> MobiusElement:
    """Left-to-right product of generator matrices, PSL-canonicalized."""
    w = as_word(w)
    _check_letters(group, w)
    m = np.eye(2)
    mats = [g.matrix for g in group.generators]
    invs = [g.inverse().matrix for g in group.generators]
    for x in w.letters:
        m = m @ (mats[x - 1] if x > 0 else invs[-x - 1])
    return MobiusElement.from_matrix(m)


def translation(d: float) -> MobiusElement:
    """Hyperbolic translation by d along the geodesic with endpoints -1, 1."""
    return MobiusElement((math.cosh(d / 2), math.sinh(d / 2), math.sinh(d / 2), math.cosh(d / 2)))


def three_holed_sphere(l1: float, l2: float, l3: float | None = None) -> SchottkyGroup:
    """Pair-of-pants group with boundary words g1, g2 and (g1 g2)^{-1}.

    g1 translates by l1 along the imaginary axis.  g2 translates by l2 along
    a disjoint axis at distance d, oriented so that tr(g1) tr(g2) tr(g1 g2) < 0
    for the positive-trace lifts; d is chosen from the right-angled hexagon
    relation so that g1 g2 has translation length l3 (default l1).
    """
    if l1 <= 0 or l2 <= 0:
        raise ValueError("boundary lengths must be positive")
    l3 = l1 if l3 is None else l3
    if l3 <= 0:
        raise ValueError("boundary lengths must be positive")
    c1, c2, c3 = math.cosh(l1 / 2), math.cosh(l2 / 2), math.cosh(l3 / 2)
    s1, s2 = math.sinh(l1 / 2), math.sinh(l2 / 2)
    d = math.acosh((c3 + c1 * c2) / (s1 * s2))
    g1 = MobiusElement.diagonal(l1)
    h = translation(d)
    g2 = h @ MobiusElement.diagonal(-l2) @ h.inverse()
    try:
        group = from_generators((g1, g2), "three_holed_sphere",
                                (("l1", l1), ("l2", l2), ("l3", l3)))
    except NoPingPongCertificate as exc:
        raise NoPingPongCertificate(
            f"no certificate for boundary lengths ({l1}, {l2}, {l3}): {exc}. "
            "Lengths of about 2.5 or more certify reliably.") from exc
    return group


def one_holed_torus(l1: float, l2: float, twist: float = PI / 2) -> SchottkyGroup:
    """Rank-2 group with crossing axes meeting at angle ``twist`` at i.

    The commutator is the boundary of the one-holed torus.  Pure
    hyperbolicity is additionally checked on all classes of length <= 6.
    """
    if l1 <= 0 or l2 <= 0:
        raise ValueError("generator lengths must be positive")
    if not 0 < twist < PI:
        raise ValueError("twist must lie in (0, pi)")
    g1 = MobiusElement.diagonal(l1)
    # an elliptic of matrix angle t rotates the tangent plane at i by 2t
    g2 = MobiusElement.diagonal(l2).conjugate(MobiusElement.rotation(twist / 2))
    group = from_generators((g1, g2), "one_holed_torus",
                            (("l1", l1), ("l2", l2), ("twist", twist)))
    for c in enumerate_classes(2, 6):
        if classify(element(group, c.rep)) is not Kind.HYPERBOLIC:
            raise NoPingPongCertificate(f"class {c} is not hyperbolic")
    return group


def rotational(k: int, length: float) -> SchottkyGroup:
    """k generators of equal length with axes through i at equal angles."""
    if k < 2:
        raise ValueError("need k >= 2")
    base = MobiusElement.diagonal(length)
    gens = [base.conjugate(MobiusElement.rotation(j * PI / (2 * k))) for j in range(k)]
    return from_generators(gens, "rotational", (("k", k), ("length", length)))


PRESETS = {
    "three_holed_sphere": three_holed_sphere,
    "one_holed_torus": one_holed_torus,
    "rotational": rotational,
}


def preset(name: str, params: dict | None = None) -> SchottkyGroup:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name](**(params or {}))


def letter_contraction(group: SchottkyGroup, letter: int) -> float:
    """Largest derivative of the circle action of a letter s off the arc of s^-1.

    The derivative at angle t is 1/|s v(t)|^2, so the maximum sits where the
    quadratic form of s^T s is smallest on the arc: at an endpoint, or at the
    least eigenvector of s^T s when that direction lies inside the arc.
    """
    g = group.generators[abs(letter) - 1]
    s = g if letter > 0 else g.inverse()
    dom = group.arc_for(-letter).complement()
    cand = [dom.start, dom.end]
    _, vecs = np.linalg.eigh(s.matrix.T @ s.matrix)
    t_min = float(_mod(math.atan2(vecs[1, 0], vecs[0, 0])))
    if dom.contains(t_min):
        cand.append(t_min)
    return float(np.max(s.angle_derivative(np.array(cand))))


def min_arc_gap(group: SchottkyGroup) -> float:
    return _min_gap(group.intervals)
