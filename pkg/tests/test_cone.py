import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from margcone.cone import (HalfSpaceSet, build_halfspaces, combined_status, convergence_report,
                           cross_section, estimated_class_count, margin_lp, membership,
                           section_point)
from margcone.errors import BudgetExceeded, DimMismatch
from margcone.freegrp import enumerate_classes
from margcone.margulis import (Cocycle, cocycle_from_coords, coboundary, homothety_scale,
                               random_cocycle)
from margcone.schottky import three_holed_sphere
from margcone.symrep import neutral_vector

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
PANTS = three_holed_sphere(4.0, 4.0)


def custom_set(F, group=PANTS, r=1):
    F = np.asarray(F, dtype=float)
    classes = tuple(enumerate_classes(2, 3)[: len(F)])
    return HalfSpaceSet(classes, np.ones(len(F)), F, 1, group, r, len(F))


def linprog_margin(F):
    m = F.shape[1]
    c = np.zeros(m + 1)
    c[-1] = -1
    A = np.hstack([-F, np.ones((len(F), 1))])
    res = linprog(c, A_ub=A, b_ub=np.zeros(len(F)), bounds=[(-1, 1)] * m + [(None, None)],
                  method="highs")
    return -res.fun


def test_opposite_pair_has_zero_margin():
    H = custom_set([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
    rep = margin_lp(H)
    assert rep.t_star == pytest.approx(0.0, abs=1e-12)
    assert rep.status == "MixedOnly"


def test_single_functional():
    rep = margin_lp(custom_set([[1.0, 0.0, 0.0]]))
    assert rep.t_star == pytest.approx(1.0)
    assert rep.witness[0] == pytest.approx(1.0)
    assert rep.status == "PositiveFeasible"


def test_negative_sign():
    rep = margin_lp(custom_set([[1.0, 0.0, 0.0]]), -1)
    assert rep.t_star == pytest.approx(1.0)
    assert rep.witness[0] == pytest.approx(-1.0)
    assert rep.status == "NegativeFeasible"


def test_triangle_cone():
    F = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, -1.0, 1.0]]
    rep = margin_lp(custom_set(F))
    assert rep.t_star == pytest.approx(1.0 / 3.0)
    assert rep.t_star == pytest.approx(linprog_margin(np.array(F)), abs=1e-9)


@given(seeds)
@settings(max_examples=60)
def test_margin_matches_linprog(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    F = rng.standard_normal((int(rng.integers(1, 30)), m))
    H = HalfSpaceSet(tuple(enumerate_classes(2, 4)[: len(F)]), np.ones(len(F)), F, 1, PANTS, 1,
                     len(F))
    rep = margin_lp(H)
    assert rep.t_star == pytest.approx(linprog_margin(F), abs=1e-8)
    # post-hoc witness check
    assert np.all(np.abs(rep.witness) <= 1 + 1e-12)
    assert np.min(F @ rep.witness) == pytest.approx(rep.t_star, abs=1e-12)


@given(seeds)
@settings(max_examples=30)
def test_antipodal_symmetry(seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((int(rng.integers(1, 15)), 3))
    minus = margin_lp(custom_set(F), -1)
    flipped = margin_lp(custom_set(-F), 1)
    assert minus.t_star == pytest.approx(flipped.t_star, abs=1e-9)


@given(seeds)
@settings(max_examples=30)
def test_adding_constraints_never_raises_margin(seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((20, 3))
    t = [margin_lp(custom_set(F[:n])).t_star for n in (5, 10, 20)]
    assert t[0] >= t[1] - 1e-9 >= t[2] - 2e-9


def test_combined_status():
    pos = margin_lp(custom_set([[1.0, 0.0, 0.0]]))
    mixed = margin_lp(custom_set([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]))
    neg = margin_lp(custom_set([[1.0, 0.0, 0.0]]), -1)
    assert combined_status(pos, neg) == "BothFeasible"
    assert combined_status(pos, mixed) == "PositiveFeasible"
    assert combined_status(mixed, neg) == "NegativeFeasible"
    assert combined_status(mixed, mixed) == "MixedOnly"


def test_length_one_deduplicates_inverses(pants):
    H = build_halfspaces(pants, 1, 1)
    assert H.raw_count == 4 and len(H) == 2
    assert [str(c) for c in H.classes] == ["a", "b"]


def test_truncation_matches_direct_build(pants):
    full = build_halfspaces(pants, 1, 5)
    for L in (2, 3, 4):
        direct = build_halfspaces(pants, 1, L)
        cut = full.truncate(L)
        assert cut.classes == direct.classes and cut.raw_count == direct.raw_count
        np.testing.assert_array_equal(cut.functionals, direct.functionals)


def test_fold_inverses_same_cone_for_odd_r(pants):
    a = build_halfspaces(pants, 1, 4)
    b = build_halfspaces(pants, 1, 4, fold_inverses=True)
    assert margin_lp(a).t_star == pytest.approx(margin_lp(b).t_star, abs=1e-9)


def test_budget_guard(pants):
    assert estimated_class_count(2, 1) == 4
    with pytest.raises(BudgetExceeded):
        build_halfspaces(pants, 1, 16)


def test_margin_non_increasing_in_L(pants):
    full = build_halfspaces(pants, 1, 8)
    t = [margin_lp(full.truncate(L)).t_star for L in range(1, 9)]
    assert all(t[i + 1] <= t[i] + 1e-9 for i in range(len(t) - 1))
    assert t[-1] == pytest.approx(0.25, abs=1e-8)


def test_membership_is_scale_invariant(pants, rng):
    H = build_halfspaces(pants, 1, 4)
    u = random_cocycle(pants, 1, rng)
    m1 = membership(u, H)
    m2 = membership(homothety_scale(u, 3.0), H)
    assert m1.kind == m2.kind
    m3 = membership(homothety_scale(u, -1.0), H)
    flip = {"AllPositive": "AllNegative", "AllNegative": "AllPositive", "Mixed": "Mixed"}
    assert m3.kind == flip[m1.kind]


def test_membership_mixed_pair(pants):
    g1, g2 = pants.generators
    u = Cocycle(np.array([neutral_vector(g1, 1), -neutral_vector(g2, 1)]), pants, 1)
    m = membership(u, build_halfspaces(pants, 1, 2))
    assert m.kind == "Mixed"
    assert str(m.negative) == "b" and str(m.positive) == "a"


def test_membership_of_lp_witness(pants):
    H = build_halfspaces(pants, 1, 6)
    rep = margin_lp(H)
    u = cocycle_from_coords(pants, 1, rep.witness)
    m = membership(u, H)
    assert m.kind == "AllPositive"
    assert m.margin >= rep.t_star - 1e-9


def test_membership_of_coboundary_is_indeterminate(pants, rng):
    u = coboundary(pants, 1, rng.standard_normal(3))
    assert membership(u, build_halfspaces(pants, 1, 3)).kind == "Indeterminate"


def test_membership_dimension_check(pants, rng):
    with pytest.raises(DimMismatch):
        membership(random_cocycle(pants, 2, rng), build_halfspaces(pants, 1, 2))


def test_cross_section_needs_three_dimensions(triple):
    with pytest.raises(DimMismatch):
        cross_section(build_halfspaces(triple, 1, 2))


def test_cross_section_triangle():
    F = [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-1.0, -1.0, 1.0]]
    sec = cross_section(custom_set(F))
    # plane z = 1: x >= -1, y >= -1, x + y <= 1 is a triangle of area 4.5
    assert sec.area == pytest.approx(4.5)
    for v in sec.vertices:
        x = section_point(custom_set(F), 0, v)
        assert x[2] == pytest.approx(1.0)
        assert np.all(np.array(F) @ x >= -1e-9)


def test_cross_sections_nest(torus):
    full = build_halfspaces(torus, 1, 5)
    areas = [cross_section(full.truncate(L)).area for L in range(2, 6)]
    assert all(areas[i + 1] <= areas[i] * (1 + 1e-12) for i in range(len(areas) - 1))
    assert areas[-1] < areas[0]


def test_convergence_report(pants):
    rows = convergence_report(pants, 1, 5)
    assert [row.L for row in rows] == [1, 2, 3, 4, 5]
    assert [row.count for row in rows] == [len(enumerate_classes(2, L)) for L in range(1, 6)]
    assert all(rows[i + 1].t_plus <= rows[i].t_plus + 1e-9 for i in range(4))
    assert all(row.area is not None for row in rows)
    with pytest.raises(ValueError):
        convergence_report(pants, 1, 13)
