import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from margcone.errors import NotHyperbolic
from margcone.freegrp import Word
from margcone.lie_core import (Kind, MobiusElement, classify, fixed_points_on_circle,
                               hyperbolic_data, line_angle, translation_length)
from margcone.schottky import element

from oracles import eig_oracle, random_hyperbolic, random_sl2


def angle_close(a, b, tol=1e-9):
    d = (a - b) % math.pi
    return min(d, math.pi - d) < tol


def test_canonical_sign_identifies_psl_representatives():
    m = MobiusElement((-2.0, 0.0, 0.0, -0.5))
    assert m.entries == (2.0, 0.0, 0.0, 0.5)
    assert MobiusElement((0.0, -1.0, 1.0, 0.0)) == MobiusElement((0.0, 1.0, -1.0, 0.0))


def test_rejects_bad_determinant():
    with pytest.raises(ValueError):
        MobiusElement((2.0, 0.0, 0.0, 1.0))


@pytest.mark.parametrize("entries, kind", [
    ((2.0, 0.0, 0.0, 0.5), Kind.HYPERBOLIC),
    ((1.0, 1.0, 0.0, 1.0), Kind.PARABOLIC),
    ((math.sqrt(0.5), -math.sqrt(0.5), math.sqrt(0.5), math.sqrt(0.5)), Kind.ELLIPTIC),
])
def test_classify_examples(entries, kind):
    assert classify(MobiusElement(entries)) is kind


def test_classify_threshold_is_tau_par():
    eps = 1e-10
    a = 1 + eps
    near = MobiusElement((a, 0.0, 0.0, 1 / a))
    assert classify(near) is Kind.PARABOLIC


def test_unit_length_model_element():
    h = hyperbolic_data(MobiusElement.diagonal(1.0))
    assert h.lam == pytest.approx(math.exp(-0.5), abs=1e-15)
    np.testing.assert_allclose(h.v_plus, [0, 1], atol=1e-15)
    np.testing.assert_allclose(h.v_minus, [1, 0], atol=1e-15)
    assert h.length == pytest.approx(1.0, abs=1e-14)


def test_diag_two_has_length_two_log_two():
    assert hyperbolic_data(MobiusElement((2.0, 0.0, 0.0, 0.5))).length == pytest.approx(2 * math.log(2))


def test_non_hyperbolic_rejected():
    with pytest.raises(NotHyperbolic):
        hyperbolic_data(MobiusElement((1.0, 1.0, 0.0, 1.0)))
    with pytest.raises(NotHyperbolic):
        fixed_points_on_circle(MobiusElement.rotation(0.3))


def test_eigendata_matches_characteristic_polynomial_on_preset_product(pants, rng):
    for _ in range(20):
        letters = [int(x) for x in rng.choice([1, -1, 2, -2], size=6)]
        w = Word(tuple(letters))
        if not w.letters:
            continue
        m = element(pants, w)
        if classify(m) is not Kind.HYPERBOLIC:
            continue
        h = hyperbolic_data(m)
        lam, vp, vm = eig_oracle(m.matrix)
        assert h.lam == pytest.approx(lam, rel=1e-9)
        assert abs(abs(vp @ h.v_plus) - 1) < 1e-9
        assert abs(abs(vm @ h.v_minus) - 1) < 1e-9


def test_fixed_points_of_diagonal_are_axes():
    att, rep = fixed_points_on_circle(MobiusElement((2.0, 0.0, 0.0, 0.5)))
    assert angle_close(att, 0.0)
    assert angle_close(rep, math.pi / 2)


@pytest.mark.parametrize("theta", [0.1, 0.7, 1.3, 2.9])
def test_fixed_points_rotate_with_conjugation(theta):
    m = MobiusElement((2.0, 0.0, 0.0, 0.5)).conjugate(MobiusElement.rotation(theta))
    att, rep = fixed_points_on_circle(m)
    assert angle_close(att, theta)
    assert angle_close(rep, math.pi / 2 + theta)


def test_fixed_points_of_preset_generator_match_oracle(pants):
    g2 = pants.generators[1]
    _, vp, vm = eig_oracle(g2.matrix)
    att, rep = fixed_points_on_circle(g2)
    assert angle_close(att, line_angle(vm))
    assert angle_close(rep, line_angle(vp))


def test_attracting_point_attracts(pants):
    g = pants.generators[1]
    att, rep = fixed_points_on_circle(g)
    theta = (att + 0.4) % math.pi
    for _ in range(30):
        theta = float(g.act_on_angle(theta))
    assert angle_close(theta, att, 1e-6)


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@given(seeds, st.integers(min_value=-4, max_value=4).filter(bool))
def test_length_of_powers(seed, n):
    m = MobiusElement.from_matrix(random_hyperbolic(np.random.default_rng(seed)))
    assert translation_length(m ** n) == pytest.approx(abs(n) * translation_length(m), abs=1e-8)


@given(seeds)
def test_length_conjugation_invariant(seed):
    rng = np.random.default_rng(seed)
    m = MobiusElement.from_matrix(random_hyperbolic(rng))
    w = MobiusElement.from_matrix(random_sl2(rng))
    assert translation_length(m.conjugate(w)) == pytest.approx(translation_length(m), abs=1e-8)


@given(seeds)
def test_eigendata_invariants(seed):
    m = MobiusElement.from_matrix(random_hyperbolic(np.random.default_rng(seed)))
    h = hyperbolic_data(m)
    assert 0 < h.lam < 1
    assert np.linalg.norm(h.v_plus) == pytest.approx(1.0)
    assert np.linalg.norm(h.v_minus) == pytest.approx(1.0)
    assert h.v_minus[0] * h.v_plus[1] - h.v_minus[1] * h.v_plus[0] > 0
    first = h.v_plus[0] if h.v_plus[0] != 0 else h.v_plus[1]
    assert first > 0
    mv = m.matrix @ h.v_plus
    assert np.linalg.norm(mv - h.sign * h.lam * h.v_plus) <= 1e-8
    mv = m.matrix @ h.v_minus
    assert np.linalg.norm(mv - h.sign / h.lam * h.v_minus) <= 1e-8 * max(1, 1 / h.lam)
    assert abs(h.length - 2 * math.acosh(abs(m.trace) / 2)) <= 1e-9


@given(seeds)
def test_inverse_swaps_eigenvectors(seed):
    m = MobiusElement.from_matrix(random_hyperbolic(np.random.default_rng(seed)))
    h, hi = hyperbolic_data(m), hyperbolic_data(m.inverse())
    assert abs(abs(hi.v_plus @ h.v_minus) - 1) < 1e-8
    assert abs(abs(hi.v_minus @ h.v_plus) - 1) < 1e-8
    assert hi.length == pytest.approx(h.length, abs=1e-9)
