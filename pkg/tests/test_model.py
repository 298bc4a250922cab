import math

import numpy as np
import pytest
import sympy as sp

from statediff import (Box, Const, ConventionSpec, DiffusionModel, ExpQuad1,
                       Poly1, PolyPower1, ScalarField,
                       convention_flux_residual, drift_from_model,
                       ito_drift_field, normalize, sqrt_double,
                       stationary_density_driftfree, to_ito_drift)
from statediff.errors import OnDiscontinuity, ZeroDensity

BOX = Box.interval(-1.0, 1.0)


def const_model(d=3.0, rho=1.0, box=BOX):
    return DiffusionModel(box, ScalarField.constant(d, box), ScalarField.constant(rho, box))


def test_drift_zero_for_constant_model():
    m = const_model()
    assert drift_from_model(m, 0.2)[0] == 0.0


def test_drift_equals_grad_d_for_uniform_density():
    box = Box.interval(0.0, 1.0)
    m = DiffusionModel(box, ScalarField.from_pieces_1d(box, [], [Poly1([1.0, 1.0])]),
                       ScalarField.constant(1.0, box))
    assert drift_from_model(m, 0.5)[0] == pytest.approx(1.0)


def test_drift_gaussian_density():
    c = 2.5
    m = DiffusionModel(BOX, ScalarField.constant(c, BOX),
                       ScalarField.from_pieces_1d(BOX, [], [ExpQuad1([0.0, 0.0, -0.5])]))
    x = 0.37
    assert drift_from_model(m, x)[0] == pytest.approx(-c * x, rel=1e-12)


def test_drift_matches_finite_differences_on_random_smooth_models(rng):
    for _ in range(25):
        dc = rng.uniform(0.5, 2.0, size=3)
        d = ScalarField.from_pieces_1d(BOX, [], [Poly1([2.0 + dc[0], dc[1], dc[2]])])
        rho = ScalarField.from_pieces_1d(
            BOX, [], [ExpQuad1([0.0, rng.uniform(-0.5, 0.5), rng.uniform(-0.8, -0.1)])])
        m = DiffusionModel(BOX, d, rho)
        x = rng.uniform(-0.9, 0.9)
        prod = lambda t: m.d(t) * m.rho_eq(t)
        ref = (prod(x + 1e-6) - prod(x - 1e-6)) / 2e-6 / m.rho_eq(x)
        assert drift_from_model(m, x)[0] == pytest.approx(ref, rel=1e-6)


def test_drift_zero_when_product_constant(rng):
    # D * rho_eq constant forces zero drift everywhere off discontinuities
    d = ScalarField.from_pieces_1d(BOX, [], [Poly1([2.0, 0.0, 1.0])])
    rho = ScalarField.from_pieces_1d(BOX, [], [PolyPower1([2.0, 0.0, 1.0], -1.0)])
    m = DiffusionModel(BOX, d, rho)
    for x in rng.uniform(-0.9, 0.9, size=12):
        assert abs(m.drift(x)[0]) < 1e-10


def test_drift_errors():
    box = Box.interval(-1.0, 1.0)
    m = DiffusionModel(box, ScalarField.split_x(box, 0.0, 1.0, 2.0),
                       ScalarField.constant(1.0, box))
    with pytest.raises(OnDiscontinuity):
        drift_from_model(m, 0.0)
    rho = ScalarField.from_pieces_1d(box, [], [Poly1([0.0, 0.0, 1.0])])  # zero at x=0
    m2 = DiffusionModel(box, ScalarField.constant(1.0, box), rho)
    with pytest.raises(ZeroDensity):
        drift_from_model(m2, 0.0)


def test_normalize_examples():
    m = normalize(const_model(rho=7.0))
    assert m.rho_eq(0.1) == pytest.approx(0.5)
    two = DiffusionModel(BOX, ScalarField.constant(1.0, BOX),
                         ScalarField.split_x(BOX, 0.0, 2.0, 1.0))
    assert two.rho_eq(-0.5) == pytest.approx(2.0 / 3.0)
    assert two.rho_eq(0.5) == pytest.approx(1.0 / 3.0)
    assert two.rho_eq.integral() == pytest.approx(1.0, abs=1e-12)


def test_to_ito_drift_alpha_zero_is_identity(rng):
    a = ScalarField.from_pieces_1d(BOX, [], [Poly1([0.3, -1.2, 0.7])])
    b = ScalarField.from_pieces_1d(BOX, [], [Poly1([2.0, 0.5])])
    conv = ConventionSpec(0.0, a, b)
    for x in rng.uniform(-0.9, 0.9, size=8):
        assert to_ito_drift(conv, x) == pytest.approx(a(x), rel=1e-14)


def test_to_ito_drift_stratonovich_linear_b():
    box = Box.interval(0.0, 1.0)
    conv = ConventionSpec(0.5, ScalarField.constant(0.0, box),
                          ScalarField.from_pieces_1d(box, [], [Poly1([0.0, 1.0])]))
    assert to_ito_drift(conv, 0.8) == pytest.approx(0.4)


def test_to_ito_drift_constant_b_no_correction():
    conv = ConventionSpec(1.0, ScalarField.constant(0.0, BOX),
                          ScalarField.constant(5.0, BOX))
    assert to_ito_drift(conv, 0.3) == 0.0


def test_to_ito_drift_on_discontinuity():
    b = ScalarField.split_x(BOX, 0.0, 1.0, 2.0)
    conv = ConventionSpec(0.5, ScalarField.constant(0.0, BOX), b)
    with pytest.raises(OnDiscontinuity):
        to_ito_drift(conv, 0.0)


def test_ito_drift_field_matches_sympy(rng):
    x = sp.Symbol("x")
    for _ in range(10):
        ac = rng.uniform(-1, 1, size=3)
        bc = rng.uniform(0.2, 1.0, size=2)
        bc[0] += 2.0
        alpha = rng.choice([0.0, 0.25, 0.5, 1.0])
        a = ScalarField.from_pieces_1d(BOX, [], [Poly1(ac)])
        b = ScalarField.from_pieces_1d(BOX, [], [Poly1(bc)])
        conv = ConventionSpec(alpha, a, b)
        field = ito_drift_field(conv)
        a_sym = ac[0] + ac[1] * x + ac[2] * x ** 2
        b_sym = bc[0] + bc[1] * x
        ref = sp.expand(a_sym + alpha * b_sym * sp.diff(b_sym, x))
        for xv in rng.uniform(-0.9, 0.9, size=5):
            assert field(xv) == pytest.approx(float(ref.subs(x, xv)), rel=1e-12)
            assert to_ito_drift(conv, xv) == pytest.approx(float(ref.subs(x, xv)), rel=1e-12)


def test_stationary_family_isothermal_constant():
    b = ScalarField.from_pieces_1d(BOX, [], [Poly1([1.5, 0.3, 0.2])])
    st = stationary_density_driftfree(1.0, b)
    xs = np.linspace(-0.9, 0.9, 9)
    assert np.allclose(st.values(xs), st(0.0))


def test_stationary_family_ito_two_valued():
    d = ScalarField.split_x(BOX, 0.0, 1.0, 2.0)
    b = sqrt_double(d)
    st = stationary_density_driftfree(0.0, b)
    assert st(-0.5) / st(0.5) == pytest.approx(2.0, rel=1e-12)


def test_stationary_family_constant_b_all_conventions_agree():
    b = ScalarField.constant(2.0, BOX)
    for alpha in (0.0, 0.5, 1.0):
        st = stationary_density_driftfree(alpha, b)
        assert st(0.3) == st(-0.7)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_flux_residual_zero(alpha, rng):
    d = ScalarField.from_pieces_1d(BOX, [], [Poly1([1.0, 0.0, 1.0])])
    b = sqrt_double(d)
    rho = stationary_density_driftfree(alpha, b)
    xs = rng.uniform(-0.95, 0.95, size=40)
    res = convention_flux_residual(alpha, b, rho, xs)
    assert np.max(np.abs(res)) <= 1e-10


def test_conventionspec_validation():
    with pytest.raises(ValueError):
        ConventionSpec(1.2, ScalarField.constant(0.0, BOX), ScalarField.constant(1.0, BOX))
    with pytest.raises(ValueError):
        ConventionSpec(0.5, ScalarField.constant(0.0, BOX), ScalarField.constant(-1.0, BOX))
