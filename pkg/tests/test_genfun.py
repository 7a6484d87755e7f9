import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwlab.errors import (
    BranchAmbiguity,
    ConsistencyError,
    DivergenceWarning,
    DomainError,
    PoleError,
    PreconditionError,
)
from qwlab.genfun import (
    DefectContext,
    contfrac_f,
    dgamma_dtheta_sq,
    f0_tilde,
    f0_tilde_circle,
    f0_tilde_prime,
    gamma_and_lambdas,
    gamma_prime,
    gamma_roots,
    residue_contributions,
    residue_norm_sq,
    taylor_coefficients,
    tal_residue_sum,
    tal_total_mass,
    time_averaged_limit_measure,
    xi_tilde_general,
    xi_tilde_x,
)
from qwlab.pathsum import genfun_amplitudes
from qwlab.stationary import stationary_measure
from qwlab.walk import Amplitude2, CoinField, CoinMatrix, amplitude_history

SQ2 = math.sqrt(2)
QUBITS = [
    Amplitude2(1, 0),
    Amplitude2(0, 1),
    Amplitude2(1 / SQ2, 1j / SQ2),
    Amplitude2(1 / SQ2, -1j / SQ2),
    Amplitude2(0.6, 0.8j),
]
PHI = Amplitude2.normalized(0.3 + 0.2j, 0.7 - 0.1j)


@st.composite
def disk_points(draw, rmax=1.0):
    r = draw(st.floats(0, rmax))
    t = draw(st.floats(-math.pi, math.pi))
    return r * cmath.exp(1j * t)


def test_f0_at_origin_and_top():
    assert f0_tilde(0) == 0
    assert f0_tilde(1j) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        f0_tilde(1.5)


@settings(max_examples=60, deadline=None)
@given(z=disk_points(0.999))
def test_f0_fixed_point(z):
    f = f0_tilde(z)
    assert abs(f - SQ2 * z * z * (1 - 1 / (2 - SQ2 * f))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(t=st.floats(math.pi / 4, 3 * math.pi / 4 - 1e-9), neg=st.booleans())
def test_circle_formula_matches_disk(t, neg):
    theta = -t if neg else t
    if 1 - 2 * math.cos(theta) ** 2 < 0:
        return
    circ = f0_tilde_circle(theta)
    assert abs(circ - f0_tilde(cmath.exp(1j * theta))) < 1e-7
    assert abs(circ) == pytest.approx(1.0, abs=1e-12)


def test_circle_formula_warns_off_arc():
    with pytest.warns(BranchAmbiguity):
        f0_tilde_circle(0.1)


def test_f0_derivative():
    for z in (0.3 + 0.2j, -0.5j, 0.7):
        h = 1e-6
        fd = (f0_tilde(z + h) - f0_tilde(z - h)) / (2 * h)
        assert abs(fd - f0_tilde_prime(z)) < 1e-8


def test_contfrac_matches_closed_form():
    field = CoinField.one_defect(math.pi / 6)
    assert abs(contfrac_f(field, 0, "plus", 0.5, 60) - f0_tilde(0.5)) < 1e-10
    assert abs(contfrac_f(field, 0, "minus", 0.5, 60) - f0_tilde(0.5)) < 1e-10
    assert contfrac_f(field, 0, "plus", 0, 5) == 0


def test_contfrac_translation_invariance():
    field = CoinField.hadamard()
    z = 0.4 + 0.3j
    base = contfrac_f(field, 0, "plus", z)
    for x in (-7, 3, 12):
        assert contfrac_f(field, x, "plus", z) == base
        assert contfrac_f(field, x, "minus", z) == pytest.approx(base)


def test_contfrac_matches_direct_recursion():
    # the continued fraction and f_x = z^2 (Delta f_{x+1} + b)/(1 - c f_{x+1}) agree
    u = CoinMatrix.from_array(np.array([[0.6, 0.8j], [0.8j, 0.6]]))
    field = CoinField.custom({1: u, 2: u, -1: u})
    z = 0.6 - 0.2j
    a, b, c, d = u.a, u.b, u.c, u.d
    f2 = contfrac_f(field, 2, "plus", z)
    f1 = contfrac_f(field, 1, "plus", z)
    assert f1 == pytest.approx(z * z * ((a * d - b * c) * f2 + b) / (1 - c * f2))


def test_contfrac_warnings_and_errors():
    field = CoinField.hadamard()
    with pytest.warns(DivergenceWarning):
        contfrac_f(field, 0, "plus", 0.999, depth=3)
    with pytest.raises(DomainError):
        contfrac_f(field, 0, "plus", 1.0)
    with pytest.raises(ValueError):
        contfrac_f(field, 0, "up", 0.5)
    bad = CoinField.custom({3: CoinMatrix(1, 0, 0, 1)})
    with pytest.raises(PreconditionError):
        contfrac_f(bad, 0, "plus", 0.5)


def test_gamma_and_lambdas():
    xi = math.pi / 6
    ctx = DefectContext(xi)
    g, lp, lm = gamma_and_lambdas(xi, 0.3)
    assert lm == -lp
    assert ctx.gamma(0.3) == g
    assert g == pytest.approx(1 - f0_tilde(0.3) + f0_tilde(0.3) ** 2)


@pytest.mark.parametrize("xi", [math.pi / 8, math.pi / 6, math.pi / 5])
def test_gamma_roots(xi):
    s, c = math.sin(xi), math.cos(xi)
    q = 3 - 2 * SQ2 * s
    roots = gamma_roots(xi)
    assert [r.k for r in roots] == [1, 2, 3, 4]
    for r in roots:
        g, lp, lm = gamma_and_lambdas(xi, r.z)
        assert abs(g) < 1e-10
        assert abs(f0_tilde(r.z) - r.f0_value) < 1e-10
        assert abs(lp) ** 2 == pytest.approx(1 / q, abs=1e-12)
        assert abs(lm) ** 2 == pytest.approx(1 / q, abs=1e-12)
    r1, r2 = roots[0], roots[1]
    assert math.cos(r1.theta) == pytest.approx(c / math.sqrt(q))
    assert math.sin(r1.theta) == pytest.approx((SQ2 - s) / math.sqrt(q))
    assert r2.z == pytest.approx(-r1.z)
    assert math.cos(r1.theta) == pytest.approx(c * math.sin(r1.theta) / (SQ2 - s))
    assert gamma_and_lambdas(xi, r1.z)[1] == pytest.approx(-1j / math.sqrt(q))


def test_gamma_roots_reference_values():
    r = gamma_roots(math.pi / 6)[0]
    assert math.cos(r.theta) == pytest.approx(0.687714, abs=1e-6)
    assert math.sin(r.theta) == pytest.approx(0.725981, abs=1e-6)
    assert math.sin(r.theta) == pytest.approx(math.sqrt(1 - 0.6877146596600970 ** 2), abs=1e-12)


def test_gamma_roots_domain():
    with pytest.raises(DomainError):
        gamma_roots(math.pi / 4)


@pytest.mark.parametrize("xi", [math.pi / 8, math.pi / 6, math.pi / 5])
def test_dgamma_dtheta(xi):
    for r in gamma_roots(xi):
        assert abs(r.z * gamma_prime(xi, r.z)) ** 2 == pytest.approx(dgamma_dtheta_sq(xi), rel=1e-9)


def test_xi_tilde_origin_formula():
    xi, z = math.pi / 6, 0.4 + 0.1j
    s, c = 0.5, math.sqrt(3) / 2
    f = f0_tilde(z)
    g = 1 - 2 * s * f + f * f
    a, b = PHI.left, PHI.right
    want = np.array([(1 - s * f) * a - c * f * b, c * f * a + (1 - s * f) * b]) / g
    np.testing.assert_allclose(xi_tilde_x(xi, z, 0, PHI), want)


def test_xi_tilde_single_factor():
    xi, z = math.pi / 6, 0.3
    s, c = 0.5, math.sqrt(3) / 2
    f = f0_tilde(z)
    g = 1 - 2 * s * f + f * f
    lam = -z / (SQ2 - f)
    a, b = PHI.left, PHI.right
    want = np.array([lam * f, z]) * ((s - f) * a - c * b) / g
    np.testing.assert_allclose(xi_tilde_x(xi, z, 1, PHI), want)


@pytest.mark.parametrize("x", [0, 1, -1, 2, -3, 6])
def test_taylor_coefficients_reproduce_walk(x):
    xi = math.pi / 6
    hist = amplitude_history(CoinField.one_defect(xi), PHI, 40)
    sim = np.array([st.amplitude(x).as_array() for st in hist])
    coeffs = taylor_coefficients(lambda z: xi_tilde_x(xi, z, x, PHI), 40)
    assert np.abs(coeffs - sim).max() < 1e-9


def test_taylor_coefficients_match_return_genfun():
    xi = math.pi / 5
    coeffs = taylor_coefficients(lambda z: xi_tilde_x(xi, z, 0, PHI), 80)
    assert np.abs(coeffs[::2] - genfun_amplitudes(xi, PHI, 40)).max() < 1e-9


@pytest.mark.parametrize("x", [0, 2, -2])
def test_general_form_matches_specialized(x):
    xi = math.pi / 7
    field = CoinField.one_defect(xi)
    for z in (0.2, 0.5 + 0.3j, -0.6j):
        np.testing.assert_allclose(xi_tilde_general(field, z, x, PHI), xi_tilde_x(xi, z, x, PHI),
                                   atol=1e-12)


def test_general_form_wojcik_field():
    field = CoinField.wojcik(0.3)
    phi = Amplitude2(1, 0)
    hist = amplitude_history(field, phi, 30)
    for x in (0, 2, -1):
        sim = np.array([st.amplitude(x).as_array() for st in hist])
        coeffs = taylor_coefficients(lambda z: xi_tilde_general(field, z, x, phi), 30)
        assert np.abs(coeffs - sim).max() < 1e-9


def test_pole_error():
    xi = math.pi / 6
    z = gamma_roots(xi)[0].z
    with pytest.raises(PoleError):
        xi_tilde_x(xi, z, 0, PHI)


def test_general_form_precondition():
    field = CoinField.custom({0: CoinMatrix(0, 1, 1, 0)})
    with pytest.raises(PreconditionError):
        xi_tilde_general(field, 0.3, 0, PHI)


def test_residue_examples():
    xi = math.pi / 6
    s = 0.5
    q = 3 - 2 * SQ2 * s
    a, b = PHI.left, PHI.right
    k1_0 = (1 - SQ2 * s) ** 2 / (2 * q ** 2) * abs(a - 1j * b) ** 2
    assert residue_norm_sq(xi, 0, PHI, 1) == pytest.approx(k1_0, rel=1e-12)
    for x in (1, 4):
        want = (2 - SQ2 * s) * (1 - SQ2 * s) ** 2 / (2 * q ** 2) * q ** (-x) * abs(a - 1j * b) ** 2
        assert residue_norm_sq(xi, x, PHI, 1) == pytest.approx(want, rel=1e-12)
    # alpha - i beta = 0 silences the k = 1, 2 roots; alpha + i beta = 0 the k = 3, 4 roots
    vals = residue_contributions(xi, 3, Amplitude2(1 / SQ2, -1j / SQ2))
    assert vals[0].norm_sq == pytest.approx(0, abs=1e-15)
    assert vals[1].norm_sq == pytest.approx(0, abs=1e-15)
    assert vals[2].norm_sq > 0
    vals = residue_contributions(xi, 3, Amplitude2(1 / SQ2, 1j / SQ2))
    assert vals[2].norm_sq == pytest.approx(0, abs=1e-15)
    assert vals[3].norm_sq == pytest.approx(0, abs=1e-15)
    assert vals[0].norm_sq > 0


def test_residue_domain():
    with pytest.raises(DomainError):
        residue_norm_sq(math.pi / 3, 0, PHI, 1)
    with pytest.raises(ValueError):
        residue_norm_sq(math.pi / 6, 0, PHI, 5)


@pytest.mark.parametrize("xi", [math.pi / 8, math.pi / 6, math.pi / 5])
def test_residue_sum_equals_closed_form(xi):
    for x in range(-20, 21):
        closed = time_averaged_limit_measure(xi, x)
        for phi in QUBITS:
            assert abs(tal_residue_sum(xi, x, phi) - closed) < 1e-10


def test_limit_measure_values():
    assert time_averaged_limit_measure(math.pi / 6, 0) == pytest.approx(0.06823, abs=1e-5)
    assert time_averaged_limit_measure(math.pi / 4, 0) == 0
    assert time_averaged_limit_measure(1.0, 7) == 0
    for x in range(1, 10):
        assert time_averaged_limit_measure(math.pi / 6, x) == time_averaged_limit_measure(math.pi / 6, -x)


def test_limit_measure_consistency_guard():
    with pytest.raises(ConsistencyError):
        time_averaged_limit_measure(math.pi / 6, 0, tol=-1.0)


def test_total_mass():
    assert tal_total_mass(math.pi / 6) == pytest.approx(0.36940, abs=1e-5)
    assert tal_total_mass(math.pi / 4) == 0
    assert tal_total_mass(math.pi / 4 - 1e-9) < 1e-8
    for xi in np.linspace(0.01, math.pi / 4 - 0.01, 12):
        assert 0 < tal_total_mass(xi) < 1


def test_stationary_link_literal_substitution_is_off_by_factor():
    # Putting |c|^2 = 2(1 - sqrt2 S)/q straight into the unnormalized stationary
    # measure overshoots the limit measure by exactly q/(1 - sqrt2 S); the match
    # holds for the normalized measure scaled by that |c|^2.
    xi = math.pi / 6
    s = 0.5
    q = 3 - 2 * SQ2 * s
    c = math.sqrt(2 * (1 - SQ2 * s) / q)
    for x in (-3, 0, 5):
        ratio = stationary_measure(xi, c, x) / time_averaged_limit_measure(xi, x)
        assert ratio == pytest.approx(q / (1 - SQ2 * s), rel=1e-12)


def test_no_warnings_in_normal_use():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        xi_tilde_general(CoinField.one_defect(0.5), 0.5, 3, PHI)
