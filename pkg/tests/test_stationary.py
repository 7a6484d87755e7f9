import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwlab.errors import DomainError
from qwlab.stationary import (
    ALL_BRANCHES,
    EigenBranch,
    EigenSolution,
    eigensolution,
    eval_amplitude,
    geometric_profile_total,
    scaled_stationary_prob_measure,
    stationary_measure,
    stationary_prob_measure,
    stationary_total_mass,
    verify_eigen_residual,
)
from qwlab.walk import Amplitude2, CoinField, evolve, WalkState

XIS = [math.pi / 8, math.pi / 6, math.pi / 5, math.pi / 3, 0.4 * math.pi]


@pytest.mark.parametrize("xi", XIS)
@pytest.mark.parametrize("branch", ALL_BRANCHES, ids=str)
def test_eigen_residual(xi, branch):
    sol = eigensolution(xi, branch)
    assert verify_eigen_residual(sol, 50) < 1e-12


def test_eigen_residual_quarter_pi():
    for br in ALL_BRANCHES:
        assert verify_eigen_residual(eigensolution(math.pi / 4, br), 50) < 1e-12


def test_perturbed_eigenvalue_fails():
    sol = eigensolution(math.pi / 6, ALL_BRANCHES[0])
    bad = EigenSolution(sol.xi, sol.branch, sol.alpha, sol.lam * 1.01, sol.theta_s)
    assert verify_eigen_residual(bad, 50) > 1e-3


@pytest.mark.parametrize("xi", XIS)
def test_eigenvalue_unimodular(xi):
    for br in ALL_BRANCHES:
        assert abs(eigensolution(xi, br).lam) == pytest.approx(1.0, abs=1e-14)


def test_theta_closed_form():
    # beta = -i alpha: theta_s = -s i / sqrt(3 - 2 sqrt2 S)
    xi = math.pi / 6
    q = 3 - 2 * math.sqrt(2) * 0.5
    for s in (1, -1):
        sol = eigensolution(xi, EigenBranch("minus_i", s))
        assert sol.theta_s == pytest.approx(-s * 1j / math.sqrt(q), abs=1e-15)
        assert sol.theta_l == pytest.approx(-1 / sol.theta_s)


def test_eigenvector_is_stationary_under_evolution():
    # U Psi = lambda Psi on a window: after one step, interior sites are multiplied by lambda
    xi = math.pi / 5
    sol = eigensolution(xi, EigenBranch("plus_i", -1), alpha=0.3 + 0.4j)
    W = 30
    xs = np.arange(-W, W + 1)
    amps = np.array([eval_amplitude(sol, x).as_array() for x in xs])
    state = WalkState(0, W, amps[:, 0].copy(), amps[:, 1].copy())
    nxt = evolve(state, CoinField.one_defect(xi), 1)
    inner = slice(1, -1)
    np.testing.assert_allclose(nxt.left[inner], sol.lam * state.left[inner], atol=1e-12)
    np.testing.assert_allclose(nxt.right[inner], sol.lam * state.right[inner], atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(xi=st.floats(0.05, math.pi / 4 - 0.05), x=st.integers(-40, 40), c=st.floats(0.1, 3.0))
def test_measure_matches_eigenvector(xi, x, c):
    # alpha = c/sqrt2, beta = -i c/sqrt2
    sol = eigensolution(xi, EigenBranch("minus_i", 1), alpha=c / math.sqrt(2))
    amp = eval_amplitude(sol, x)
    assert amp.norm_sq == pytest.approx(stationary_measure(xi, c, x), rel=1e-10)


def test_stationary_measure_values():
    xi = math.pi / 6
    q = 3 - math.sqrt(2)
    assert stationary_measure(xi, 2.0, 0) == pytest.approx(4.0)
    assert stationary_measure(xi, 1.0, 3) == pytest.approx((2 - math.sqrt(2) / 2) / q ** 3)
    assert stationary_measure(xi, 1.0, -3) == stationary_measure(xi, 1.0, 3)


def test_total_mass_and_probability():
    for xi in (math.pi / 8, math.pi / 6, math.pi / 5):
        s = math.sin(xi)
        q = 3 - 2 * math.sqrt(2) * s
        assert stationary_total_mass(xi, 1.0) == pytest.approx(q / (1 - math.sqrt(2) * s))
        vals = [stationary_prob_measure(xi, x) for x in range(-200, 201)]
        total = geometric_profile_total(vals, 200, stationary_prob_measure(xi, 200), 1 / q)
        assert total == pytest.approx(1.0, abs=1e-10)
        assert stationary_prob_measure(xi, 0) == pytest.approx((1 - math.sqrt(2) * s) / q)


def test_probability_measure_domain():
    with pytest.raises(DomainError):
        stationary_prob_measure(math.pi / 4, 0)
    with pytest.raises(DomainError):
        stationary_total_mass(math.pi / 3, 1.0)
    with pytest.raises(DomainError):
        eigensolution(0.0, ALL_BRANCHES[0])


def test_scaled_probability_measure():
    xi = math.pi / 6
    s = 0.5
    q = 3 - 2 * math.sqrt(2) * s
    assert scaled_stationary_prob_measure(xi, 0) == pytest.approx(2 * (1 - math.sqrt(2) * s) ** 2 / q ** 2)


def test_branch_validation():
    with pytest.raises(ValueError):
        EigenBranch("zero", 1)
    with pytest.raises(ValueError):
        EigenBranch("plus_i", 2)
