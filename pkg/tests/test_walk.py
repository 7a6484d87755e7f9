import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwlab.errors import DomainError, WindowOverflow
from qwlab.walk import (
    HADAMARD,
    Amplitude2,
    CoinField,
    CoinMatrix,
    cesaro_average,
    defect_coin,
    evolve,
    measure,
    origin_amplitudes,
    point_mass,
    split,
    step,
)

unit = st.floats(-1.0, 1.0, allow_nan=False)


@st.composite
def qubits(draw):
    v = [draw(unit) for _ in range(4)]
    a, b = complex(v[0], v[1]), complex(v[2], v[3])
    if abs(a) ** 2 + abs(b) ** 2 < 1e-3:
        a = 1.0
    return Amplitude2.normalized(a, b)


def test_defect_coin_entries():
    xi = 0.3
    u = defect_coin(xi)
    assert u.a == pytest.approx(math.cos(xi))
    assert u.b == pytest.approx(math.sin(xi))
    assert u.c == pytest.approx(math.sin(xi))
    assert u.d == pytest.approx(-math.cos(xi))
    assert u.det == pytest.approx(-1.0)


def test_defect_coin_is_hadamard_at_quarter_pi():
    assert defect_coin(math.pi / 4) is HADAMARD


@pytest.mark.parametrize("xi", [0.0, math.pi / 2, -0.1, 2.0])
def test_defect_coin_domain(xi):
    with pytest.raises(DomainError):
        defect_coin(xi)


def test_non_unitary_coin_rejected():
    with pytest.raises(ValueError):
        CoinMatrix(1, 1, 0, 1)


def test_split_sums_to_coin():
    p, q = split(defect_coin(0.4))
    np.testing.assert_allclose(p + q, defect_coin(0.4).as_array())
    assert np.all(p[1] == 0) and np.all(q[0] == 0)


def test_field_lookup():
    f = CoinField.one_defect(0.2)
    assert f(0) == defect_coin(0.2)
    assert f(5) == HADAMARD and f(-3) == HADAMARD
    w = CoinField.wojcik(0.25)
    np.testing.assert_allclose(w(0).as_array(), 1j * HADAMARD.as_array())


def test_one_step_by_hand():
    xi = 0.7
    s, c = math.sin(xi), math.cos(xi)
    phi = Amplitude2(0.6, 0.8j)
    state = step(point_mass(phi, 3), CoinField.one_defect(xi))
    # left mover lands at -1 with P_0 phi, right mover at +1 with Q_0 phi
    assert state.amplitude(-1).left == pytest.approx(c * 0.6 + s * 0.8j)
    assert state.amplitude(-1).right == 0
    assert state.amplitude(1).right == pytest.approx(s * 0.6 - c * 0.8j)
    assert state.amplitude(1).left == 0


def test_two_step_origin_amplitude():
    # Psi_2(0) = P_1 Q_0 phi + Q_{-1} P_0 phi for the one-defect walk
    xi = 0.5
    s, c = math.sin(xi), math.cos(xi)
    a, b = 0.6, 0.8j
    amps = origin_amplitudes(CoinField.one_defect(xi), Amplitude2(a, b), 2)
    assert amps[2, 0] == pytest.approx((s * a - c * b) / math.sqrt(2))
    assert amps[2, 1] == pytest.approx((c * a + s * b) / math.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(phi=qubits(), xi=st.floats(0.01, math.pi / 2 - 0.01), n=st.integers(1, 60))
def test_norm_conserved(phi, xi, n):
    state = evolve(point_mass(phi, n), CoinField.one_defect(xi), n)
    assert state.norm_sq == pytest.approx(1.0, abs=1e-12)


def test_odd_times_vanish_at_origin():
    amps = origin_amplitudes(CoinField.one_defect(0.3), Amplitude2.normalized(1, 1j), 41)
    assert np.all(amps[1::2] == 0)


def test_window_overflow():
    with pytest.raises(WindowOverflow):
        evolve(point_mass(Amplitude2(1, 0), 5), CoinField.hadamard(), 6)


def test_hadamard_matches_quarter_pi_bitwise():
    phi = Amplitude2.normalized(1, 1j)
    a = evolve(point_mass(phi, 100), CoinField.hadamard(), 100)
    b = evolve(point_mass(phi, 100), CoinField.one_defect(math.pi / 4), 100)
    assert np.array_equal(a.left, b.left) and np.array_equal(a.right, b.right)


def test_hadamard_known_profile():
    # Hadamard walk from [1/sqrt2, i/sqrt2]: symmetric measure
    phi = Amplitude2(1 / math.sqrt(2), 1j / math.sqrt(2))
    prof = measure(evolve(point_mass(phi, 50), CoinField.hadamard(), 50))
    np.testing.assert_allclose(prof.values, prof.values[::-1], atol=1e-14)
    assert prof.total == pytest.approx(1.0)


def test_wojcik_norm():
    phi = Amplitude2(1.0, 0.0)
    state = evolve(point_mass(phi, 80), CoinField.wojcik(1 / 3), 80)
    assert state.norm_sq == pytest.approx(1.0, abs=1e-12)


def test_cesaro_average_is_mean_of_measures():
    f = CoinField.one_defect(0.4)
    phi = Amplitude2.normalized(1, 1j)
    N = 12
    prof = cesaro_average(f, phi, N)
    state = point_mass(phi, N + 1)
    acc = np.zeros(2 * (N + 1) + 1)
    for _ in range(N):
        acc += measure(state).values
        state = step(state, f)
    np.testing.assert_allclose(prof.values, acc / N, atol=1e-15)
    assert prof.total == pytest.approx(1.0)


def test_cesaro_requires_normalized_qubit():
    with pytest.raises(ValueError):
        cesaro_average(CoinField.hadamard(), Amplitude2(1.0, 1.0), 5)


def test_custom_field():
    u = CoinMatrix(0.6, 0.8, 0.8, -0.6)
    f = CoinField.custom({2: u})
    assert f(2) == u and f(0) == HADAMARD
    state = evolve(point_mass(Amplitude2(1, 0), 10), f, 10)
    assert state.norm_sq == pytest.approx(1.0)
    assert cmath.isclose(f(2).det, -1.0)
