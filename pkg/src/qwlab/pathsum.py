"""
Return amplitude at the origin of the one-defect walk.

Four independent routes are provided:

* ``return_amplitude_renewal`` -- first-return blocks glued by a renewal
  convolution. Every block is a multiple of one fixed matrix, so the blocks
  commute and the sum over compositions collapses to an O(n^2) recursion.
* ``return_amplitude_genfun`` -- coefficient extraction from the closed-form
  generating function in ``w = z^2``.
* ``return_amplitude_spectral`` -- the same sum written in the eigenbasis of
  the block matrix.
* ``return_amplitude_asymptotic`` -- the large-``n`` oscillating limit.

The exact simulation in :mod:`qwlab.walk` is the fourth, fully independent
oracle for all of them.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

from qwlab.errors import ConsistencyError, DomainError
from qwlab.series import rstar_closed
from qwlab.walk import Amplitude2

__all__ = [
    "XiStarBlock",
    "AsymptoticParams",
    "CgmvParams",
    "xi_star",
    "return_amplitude_renewal",
    "renewal_amplitudes",
    "return_amplitude_genfun",
    "genfun_amplitudes",
    "genfun_kernels",
    "return_amplitude_spectral",
    "theta0",
    "return_amplitude_asymptotic",
    "return_prob_limit",
    "cgmv_params",
    "cgmv_limit",
    "first_return_weights",
    "first_return_paths",
]

SQRT2 = math.sqrt(2.0)


def _check_xi(xi: float, hi: float = math.pi / 2) -> None:
    if not (0.0 < xi < hi):
        raise DomainError(f"xi must lie in the open interval (0, {hi!r}), got {xi!r}")


def _sc(xi: float) -> tuple[float, float]:
    if xi == math.pi / 4:
        return 1 / SQRT2, 1 / SQRT2
    return math.sin(xi), math.cos(xi)


def _block_matrix(xi: float) -> NDArray[np.float64]:
    s, c = _sc(xi)
    return np.array([[-s, c], [-c, -s]])


@dataclass(frozen=True)
class XiStarBlock:
    """Summed weight of first returns to the origin after exactly ``n`` steps."""

    n: int
    matrix: NDArray[np.float64]


def xi_star(xi: float, n: int) -> XiStarBlock:
    """First-return block ``(r*_{n-1}/sqrt 2) [[-S, C], [-C, -S]]``; zero for odd ``n``."""
    _check_xi(xi)
    if n < 2:
        raise ValueError("n must be at least 2")
    if n % 2:
        return XiStarBlock(n, np.zeros((2, 2)))
    return XiStarBlock(n, float(rstar_closed(n - 1)) / SQRT2 * _block_matrix(xi))


def renewal_amplitudes(xi: float, phi: Amplitude2, n_max: int) -> NDArray[np.complex128]:
    """``Psi_{2m}(0)`` for ``m = 0..n_max`` via ``G_m = sum_j Xi*_{2j} G_{m-j}``."""
    _check_xi(xi)
    m_block = _block_matrix(xi)
    # Xi*_{2j} = x_j M with x_j = r*_{2j-1}/sqrt2; every G_m is a polynomial in M
    weights = np.array([0.0] + [float(rstar_closed(2 * j - 1)) / SQRT2 for j in range(1, n_max + 1)])
    g = np.empty((n_max + 1, 2, 2))
    g[0] = np.eye(2)
    for m in range(1, n_max + 1):
        acc = np.zeros((2, 2))
        for j in range(1, m + 1):
            if weights[j] != 0.0:
                acc += weights[j] * g[m - j]
        g[m] = m_block @ acc
    return g.astype(np.complex128) @ phi.as_array()


def return_amplitude_renewal(xi: float, phi: Amplitude2, n: int) -> Amplitude2:
    """``Psi_{2n}(0)`` from the renewal convolution of first-return blocks."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Amplitude2.from_array(renewal_amplitudes(xi, phi, n)[n])


@lru_cache(maxsize=8)
def _z_coeffs(order: int) -> NDArray[np.float64]:
    # Z(w) = -1 - w + sqrt(1 + w^2); exact binomial coefficients, rounded once.
    out = np.zeros(order + 1)
    coef = Fraction(1)
    for k in range(0, order // 2 + 1):
        if k > 0:
            coef = coef * (Fraction(1, 2) - (k - 1)) / k
        out[2 * k] = float(coef)
    out[0] -= 1.0
    if order >= 1:
        out[1] -= 1.0
    return out


def _series_divide(num: NDArray, den: NDArray) -> NDArray:
    n = len(num)
    q = np.zeros(n, dtype=np.result_type(num, den))
    d0 = den[0]
    for k in range(n):
        acc = num[k]
        if k:
            acc = acc - np.dot(den[1:k + 1], q[k - 1::-1])
        q[k] = acc / d0
    return q


def _series_mul(a: NDArray, b: NDArray) -> NDArray:
    return np.convolve(a, b)[: len(a)]


@lru_cache(maxsize=32)
def genfun_kernels(xi: float, order: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Coefficients of ``K_a(w) = sqrt2 (sqrt2 + S Z)/D`` and ``K_b(w) = sqrt2 C Z / D``.

    ``D = 2 + 2 sqrt2 S Z + Z^2``. The return amplitudes are
    ``Psi^L_{2n}(0) = [w^n](K_a alpha + K_b beta)`` and
    ``Psi^R_{2n}(0) = [w^n](K_a beta - K_b alpha)``.
    """
    s, c = _sc(xi)
    z = _z_coeffs(order)
    one = np.zeros(order + 1)
    one[0] = 1.0
    den = 2.0 * one + 2.0 * SQRT2 * s * z + _series_mul(z, z)
    ka = _series_divide(SQRT2 * (SQRT2 * one + s * z), den)
    kb = _series_divide(SQRT2 * c * z, den)
    ka.setflags(write=False)
    kb.setflags(write=False)
    return ka, kb


def genfun_amplitudes(xi: float, phi: Amplitude2, n_max: int) -> NDArray[np.complex128]:
    """``Psi_{2m}(0)`` for ``m = 0..n_max`` by generating-function coefficient extraction."""
    _check_xi(xi)
    ka, kb = genfun_kernels(float(xi), n_max)
    a, b = phi.left, phi.right
    return np.stack([ka * a + kb * b, ka * b - kb * a], axis=1)


def return_amplitude_genfun(xi: float, phi: Amplitude2, n: int) -> Amplitude2:
    """``Psi_{2n}(0)`` as the ``w^n`` coefficient of the closed-form generating function."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Amplitude2.from_array(genfun_amplitudes(xi, phi, n)[n])


def return_amplitude_spectral(xi: float, phi: Amplitude2, n: int,
                              flip_second_eigenvalue: bool = False) -> Amplitude2:
    """``Psi_{2n}(0)`` from the eigen-decomposition of the first-return block.

    The block ``[[-S, C], [-C, -S]]/sqrt2`` has eigenvalues
    ``u = (-S + Ci)/sqrt2`` (eigenvector ``[1, i]``) and
    ``v = (-S - Ci)/sqrt2`` (eigenvector ``[1, -i]``), so the composition sum
    becomes ``[w^n] 1/(1 - uZ)`` and ``[w^n] 1/(1 - vZ)``.

    ``flip_second_eigenvalue`` replaces ``v`` by ``-v``; that variant does not
    reproduce the walk and is kept only so the sign convention can be tested.
    """
    _check_xi(xi)
    if n < 0:
        raise ValueError("n must be nonnegative")
    s, c = _sc(xi)
    u = complex(-s, c) / SQRT2
    v = complex(-s, -c) / SQRT2
    if flip_second_eigenvalue:
        v = -v
    z = _z_coeffs(n).astype(np.complex128)
    one = np.zeros(n + 1, dtype=np.complex128)
    one[0] = 1.0
    gu = _series_divide(one, one - u * z)[n]
    gv = _series_divide(one, one - v * z)[n]
    a, b = phi.left, phi.right
    pm, pp = a - 1j * b, a + 1j * b
    return Amplitude2(0.5 * (pm * gu + pp * gv), 0.5 * (1j * pm * gu - 1j * pp * gv))


@dataclass(frozen=True)
class AsymptoticParams:
    """Rotation angle and amplitude of the localized return amplitude."""

    theta0: float
    cos_theta0: float
    sin_theta0: float
    amplitude_factor: float
    localized: bool


def theta0(xi: float) -> AsymptoticParams:
    """Angle ``theta0`` in ``(pi/2, pi)`` with
    ``cos theta0 = -(1 - sqrt2 S)^2/(3 - 2 sqrt2 S)`` and
    ``sin theta0 = 2 (sqrt2 - S) C/(3 - 2 sqrt2 S)``.
    """
    _check_xi(xi, math.pi / 4)
    s, c = _sc(xi)
    q = 3 - 2 * SQRT2 * s
    cos_t = -((1 - SQRT2 * s) ** 2) / q
    sin_t = 2 * (SQRT2 - s) * c / q
    return AsymptoticParams(math.atan2(sin_t, cos_t), cos_t, sin_t, 2 * (1 - SQRT2 * s) / q, True)


def return_amplitude_asymptotic(xi: float, phi: Amplitude2, n: int) -> Amplitude2:
    """Large-``n`` form ``F R(n theta0) phi`` of ``Psi_{2n}(0)`` with ``R`` a plane rotation."""
    p = theta0(xi)
    cn, sn = math.cos(n * p.theta0), math.sin(n * p.theta0)
    f = p.amplitude_factor
    a, b = phi.left, phi.right
    return Amplitude2(f * (cn * a - sn * b), f * (cn * b + sn * a))


def return_prob_limit(xi: float) -> float:
    """``lim r_{2n}(0) = 4(1 - sqrt2 S)^2/(3 - 2 sqrt2 S)^2`` for ``xi < pi/4``, else 0."""
    _check_xi(xi)
    if xi >= math.pi / 4:
        return 0.0
    s, _ = _sc(xi)
    return 4 * (1 - SQRT2 * s) ** 2 / (3 - 2 * SQRT2 * s) ** 2


@dataclass(frozen=True)
class CgmvParams:
    """Constants of the CMV-matrix description of the one-defect walk.

    The phases are fixed at ``sigma_1 = tau_1 = 0`` and ``sigma_2 = tau_2 = pi``,
    which makes ``alpha_hat = alpha`` and ``beta_hat = i beta``.
    """

    a: complex
    b: complex
    omega: complex
    rho_a: float
    rho_b: float
    zeta_plus: complex
    zeta_minus: complex
    alpha_hat: complex
    beta_hat: complex


def cgmv_params(xi: float, phi: Amplitude2) -> CgmvParams:
    _check_xi(xi)
    s, c = _sc(xi)
    a = 1j / SQRT2
    b = 1j * s
    sigma1, tau1, sigma2, tau2 = 0.0, 0.0, math.pi, math.pi
    phase = cmath.exp(1j * ((sigma2 - sigma1) / 2 + tau2 - sigma2 + tau1))
    return CgmvParams(
        a=a, b=b, omega=1.0 + 0j,
        rho_a=math.sqrt(1 - abs(a) ** 2),
        rho_b=math.sqrt(1 - abs(b) ** 2),
        zeta_plus=complex(c, s), zeta_minus=complex(-c, s),
        alpha_hat=phi.left, beta_hat=phase * phi.right,
    )


def cgmv_limit(xi: float, phi: Amplitude2, branch: str) -> float:
    """Limit return probability contributed by the ``M_plus`` or ``M_minus`` mass point.

    Evaluates ``(1/2)(1 - rho_a^2/|zeta - a|^2)^2 {1 -+ [(|a^|^2 - |b^|^2) Re b
    + 2 rho_b Re(conj(omega a^) b^)] / sqrt(1 - Im^2 b)}``.

    Raises
    ------
    DomainError
        Outside ``(0, pi/4)``, where the mass points are absent.
    """
    _check_xi(xi, math.pi / 4)
    if branch not in ("M_plus", "M_minus"):
        raise ValueError("branch must be 'M_plus' or 'M_minus'")
    p = cgmv_params(xi, phi)
    sign = 1.0 if branch == "M_plus" else -1.0
    zeta = p.zeta_plus if branch == "M_plus" else p.zeta_minus
    ah, bh = p.alpha_hat, p.beta_hat
    pref = 0.5 * (1 - p.rho_a ** 2 / abs(zeta - p.a) ** 2) ** 2
    inner = ((abs(ah) ** 2 - abs(bh) ** 2) * p.b.real
             + 2 * p.rho_b * ((p.omega * ah).conjugate() * bh).real)
    return pref * (1 - sign * inner / math.sqrt(1 - p.b.imag ** 2))


_P_INT = ((1, 1), (0, 0))
_Q_INT = ((0, 0), (1, -1))


def _imul(x, y):
    return (
        (x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]),
        (x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]),
    )


def first_return_paths(n: int) -> list[str]:
    """Words over ``{"P", "Q"}`` for walks from site 1 that stay on ``x >= 1``
    and first reach the origin at step ``n``.

    Words are written with the last move leftmost, matching matrix products:
    ``"PPPQQ"`` is two right moves followed by three left moves.
    """
    words = []
    for moves in itertools.product("PQ", repeat=n):
        pos = 1
        ok = True
        for k, mv in enumerate(moves):
            pos += -1 if mv == "P" else 1
            if pos == 0 and k < n - 1:
                ok = False
                break
        if ok and pos == 0:
            words.append("".join(reversed(moves)))
    return words


def first_return_weights(n: int) -> dict[str, Fraction]:
    """Exact ``P, Q, R, S`` coordinates of the summed first-return weight by brute force.

    Enumerates all ``2**n`` move sequences, keeps the first-return ones and
    sums the Hadamard products. Hadamard moves are ``1/sqrt2`` times integer
    matrices, so the sum is ``X / sqrt2**n`` with ``X`` integral and the
    coordinates ``tr(B^* Xi)`` are ``(integer) / sqrt2**(n+1)``; they are
    returned exactly when ``n`` is odd and are zero when ``n`` is even.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    total = ((0, 0), (0, 0))
    for word in first_return_paths(n):
        prod = ((1, 0), (0, 1))
        for mv in word:
            prod = _imul(prod, _P_INT if mv == "P" else _Q_INT)
        total = tuple(tuple(total[i][j] + prod[i][j] for j in range(2)) for i in range(2))
    (x00, x01), (x10, x11) = total
    ints = {"p": x00 + x01, "q": x10 - x11, "r": x00 - x01, "s": x10 + x11}
    if all(v == 0 for v in ints.values()):
        return {k: Fraction(0) for k in ints}
    if n % 2 == 0:
        raise ConsistencyError("nonzero first-return weight at even length")
    scale = 2 ** ((n + 1) // 2)
    return {k: Fraction(v, scale) for k, v in ints.items()}
