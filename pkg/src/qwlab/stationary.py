"""
Closed-form stationary eigenvectors of the one-defect Hadamard walk.

The eigenvalue problem ``lambda Psi(x) = P_{x+1} Psi(x+1) + Q_{x-1} Psi(x-1)``
has geometric solutions on both half-lines, glued at the defect. They exist
only when the qubit at the origin satisfies ``alpha**2 + beta**2 = 0``, i.e.
``beta = -i alpha`` or ``beta = +i alpha``, and for each of these there are two
eigenvalues of opposite sign. All four branches are exposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import mpmath

from qwlab.errors import DomainError
from qwlab.walk import Amplitude2

__all__ = [
    "EigenBranch",
    "ALL_BRANCHES",
    "EigenSolution",
    "eigensolution",
    "eval_amplitude",
    "verify_eigen_residual",
    "stationary_measure",
    "stationary_total_mass",
    "stationary_prob_measure",
    "scaled_stationary_prob_measure",
    "geometric_profile_total",
]

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class EigenBranch:
    """``beta_sign`` is ``"minus_i"`` (beta = -i alpha) or ``"plus_i"``; ``lambda_sign`` is +1 or -1."""

    beta_sign: str
    lambda_sign: int

    def __post_init__(self) -> None:
        if self.beta_sign not in ("minus_i", "plus_i"):
            raise ValueError(f"beta_sign must be 'minus_i' or 'plus_i', got {self.beta_sign!r}")
        if self.lambda_sign not in (1, -1):
            raise ValueError("lambda_sign must be +1 or -1")

    @property
    def beta_factor(self) -> complex:
        return -1j if self.beta_sign == "minus_i" else 1j

    def __str__(self) -> str:
        return f"({'+' if self.lambda_sign > 0 else '-'}, {self.beta_sign})"


ALL_BRANCHES = tuple(EigenBranch(b, s) for b in ("minus_i", "plus_i") for s in (1, -1))


@dataclass(frozen=True)
class EigenSolution:
    """One stationary eigenvector, fixed by ``xi``, the branch and ``alpha = Psi^L(0)``.

    ``theta_s`` is the small root of the spatial characteristic polynomial;
    the amplitude decays (or grows) like ``|theta_s|**|x|``. The large root is
    ``-1/theta_s`` and is not stored.
    """

    xi: float
    branch: EigenBranch
    alpha: complex
    lam: complex
    theta_s: complex

    @property
    def beta(self) -> complex:
        return self.branch.beta_factor * self.alpha

    @property
    def theta_l(self) -> complex:
        return -1.0 / self.theta_s


def _check_open(xi: float, hi: float = math.pi / 2) -> None:
    if not (0.0 < xi < hi):
        raise DomainError(f"xi must lie in the open interval (0, {hi!r}), got {xi!r}")


def _lambda_theta(s, c, sqrt2, branch: EigenBranch, i):
    q = 3 - 2 * sqrt2 * s
    if branch.beta_sign == "minus_i":
        lam = branch.lambda_sign * (c + (sqrt2 - s) * i) / q ** 0.5
        theta = (sqrt2 - s - c * i) / (q * lam)
    else:
        lam = branch.lambda_sign * (c - (sqrt2 - s) * i) / q ** 0.5
        theta = (sqrt2 - s + c * i) / (q * lam)
    return lam, theta


def eigensolution(xi: float, branch: EigenBranch, alpha: complex = 1.0) -> EigenSolution:
    """Build the stationary eigenvector on ``branch``.

    Raises
    ------
    DomainError
        If ``xi`` is outside ``(0, pi/2)``.
    """
    _check_open(xi)
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    lam, theta = _exact_lambda_theta(float(xi), branch)
    return EigenSolution(float(xi), branch, complex(alpha), complex(lam), complex(theta))


def _exact_lambda_theta(xi: float, branch: EigenBranch, dps: int = 40):
    # Rounded once from high precision, so verify_eigen_residual can tell an
    # unperturbed solution from a perturbed one exactly.
    with mpmath.workdps(dps):
        x = mpmath.mpf(xi)
        return _lambda_theta(mpmath.sin(x), mpmath.cos(x), mpmath.sqrt(2), branch, mpmath.mpc(0, 1))


def _amplitude(x: int, s, c, sqrt2, alpha, beta, theta):
    if x == 0:
        return alpha, beta
    if x > 0:
        f = (-theta) ** x
        return alpha * f, ((1 - sqrt2 * s) * alpha + sqrt2 * c * beta) * f
    f = theta ** (-x)
    return (sqrt2 * c * alpha + (sqrt2 * s - 1) * beta) * f, beta * f


def eval_amplitude(sol: EigenSolution, x: int) -> Amplitude2:
    """Closed-form ``Psi(x)`` of the eigenvector."""
    s, c = math.sin(sol.xi), math.cos(sol.xi)
    left, right = _amplitude(int(x), s, c, SQRT2, sol.alpha, sol.beta, sol.theta_s)
    return Amplitude2(complex(left), complex(right))


def verify_eigen_residual(sol: EigenSolution, W: int, dps: int = 40) -> float:
    """Largest ``||lambda Psi(x) - P_{x+1} Psi(x+1) - Q_{x-1} Psi(x-1)||`` over ``|x| <= W-1``.

    The check runs in ``dps``-digit arithmetic: for ``xi > pi/4`` the
    eigenvector grows geometrically and a double-precision residual would be
    dominated by rounding. ``sol.lam`` and ``sol.theta_s`` are compared with
    their exact values for the branch; any deviation (a deliberately perturbed
    solution) is carried into the high-precision check as a relative factor.
    """
    if W < 2:
        raise ValueError("W must be at least 2")
    with mpmath.workdps(dps):
        i = mpmath.mpc(0, 1)
        xi = mpmath.mpf(sol.xi)
        s, c, sqrt2 = mpmath.sin(xi), mpmath.cos(xi), mpmath.sqrt(2)
        lam, theta = _exact_lambda_theta(sol.xi, sol.branch, dps)
        if complex(lam) != sol.lam:
            lam *= mpmath.mpc(sol.lam) / mpmath.mpc(complex(lam))
        if complex(theta) != sol.theta_s:
            theta *= mpmath.mpc(sol.theta_s) / mpmath.mpc(complex(theta))
        alpha = mpmath.mpc(sol.alpha)
        beta = (-i if sol.branch.beta_sign == "minus_i" else i) * alpha

        inv = 1 / sqrt2
        defect = (c, s, s, -c) if sol.xi != math.pi / 4 else (inv, inv, inv, -inv)
        hadamard = (inv, inv, inv, -inv)

        def coin(x):
            return defect if x == 0 else hadamard

        cache = {}

        def psi(x):
            if x not in cache:
                cache[x] = _amplitude(x, s, c, sqrt2, alpha, beta, theta)
            return cache[x]

        worst = mpmath.mpf(0)
        for x in range(-(W - 1), W):
            a1, b1, _, _ = coin(x + 1)
            _, _, c1, d1 = coin(x - 1)
            lp, rp = psi(x + 1)
            lm, rm = psi(x - 1)
            l0, r0 = psi(x)
            res_l = lam * l0 - (a1 * lp + b1 * rp)
            res_r = lam * r0 - (c1 * lm + d1 * rm)
            worst = max(worst, mpmath.sqrt(abs(res_l) ** 2 + abs(res_r) ** 2))
        return float(worst)


def stationary_measure(xi: float, c: complex, x: int) -> float:
    """Stationary measure with ``alpha = c/sqrt 2`` and ``beta = +-i c/sqrt 2``.

    ``|c|^2`` at the origin and ``(2 - sqrt2 S)|c|^2 (3 - 2 sqrt2 S)^(-|x|)``
    elsewhere.
    """
    _check_open(xi)
    s = math.sin(xi)
    c2 = abs(c) ** 2
    if x == 0:
        return c2
    return (2 - SQRT2 * s) * c2 * (1.0 / (3 - 2 * SQRT2 * s)) ** abs(x)


def stationary_total_mass(xi: float, c: complex) -> float:
    """Total mass of :func:`stationary_measure`; finite only for ``xi < pi/4``."""
    _check_open(xi, math.pi / 4)
    s = math.sin(xi)
    return abs(c) ** 2 * (3 - 2 * SQRT2 * s) / (1 - SQRT2 * s)


def stationary_prob_measure(xi: float, x: int) -> float:
    """Stationary measure normalized to total mass one (``xi`` in ``(0, pi/4)``).

    Raises
    ------
    DomainError
        For ``xi >= pi/4``, where the measure is not normalizable.
    """
    _check_open(xi, math.pi / 4)
    c = 1.0 / math.sqrt(stationary_total_mass(xi, 1.0))
    return stationary_measure(xi, c, x)


def scaled_stationary_prob_measure(xi: float, x: int) -> float:
    """Stationary probability measure multiplied by ``|c|^2 = 2(1 - sqrt2 S)/(3 - 2 sqrt2 S)``.

    This scaling reproduces the time-averaged limit measure exactly. Note
    that the scale multiplies the *normalized* measure: putting the same
    ``|c|`` directly into :func:`stationary_measure` gives a profile that is
    larger by the factor ``(3 - 2 sqrt2 S)/(1 - sqrt2 S)``.
    """
    _check_open(xi, math.pi / 4)
    s = math.sin(xi)
    c2 = 2 * (1 - SQRT2 * s) / (3 - 2 * SQRT2 * s)
    return c2 * stationary_prob_measure(xi, x)


def geometric_profile_total(values: Iterator[float] | list[float], xmax: int,
                            edge_value: float, ratio: float) -> float:
    """Sum of a symmetric profile over ``|x| <= xmax`` plus both geometric tails.

    ``values`` are the profile values at ``x = -xmax..xmax``; beyond ``xmax``
    the profile is assumed to continue as ``edge_value * ratio**k``.
    """
    if not 0.0 <= ratio < 1.0:
        raise ValueError("tail ratio must lie in [0, 1)")
    body = math.fsum(values)
    tail = edge_value * ratio / (1.0 - ratio)
    return body + 2.0 * tail

