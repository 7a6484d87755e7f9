"""
Space-time generating functions and the time-averaged limit measure.

``Xi_x(z) = sum_n Xi(x, n) z^n`` collects all paths from the origin to ``x``;
its Taylor coefficients applied to the initial qubit are the amplitudes
``Psi_n(x)``. For the one-defect walk everything is expressed through

    f0(z) = (z^2 + 1 - sqrt(z^4 + 1)) / sqrt2,
    gamma(z) = 1 - 2 S f0(z) + f0(z)^2,

and the four zeros of ``gamma`` on the unit circle carry the localized part
of the walk. The time-averaged limit measure is the sum of squared residue
norms at those zeros.

For a general coin field the one-sided functions ``f_x^(+-)`` are evaluated
by truncated continued fractions (``contfrac_f``) and assembled by
``xi_tilde_general``; this requires ``a_x b_x c_x d_x != 0`` everywhere.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from qwlab.errors import (
    BranchAmbiguity,
    ConsistencyError,
    DivergenceWarning,
    DomainError,
    PoleError,
    PreconditionError,
)
from qwlab.walk import Amplitude2, CoinField

__all__ = [
    "DefectContext",
    "GammaRoot",
    "ResidueContribution",
    "f0_tilde",
    "f0_tilde_prime",
    "f0_tilde_circle",
    "contfrac_f",
    "gamma_and_lambdas",
    "gamma_prime",
    "gamma_roots",
    "dgamma_dtheta_sq",
    "xi_tilde_x",
    "xi_tilde_general",
    "taylor_coefficients",
    "residue_norm_sq",
    "residue_contributions",
    "tal_residue_sum",
    "time_averaged_limit_measure",
    "tal_total_mass",
]

SQRT2 = math.sqrt(2.0)
POLE_TOL = 1e-14


def _sc(xi: float) -> tuple[float, float]:
    if xi == math.pi / 4:
        return 1 / SQRT2, 1 / SQRT2
    return math.sin(xi), math.cos(xi)


def _check_xi(xi: float, hi: float = math.pi / 2) -> None:
    if not (0.0 < xi < hi):
        raise DomainError(f"xi must lie in the open interval (0, {hi!r}), got {xi!r}")


def _check_disk(z: complex) -> None:
    if abs(z) > 1.0 + 1e-12:
        raise DomainError(f"z must lie in the closed unit disk, got |z| = {abs(z)!r}")


# -- f0 and gamma ----------------------------------------------------------

def f0_tilde(z: complex) -> complex:
    """``(z^2 + 1 - sqrt(z^4 + 1))/sqrt2`` with the principal root, so ``f0(0) = 0``.

    ``Re(z^4 + 1) >= 0`` on the closed disk, so the principal branch is
    continuous there (up to the four points ``z^4 = -1``).
    """
    z = complex(z)
    _check_disk(z)
    z2 = z * z
    return (z2 + 1 - cmath.sqrt(z2 * z2 + 1)) / SQRT2


def f0_tilde_prime(z: complex) -> complex:
    """Derivative of :func:`f0_tilde`."""
    z = complex(z)
    z3 = z ** 3
    return (2 * z - 2 * z3 / cmath.sqrt(z3 * z + 1)) / SQRT2


def f0_tilde_circle(theta: float) -> complex:
    """Unit-circle form ``e^{i theta}(sqrt2 cos theta + i sgn(sin theta) sqrt(1 - 2 cos^2 theta))``.

    The formula holds on ``[-3pi/4, -pi/4) U [pi/4, 3pi/4)``. Elsewhere a
    :class:`BranchAmbiguity` warning is issued and the disk formula is
    returned instead.
    """
    ct, st = math.cos(theta), math.sin(theta)
    disc = 1 - 2 * ct * ct
    if disc < 0:
        warnings.warn(f"theta = {theta!r} lies outside the arcs of the circle formula",
                      BranchAmbiguity, stacklevel=2)
        return f0_tilde(cmath.exp(1j * theta))
    sgn = math.copysign(1.0, st) if st != 0 else 0.0
    return cmath.exp(1j * theta) * complex(SQRT2 * ct, sgn * math.sqrt(disc))


@dataclass(frozen=True)
class DefectContext:
    """``f0``, ``gamma`` and ``lambda^(+-)`` of the one-defect walk at fixed ``xi``."""

    xi: float

    def __post_init__(self) -> None:
        _check_xi(self.xi)

    @property
    def sin_cos(self) -> tuple[float, float]:
        return _sc(self.xi)

    def f0(self, z: complex) -> complex:
        return f0_tilde(z)

    def gamma(self, z: complex) -> complex:
        return gamma_and_lambdas(self.xi, z)[0]

    def lam_plus(self, z: complex) -> complex:
        return gamma_and_lambdas(self.xi, z)[1]

    def lam_minus(self, z: complex) -> complex:
        return gamma_and_lambdas(self.xi, z)[2]


def gamma_and_lambdas(xi: float, z: complex) -> tuple[complex, complex, complex]:
    """``gamma(z) = 1 - 2S f0 + f0^2`` and ``lambda^(+) = -z/(sqrt2 - f0) = -lambda^(-)``."""
    _check_xi(xi)
    s, _ = _sc(xi)
    f = f0_tilde(z)
    gamma = 1 - 2 * s * f + f * f
    lam = -complex(z) / (SQRT2 - f)
    return gamma, lam, -lam


def gamma_prime(xi: float, z: complex) -> complex:
    """``d gamma/dz = f0'(z)(2 f0(z) - 2S)``."""
    s, _ = _sc(xi)
    return f0_tilde_prime(z) * (2 * f0_tilde(z) - 2 * s)


# -- general coin fields ---------------------------------------------------

def _entries(field: CoinField, x: int) -> tuple[complex, complex, complex, complex]:
    u = field(x)
    a, b, c, d = u.a, u.b, u.c, u.d
    if a * b * c * d == 0:
        raise PreconditionError(
            f"coin at x = {x} has a zero entry; the generating-function method needs abcd != 0"
        )
    return a, b, c, d


def _contfrac_once(field: CoinField, x: int, side: str, z: complex, depth: int) -> complex:
    z2 = z * z
    f = 0j
    if side == "plus":
        for y in range(x + depth - 1, x - 1, -1):
            a, b, c, d = _entries(field, y + 1)
            delta = a * d - b * c
            f = -z2 * delta / c * (1 - abs(a) ** 2 / (1 - c * f))
    else:
        for y in range(x - depth + 1, x + 1):
            a, b, c, d = _entries(field, y - 1)
            delta = a * d - b * c
            f = -z2 * delta / b * (1 - abs(d) ** 2 / (1 - b * f))
    return f


def contfrac_f(field: CoinField, x: int, side: str, z: complex, depth: int = 80) -> complex:
    """Truncated continued fraction for ``f_x^(+)`` (``side="plus"``) or ``f_x^(-)``.

    ``f_x^(+) = -z^2 Delta_{x+1}/c_{x+1} (1 - |a_{x+1}|^2/(1 - c_{x+1} f_{x+1}^(+)))``
    and the mirror image with ``b_{x-1}``, ``d_{x-1}`` on the left, seeded
    with zero ``depth`` levels away.

    Warns
    -----
    DivergenceWarning
        If depths ``depth`` and ``depth - 1`` differ by more than ``1e-8``.
    """
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("the continued fraction is evaluated only for |z| < 1")
    f = _contfrac_once(field, x, side, z, depth)
    if depth > 1:
        prev = _contfrac_once(field, x, side, z, depth - 1)
        if abs(f - prev) > 1e-8:
            warnings.warn(f"continued fraction not settled at depth {depth} "
                          f"(last change {abs(f - prev):.3g})", DivergenceWarning, stacklevel=2)
    return f


def xi_tilde_general(field: CoinField, z: complex, x: int, phi: Amplitude2,
                     depth: int = 80) -> np.ndarray:
    """``Xi_x(z) phi`` for an arbitrary coin field, via continued fractions.

    Raises
    ------
    PreconditionError
        If a coin entry on the path of the continued fractions vanishes.
    PoleError
        If ``|gamma(z)| < 1e-14``.
    """
    z = complex(z)
    a0, b0, c0, d0 = _entries(field, 0)
    delta0 = a0 * d0 - b0 * c0
    fp0 = contfrac_f(field, 0, "plus", z, depth)
    fm0 = contfrac_f(field, 0, "minus", z, depth)
    gamma = 1 - c0 * fp0 - b0 * fm0 - delta0 * fp0 * fm0
    if abs(gamma) < POLE_TOL:
        raise PoleError(f"gamma(z) = {gamma!r} at z = {z!r}")
    alpha, beta = phi.left, phi.right
    xi0 = np.array([(1 - b0 * fm0) * alpha + d0 * fp0 * beta,
                    a0 * fm0 * alpha + (1 - c0 * fp0) * beta]) / gamma
    if x == 0:
        return xi0
    if x > 0:
        scalar = c0 * xi0[0] + d0 * xi0[1]
        for y in range(1, x):
            _, _, c, d = _entries(field, y)
            scalar *= z * d / (1 - c * contfrac_f(field, y, "plus", z, depth))
        _, _, c, d = _entries(field, x)
        fx = contfrac_f(field, x, "plus", z, depth)
        lam = z * d / (1 - c * fx)
        return np.array([lam * fx, z]) * scalar
    scalar = a0 * xi0[0] + b0 * xi0[1]
    for y in range(-1, x, -1):
        a, b, _, _ = _entries(field, y)
        scalar *= z * a / (1 - b * contfrac_f(field, y, "minus", z, depth))
    a, b, _, _ = _entries(field, x)
    fx = contfrac_f(field, x, "minus", z, depth)
    lam = z * a / (1 - b * fx)
    return np.array([z, lam * fx]) * scalar


# -- one-defect closed forms -----------------------------------------------

def _numerator(xi: float, x: int, alpha: complex, beta: complex,
               z: complex, f: complex, lam: complex) -> np.ndarray:
    # gamma(z) Xi_x(z) phi for the one-defect coin (C, S; S, -C)
    s, c = _sc(xi)
    if x == 0:
        return np.array([(1 - s * f) * alpha - c * f * beta,
                         c * f * alpha + (1 - s * f) * beta])
    if x > 0:
        scalar = ((s - f) * alpha - c * beta) * lam ** (x - 1)
        return np.array([lam * f, z]) * scalar
    lam_m = -lam
    scalar = (c * alpha + (s - f) * beta) * lam_m ** (-x - 1)
    return np.array([z, lam_m * f]) * scalar


def xi_tilde_x(xi: float, z: complex, x: int, phi: Amplitude2) -> np.ndarray:
    """``Xi_x(z) phi`` for the one-defect walk.

    Raises
    ------
    PoleError
        If ``|gamma(z)| < 1e-14``.
    """
    z = complex(z)
    gamma, lam, _ = gamma_and_lambdas(xi, z)
    if abs(gamma) < POLE_TOL:
        raise PoleError(f"gamma(z) = {gamma!r} at z = {z!r}")
    return _numerator(xi, int(x), phi.left, phi.right, z, f0_tilde(z), lam) / gamma


def taylor_coefficients(fn, n_max: int, radius: float = 0.9, points: int = 512) -> np.ndarray:
    """Taylor coefficients ``0..n_max`` of an analytic ``fn`` by the discrete Cauchy integral.

    ``fn`` may return a scalar or an array; coefficients are stacked along
    the first axis. Aliasing error is of order ``radius**points``.
    """
    if n_max >= points:
        raise ValueError("need more sample points than coefficients")
    zs = radius * np.exp(2j * np.pi * np.arange(points) / points)
    vals = np.array([fn(z) for z in zs])
    coeffs = np.fft.fft(vals, axis=0) / points
    scale = radius ** -np.arange(n_max + 1, dtype=float)
    return coeffs[: n_max + 1] * scale.reshape((-1,) + (1,) * (coeffs.ndim - 1))


# -- roots and residues ----------------------------------------------------

@dataclass(frozen=True)
class GammaRoot:
    """Zero ``e^{i theta}`` of ``gamma`` on the unit circle."""

    k: int
    theta: float
    f0_value: complex

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.theta)


def gamma_roots(xi: float) -> list[GammaRoot]:
    """The four unit-circle zeros of ``gamma`` for ``xi`` in ``(0, pi/4)``, ``k = 1..4``.

    ``cos theta = +-C/sqrt(q)``, ``sin theta = +-(sqrt2 - S)/sqrt(q)`` with
    ``q = 3 - 2 sqrt2 S``; ``f0 = S + Ci`` at ``k = 1, 2`` and ``S - Ci`` at
    ``k = 3, 4``. Each closed-form angle is polished by one Newton step.

    Raises
    ------
    DomainError
        Outside ``(0, pi/4)``.
    """
    _check_xi(xi, math.pi / 4)
    s, c = _sc(xi)
    rq = math.sqrt(3 - 2 * SQRT2 * s)
    cs = [(c, SQRT2 - s), (-c, -(SQRT2 - s)), (c, -(SQRT2 - s)), (-c, SQRT2 - s)]
    roots = []
    for k, (cos_t, sin_t) in enumerate(cs, start=1):
        theta = math.atan2(sin_t / rq, cos_t / rq)
        z = cmath.exp(1j * theta)
        g = gamma_and_lambdas(xi, z)[0]
        dg = 1j * z * gamma_prime(xi, z)
        theta -= (g / dg).real
        f0 = complex(s, c) if k <= 2 else complex(s, -c)
        roots.append(GammaRoot(k, theta, f0))
    return roots


def dgamma_dtheta_sq(xi: float) -> float:
    """``|d gamma(e^{i theta})/d theta|^2 = 4 C^2 q^2/(1 - sqrt2 S)^2`` at every root."""
    _check_xi(xi, math.pi / 4)
    s, c = _sc(xi)
    q = 3 - 2 * SQRT2 * s
    return 4 * c * c * q * q / (1 - SQRT2 * s) ** 2


@dataclass(frozen=True)
class ResidueContribution:
    x: int
    k: int
    norm_sq: float


def _closed_root(xi: float, k: int) -> tuple[complex, complex, complex]:
    # z, f0 and lambda^(+) at root k from the closed forms
    s, c = _sc(xi)
    q = 3 - 2 * SQRT2 * s
    rq = math.sqrt(q)
    z = [complex(c, SQRT2 - s), complex(-c, -(SQRT2 - s)),
         complex(c, -(SQRT2 - s)), complex(-c, SQRT2 - s)][k - 1] / rq
    f = complex(s, c) if k <= 2 else complex(s, -c)
    lam = (-1j if k in (1, 4) else 1j) / rq
    return z, f, lam


def residue_norm_sq(xi: float, x: int, phi: Amplitude2, k: int,
                    tol: float = 1e-9) -> float:
    """``||Res(Xi_x(z) phi; z = e^{i theta_k})||^2``.

    Computed twice: analytically, from the closed-form root data and
    ``|d gamma/d theta|^2 = 4C^2 q^2/(1 - sqrt2 S)^2``; and numerically, from
    ``f0`` and ``gamma'`` evaluated at the polished root. The analytic value
    is returned.

    Raises
    ------
    DomainError
        Outside ``(0, pi/4)``.
    ConsistencyError
        If the two routes differ by more than ``tol``.
    """
    _check_xi(xi, math.pi / 4)
    if k not in (1, 2, 3, 4):
        raise ValueError("k must be 1, 2, 3 or 4")
    x = int(x)
    a, b = phi.left, phi.right
    z, f, lam = _closed_root(xi, k)
    analytic = float(np.sum(np.abs(_numerator(xi, x, a, b, z, f, lam)) ** 2)) / dgamma_dtheta_sq(xi)

    root = gamma_roots(xi)[k - 1]
    zn = root.z
    _, lam_n, _ = gamma_and_lambdas(xi, zn)
    num = _numerator(xi, x, a, b, zn, f0_tilde(zn), lam_n)
    numeric = float(np.sum(np.abs(num / gamma_prime(xi, zn)) ** 2))
    if abs(analytic - numeric) > tol:
        raise ConsistencyError(
            f"residue routes disagree at x={x}, k={k}: {analytic!r} vs {numeric!r}"
        )
    return analytic


def residue_contributions(xi: float, x: int, phi: Amplitude2) -> list[ResidueContribution]:
    return [ResidueContribution(int(x), k, residue_norm_sq(xi, x, phi, k)) for k in (1, 2, 3, 4)]


def tal_residue_sum(xi: float, x: int, phi: Amplitude2) -> float:
    """``sum_k ||Res(Xi_x phi; theta_k)||^2``; zero for ``xi >= pi/4``."""
    _check_xi(xi)
    if xi >= math.pi / 4:
        return 0.0
    return math.fsum(r.norm_sq for r in residue_contributions(xi, x, phi))


def _tal_closed(xi: float, x: int) -> float:
    s, _ = _sc(xi)
    q = 3 - 2 * SQRT2 * s
    base = 2 * (1 - SQRT2 * s) ** 2 / q ** 2
    if x == 0:
        return base
    return (2 - SQRT2 * s) * base * q ** (-abs(x))


def time_averaged_limit_measure(xi: float, x: int, phi: Amplitude2 | None = None,
                                tol: float = 1e-10) -> float:
    """Time-averaged limit measure at ``x``; independent of the initial qubit.

    ``2(1 - sqrt2 S)^2/q^2`` at the origin and
    ``2(2 - sqrt2 S)(1 - sqrt2 S)^2/q^2 * q^{-|x|}`` elsewhere, ``q = 3 - 2 sqrt2 S``,
    for ``xi < pi/4``; zero otherwise. The closed form is cross-checked
    against the residue sum for ``phi`` (default ``[1, 0]``).

    Raises
    ------
    ConsistencyError
        If closed form and residue sum differ by more than ``tol``.
    """
    _check_xi(xi)
    if xi >= math.pi / 4:
        return 0.0
    closed = _tal_closed(xi, int(x))
    residue = tal_residue_sum(xi, x, phi if phi is not None else Amplitude2(1.0, 0.0))
    if abs(closed - residue) > tol:
        raise ConsistencyError(f"closed form {closed!r} and residue sum {residue!r} differ at x={x}")
    return closed


def tal_total_mass(xi: float) -> float:
    """``sum_x mu_bar(x) = 2(1 - sqrt2 S)/(3 - 2 sqrt2 S)`` for ``xi < pi/4``, else 0."""
    _check_xi(xi)
    if xi >= math.pi / 4:
        return 0.0
    s, _ = _sc(xi)
    return 2 * (1 - SQRT2 * s) / (3 - 2 * SQRT2 * s)
