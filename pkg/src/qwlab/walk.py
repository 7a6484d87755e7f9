"""
Exact amplitude evolution of a two-state quantum walk on the integer line.

The walker carries a left-moving and a right-moving complex amplitude at
every site. One time step applies the site coin ``U_x = P_x + Q_x`` and
shifts the two chiralities in opposite directions::

    Psi_{n+1}(x) = P_{x+1} Psi_n(x+1) + Q_{x-1} Psi_n(x-1)

with ``P_x = [[a_x, b_x], [0, 0]]`` and ``Q_x = [[0, 0], [c_x, d_x]]``.

The lattice is truncated to a window ``[-W, W]``. Starting from a point mass
at the origin the support spreads at unit speed, so as long as the time
index stays ``<= W`` the truncated evolution is exact (no boundary effects).
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from qwlab.errors import DomainError, WindowOverflow

__all__ = [
    "Amplitude2",
    "CoinMatrix",
    "CoinField",
    "WalkState",
    "MeasureProfile",
    "HADAMARD",
    "coin_at",
    "split",
    "point_mass",
    "step",
    "evolve",
    "measure",
    "cesaro_average",
    "origin_amplitudes",
    "amplitude_history",
    "defect_coin",
]

UNITARY_TOL = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class CoinMatrix:
    """A 2x2 unitary coin ``[[a, b], [c, d]]``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self) -> None:
        m = self.as_array()
        err = np.max(np.abs(m @ m.conj().T - np.eye(2)))
        if err > UNITARY_TOL:
            raise ValueError(f"coin is not unitary (|UU^* - I| = {err:.3e})")

    @property
    def det(self) -> complex:
        return complex(self.a * self.d - self.b * self.c)

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @classmethod
    def from_array(cls, m) -> "CoinMatrix":
        m = np.asarray(m, dtype=np.complex128)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))


HADAMARD = CoinMatrix(_INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)


def _check_xi(xi: float) -> None:
    if not (0.0 < xi < math.pi / 2):
        raise DomainError(f"xi must lie in the open interval (0, pi/2), got {xi!r}")


def defect_coin(xi: float) -> CoinMatrix:
    """Reflection coin ``[[cos xi, sin xi], [sin xi, -cos xi]]``.

    At ``xi = pi/4`` this is the Hadamard coin; the exact Hadamard object is
    returned there so that the defect model reduces to the plain Hadamard walk
    bit for bit.
    """
    _check_xi(xi)
    if xi == math.pi / 4:
        return HADAMARD
    c, s = math.cos(xi), math.sin(xi)
    return CoinMatrix(c, s, s, -c)


@dataclass(frozen=True)
class CoinField:
    """Rule assigning a coin to each lattice site.

    Use the constructors :meth:`one_defect`, :meth:`wojcik`, :meth:`hadamard`
    and :meth:`custom` rather than the raw initializer.

    Attributes
    ----------
    kind : str
        One of ``"one-defect"``, ``"wojcik"``, ``"hadamard"``, ``"custom"``.
    param : float or None
        ``xi`` for the one-defect field, ``phi`` for the Wojcik field.
    table : mapping of int to CoinMatrix
        Site overrides for custom fields; every other site gets ``default``.
    """

    kind: str
    param: Optional[float] = None
    table: Mapping[int, CoinMatrix] = field(default_factory=dict)
    default: CoinMatrix = HADAMARD

    @classmethod
    def one_defect(cls, xi: float) -> "CoinField":
        _check_xi(xi)
        return cls("one-defect", float(xi), {0: defect_coin(xi)})

    @classmethod
    def wojcik(cls, phi: float) -> "CoinField":
        if not (0.0 < phi < 1.0):
            raise DomainError(f"Wojcik phase phi must lie in (0, 1), got {phi!r}")
        omega = cmath.exp(2j * math.pi * phi)
        h = HADAMARD
        return cls("wojcik", float(phi), {0: CoinMatrix(omega * h.a, omega * h.b, omega * h.c, omega * h.d)})

    @classmethod
    def hadamard(cls) -> "CoinField":
        return cls("hadamard")

    @classmethod
    def custom(cls, table: Mapping[int, CoinMatrix], default: CoinMatrix = HADAMARD) -> "CoinField":
        return cls("custom", None, dict(table), default)

    def __call__(self, x: int) -> CoinMatrix:
        return self.table.get(int(x), self.default)

    def entries(self, xs: NDArray[np.int64]) -> tuple[NDArray, NDArray, NDArray, NDArray]:
        """Vectorized coin entries ``(a, b, c, d)`` at the sites ``xs``."""
        n = len(xs)
        d0 = self.default
        a = np.full(n, d0.a, dtype=np.complex128)
        b = np.full(n, d0.b, dtype=np.complex128)
        c = np.full(n, d0.c, dtype=np.complex128)
        d = np.full(n, d0.d, dtype=np.complex128)
        lo = int(xs[0]) if n else 0
        for x, coin in self.table.items():
            i = x - lo
            if 0 <= i < n:
                a[i], b[i], c[i], d[i] = coin.a, coin.b, coin.c, coin.d
        return a, b, c, d


def coin_at(field: CoinField, x: int) -> CoinMatrix:
    """Coin ``U_x`` used at site ``x``."""
    return field(x)


def split(coin: CoinMatrix) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Split a coin into its left-move part ``P`` and right-move part ``Q``."""
    p = np.array([[coin.a, coin.b], [0, 0]], dtype=np.complex128)
    q = np.array([[0, 0], [coin.c, coin.d]], dtype=np.complex128)
    return p, q


@dataclass(frozen=True)
class Amplitude2:
    """Two-component chirality amplitude ``(left, right)``."""

    left: complex
    right: complex

    @classmethod
    def normalized(cls, left: complex, right: complex) -> "Amplitude2":
        norm = math.sqrt(abs(left) ** 2 + abs(right) ** 2)
        if norm == 0.0:
            raise ValueError("cannot normalize the zero qubit")
        return cls(complex(left) / norm, complex(right) / norm)

    @property
    def norm_sq(self) -> float:
        return abs(self.left) ** 2 + abs(self.right) ** 2

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.left, self.right], dtype=np.complex128)

    @classmethod
    def from_array(cls, v) -> "Amplitude2":
        return cls(complex(v[0]), complex(v[1]))


@dataclass(frozen=True)
class MeasureProfile:
    """Nonnegative weights on the consecutive sites ``xs``."""

    xs: NDArray[np.int64]
    values: NDArray[np.float64]

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    def __getitem__(self, x: int) -> float:
        i = int(x) - int(self.xs[0])
        if 0 <= i < len(self.xs):
            return float(self.values[i])
        return 0.0

    def as_dict(self) -> dict[int, float]:
        return {int(x): float(v) for x, v in zip(self.xs, self.values)}


@dataclass(frozen=True)
class WalkState:
    """Amplitudes at time ``time`` on the window ``[-window, window]``.

    ``left[i]`` and ``right[i]`` belong to site ``x = i - window``.
    """

    time: int
    window: int
    left: NDArray[np.complex128]
    right: NDArray[np.complex128]

    @property
    def xs(self) -> NDArray[np.int64]:
        return np.arange(-self.window, self.window + 1)

    def amplitude(self, x: int) -> Amplitude2:
        i = int(x) + self.window
        if not 0 <= i <= 2 * self.window:
            return Amplitude2(0j, 0j)
        return Amplitude2(complex(self.left[i]), complex(self.right[i]))

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.left) ** 2 + np.abs(self.right) ** 2))


def point_mass(phi: Amplitude2, window: int) -> WalkState:
    """State at time 0 concentrated at the origin with qubit ``phi``."""
    if window < 1:
        raise ValueError("window must be a positive integer")
    left = np.zeros(2 * window + 1, dtype=np.complex128)
    right = np.zeros_like(left)
    left[window] = phi.left
    right[window] = phi.right
    return WalkState(0, window, left, right)


class _Stepper:
    # Caches the coin entries on a window so repeated steps are pure array work.

    def __init__(self, field: CoinField, window: int):
        xs = np.arange(-window, window + 1)
        self.a, self.b, self.c, self.d = field.entries(xs)

    def __call__(self, left, right):
        new_left = np.zeros_like(left)
        new_right = np.zeros_like(right)
        new_left[:-1] = self.a[1:] * left[1:] + self.b[1:] * right[1:]
        new_right[1:] = self.c[:-1] * left[:-1] + self.d[:-1] * right[:-1]
        return new_left, new_right


def step(state: WalkState, field: CoinField) -> WalkState:
    """Advance the walk by one time step."""
    return evolve(state, field, 1)


def evolve(state: WalkState, field: CoinField, n: int) -> WalkState:
    """Advance the walk by ``n`` time steps.

    Raises
    ------
    WindowOverflow
        If ``state.time + n`` exceeds the window half-width.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if state.time + n > state.window:
        raise WindowOverflow(
            f"time {state.time + n} would exceed window {state.window}; "
            "use a window of at least the final time"
        )
    if n == 0:
        return state
    stepper = _Stepper(field, state.window)
    left, right = state.left, state.right
    for _ in range(n):
        left, right = stepper(left, right)
    return WalkState(state.time + n, state.window, left, right)


def measure(state: WalkState) -> MeasureProfile:
    """Position measure ``mu(x) = |Psi^L(x)|^2 + |Psi^R(x)|^2``."""
    values = np.abs(state.left) ** 2 + np.abs(state.right) ** 2
    return MeasureProfile(state.xs, values)


def cesaro_average(field: CoinField, phi: Amplitude2, N: int,
                   window: Optional[int] = None) -> MeasureProfile:
    """Average of the position measures at times ``0, ..., N-1``.

    Starts from the point mass at the origin with qubit ``phi``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if abs(phi.norm_sq - 1.0) > 1e-12:
        raise ValueError("initial qubit must be normalized")
    window = N + 1 if window is None else window
    if window < N:
        raise WindowOverflow(f"window {window} too small for N = {N}")
    state = point_mass(phi, window)
    stepper = _Stepper(field, window)
    acc = np.zeros(2 * window + 1)
    left, right = state.left, state.right
    for t in range(N):
        acc += np.abs(left) ** 2 + np.abs(right) ** 2
        if t + 1 < N:
            left, right = stepper(left, right)
    return MeasureProfile(state.xs, acc / N)


def origin_amplitudes(field: CoinField, phi: Amplitude2, n_max: int) -> NDArray[np.complex128]:
    """Amplitudes ``Psi_t(0)`` for ``t = 0..n_max`` as an ``(n_max+1, 2)`` array."""
    window = max(n_max, 1)
    state = point_mass(phi, window)
    stepper = _Stepper(field, window)
    out = np.empty((n_max + 1, 2), dtype=np.complex128)
    left, right = state.left, state.right
    for t in range(n_max + 1):
        out[t] = left[window], right[window]
        if t < n_max:
            left, right = stepper(left, right)
    return out


def amplitude_history(field: CoinField, phi: Amplitude2, n_max: int) -> list[WalkState]:
    """All states from time 0 to ``n_max`` on the window ``[-n_max, n_max]``."""
    window = max(n_max, 1)
    state = point_mass(phi, window)
    stepper = _Stepper(field, window)
    states = [state]
    left, right = state.left, state.right
    for t in range(1, n_max + 1):
        left, right = stepper(left, right)
        states.append(WalkState(t, window, left, right))
    return states
