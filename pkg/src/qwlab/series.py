"""
Truncated formal power series and the first-return generating functions.

Coefficients are stored exactly (``fractions.Fraction``) for every series the
walk produces here; the arithmetic itself is coefficient-type agnostic, so a
series of floats or complex numbers works the same way.

A series carries its truncation order ``T``: coefficients ``0..T`` are known
and everything beyond is undetermined. Binary operations keep the smaller of
the two orders.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from qwlab.errors import BadLeadingCoefficient

__all__ = [
    "DEFAULT_ORDER",
    "PowerSeries",
    "ps_add",
    "ps_mul",
    "ps_sqrt",
    "ps_inverse",
    "sqrt_one_plus_z4",
    "rstar_series",
    "rstar_closed",
    "first_return_series_plus",
    "first_return_series_minus",
    "z_of_w_series",
]

DEFAULT_ORDER = 256


class PowerSeries:
    """Immutable truncated power series ``sum_{n<=T} c_n z^n``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable, order: int | None = None):
        c = list(coeffs)
        if order is not None:
            if order < 0:
                raise ValueError("order must be nonnegative")
            c = (c + [Fraction(0)] * (order + 1 - len(c)))[: order + 1]
        if not c:
            raise ValueError("a power series needs at least the constant term")
        self._c = tuple(c)

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> "PowerSeries":
        return cls([value], order)

    @classmethod
    def monomial(cls, power: int, order: int = DEFAULT_ORDER, coeff=Fraction(1)) -> "PowerSeries":
        c = [Fraction(0)] * (order + 1)
        if power <= order:
            c[power] = coeff
        return cls(c)

    @classmethod
    def from_dict(cls, terms: dict[int, object], order: int = DEFAULT_ORDER) -> "PowerSeries":
        c = [Fraction(0)] * (order + 1)
        for k, v in terms.items():
            if 0 <= k <= order:
                c[k] = v
        return cls(c)

    # -- access -----------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> tuple:
        return self._c

    def __getitem__(self, n: int):
        if n < 0 or n > self.order:
            raise IndexError(f"coefficient {n} outside 0..{self.order}")
        return self._c[n]

    def __len__(self) -> int:
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __repr__(self) -> str:
        head = ", ".join(str(v) for v in self._c[:8])
        more = ", ..." if len(self._c) > 8 else ""
        return f"PowerSeries([{head}{more}], order={self.order})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(self._c)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self._c[: order + 1], order)

    def map(self, fn) -> "PowerSeries":
        """Apply ``fn`` to every coefficient (e.g. ``float`` to leave exact arithmetic)."""
        return PowerSeries([fn(v) for v in self._c])

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            c = list(self._c)
            c[0] = c[0] + other
            return PowerSeries(c)
        t = min(self.order, other.order)
        return PowerSeries([self._c[k] + other._c[k] for k in range(t + 1)])

    __radd__ = __add__

    def __neg__(self) -> "PowerSeries":
        return PowerSeries([-v for v in self._c])

    def __sub__(self, other) -> "PowerSeries":
        return self + (-other)

    def __rsub__(self, other) -> "PowerSeries":
        return (-self) + other

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries([v * other for v in self._c])
        return PowerSeries(_convolve(self._c, other._c, min(self.order, other.order)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PowerSeries":
        if isinstance(other, PowerSeries):
            return self * ps_inverse(other)
        return PowerSeries([v / other for v in self._c])

    def shift(self, k: int) -> "PowerSeries":
        """Multiply by ``z**k``; negative ``k`` divides and needs zero low terms.

        The order moves with the shift: dividing by ``z`` loses one known
        coefficient at the top.
        """
        if k >= 0:
            return PowerSeries([Fraction(0)] * k + list(self._c))
        k = -k
        if any(v != 0 for v in self._c[:k]):
            raise ValueError(f"cannot divide by z^{k}: low coefficients are nonzero")
        if k > self.order:
            raise ValueError("shift leaves no known coefficients")
        return PowerSeries(self._c[k:])


def _convolve(a: Sequence, b: Sequence, t: int) -> list:
    # Zero coefficients are skipped: the walk's series are sparse (in z^4).
    zero = a[0] * 0
    out = [zero] * (t + 1)
    nz_b = [(j, v) for j, v in enumerate(b[: t + 1]) if v != 0]
    for i in range(t + 1):
        ai = a[i]
        if ai == 0:
            continue
        lim = t - i
        for j, bj in nz_b:
            if j > lim:
                break
            out[i + j] += ai * bj
    return out


def ps_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Coefficientwise sum, truncated to the smaller order."""
    return a + b


def ps_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated to the smaller order."""
    return a * b


def ps_inverse(a: PowerSeries) -> PowerSeries:
    """Multiplicative inverse; needs a nonzero constant term."""
    a0 = a[0]
    if a0 == 0:
        raise BadLeadingCoefficient("series with zero constant term has no inverse")
    t = a.order
    g = PowerSeries([1 / a0])
    prec = 1
    while prec < t + 1:
        prec = min(2 * prec, t + 1)
        at = a.truncate(prec - 1)
        gt = PowerSeries(g.coeffs, prec - 1)
        g = gt * (2 - at * gt)
    return g


def ps_sqrt(a: PowerSeries) -> PowerSeries:
    """Principal square root ``s`` with ``s(0) = 1`` and ``s*s = a`` up to ``T``.

    Newton's iteration ``s <- (s + a/s)/2`` doubles the number of correct
    coefficients per round.

    Raises
    ------
    BadLeadingCoefficient
        If ``a(0) != 1``.
    """
    if a[0] != 1:
        raise BadLeadingCoefficient(f"sqrt needs constant term 1, got {a[0]!r}")
    t = a.order
    one = a[0]
    s = PowerSeries([one])
    prec = 1
    while prec < t + 1:
        prec = min(2 * prec, t + 1)
        at = a.truncate(prec - 1)
        st = PowerSeries(s.coeffs, prec - 1)
        s = (st + at * ps_inverse(st)) * Fraction(1, 2)
    return s


def sqrt_one_plus_z4(order: int = DEFAULT_ORDER) -> PowerSeries:
    """``sqrt(1 + z^4)`` to order ``order``."""
    return ps_sqrt(PowerSeries.from_dict({0: Fraction(1), 4: Fraction(1)}, order))


def first_return_series_plus(order: int = DEFAULT_ORDER) -> PowerSeries:
    """First-return weights on the right half-line: ``(-1 + sqrt(1 + z^4)) / z``.

    Coefficient ``n`` is the ``R``-component of the summed products of
    Hadamard moves for walks that start at site 1, stay on ``x >= 1`` and
    first reach the origin at time ``n``.
    """
    if order < 1:
        raise ValueError("order must be at least 1")
    num = sqrt_one_plus_z4(order + 1) - 1
    return num.shift(-1)


def first_return_series_minus(order: int = DEFAULT_ORDER) -> PowerSeries:
    """Left half-line companion ``(1 - sqrt(1 + z^4)) / z``; the negation of the plus series."""
    return -first_return_series_plus(order)


def rstar_series(order: int = DEFAULT_ORDER) -> PowerSeries:
    """Return-block weights ``(-1 - z^2 + sqrt(1 + z^4)) / z``."""
    if order < 1:
        raise ValueError("order must be at least 1")
    z2 = PowerSeries.monomial(2, order + 1)
    num = sqrt_one_plus_z4(order + 1) - 1 - z2
    return num.shift(-1)


def rstar_closed(n: int) -> Fraction:
    """Closed form of the ``n``-th return-block weight.

    ``-1`` at ``n = 1``, zero unless ``n = 4m - 1``, and
    ``(-1)^(m-1) (2m-2)! / (2^(2m-1) (m-1)! m!)`` at ``n = 4m - 1``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n == 1:
        return Fraction(-1)
    if (n + 1) % 4:
        return Fraction(0)
    m = (n + 1) // 4
    mag = Fraction(math.factorial(2 * m - 2),
                   2 ** (2 * m - 1) * math.factorial(m - 1) * math.factorial(m))
    return mag if m % 2 == 1 else -mag


def z_of_w_series(order: int = DEFAULT_ORDER) -> PowerSeries:
    """``Z(w) = -1 - w + sqrt(1 + w^2)``, the return-block series in ``w = z^2``."""
    s = ps_sqrt(PowerSeries.from_dict({0: Fraction(1), 2: Fraction(1)}, order))
    return s - 1 - PowerSeries.monomial(1, order)
