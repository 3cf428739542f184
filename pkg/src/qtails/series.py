"""Truncated power series in q with exact integer coefficients.

A :class:`TruncatedSeries` of order ``N`` stores the coefficients of
``q^0 .. q^N`` and represents an element of Z[[q]] modulo q^(N+1).  Binary
operations truncate to the smaller operand order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class NonUnitConstantTerm(ArithmeticError):
    """Raised when inverting a series whose constant term is not +1 or -1."""


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a truncated series needs at least one coefficient")
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], order: Optional[int] = None) -> "TruncatedSeries":
        """Build a series from a coefficient list, padding or cutting to ``order``."""
        cs = [int(c) for c in coeffs]
        if order is None:
            order = max(len(cs) - 1, 0)
        cs = cs[: order + 1]
        cs.extend([0] * (order + 1 - len(cs)))
        return cls(tuple(cs))

    @classmethod
    def monomial(cls, exponent: int, order: int, coefficient: int = 1) -> "TruncatedSeries":
        cs = [0] * (order + 1)
        if 0 <= exponent <= order:
            cs[exponent] = coefficient
        return cls(tuple(cs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[: order + 1])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, -other)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return mul(self, other)

    def __pow__(self, k: int) -> "TruncatedSeries":
        if k < 0:
            return invert(self) ** (-k)
        result = one(self.order)
        base = self
        while k:
            if k & 1:
                result = mul(result, base)
            base = mul(base, base)
            k >>= 1
        return result

    def __str__(self) -> str:
        return format_series(self.coeffs)


def format_series(coeffs: Sequence[int], var: str = "q") -> str:
    """Render coefficients as ``1 - q + q^3``; the zero series renders as ``0``."""
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def zero(order: int) -> TruncatedSeries:
    return TruncatedSeries((0,) * (order + 1))


def one(order: int) -> TruncatedSeries:
    return TruncatedSeries((1,) + (0,) * order)


def add(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    n = min(x.order, y.order) + 1
    return TruncatedSeries(tuple(a + b for a, b in zip(x.coeffs[:n], y.coeffs[:n])))


def mul(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the smaller order."""
    order = min(x.order, y.order)
    xs = x.coeffs
    ys = y.coeffs
    out = [0] * (order + 1)
    for i in range(order + 1):
        a = xs[i]
        if not a:
            continue
        for j in range(order + 1 - i):
            b = ys[j]
            if b:
                out[i + j] += a * b
    return TruncatedSeries(tuple(out))


def invert(x: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse of a series with constant term +1 or -1."""
    c0 = x.coeffs[0]
    if c0 not in (1, -1):
        raise NonUnitConstantTerm(f"constant term {c0} is not a unit in Z")
    xs = x.coeffs
    ys = [c0]
    for n in range(1, x.order + 1):
        s = 0
        for k in range(1, n + 1):
            if xs[k]:
                s += xs[k] * ys[n - k]
        ys.append(-c0 * s)
    return TruncatedSeries(tuple(ys))


def first_difference(x: TruncatedSeries, y: TruncatedSeries) -> Optional[int]:
    """Smallest index where ``x`` and ``y`` differ, or None through the common order."""
    for i, (a, b) in enumerate(zip(x.coeffs, y.coeffs)):
        if a != b:
            return i
    return None


def _times_one_minus_qk(cs: list[int], k: int) -> None:
    # in place: cs *= (1 - q^k)
    for n in range(len(cs) - 1, k - 1, -1):
        cs[n] -= cs[n - k]


def qpoch_finite(j: int, m: int, order: int) -> TruncatedSeries:
    """(q^j; q)_m, the product of (1 - q^(j+k-1)) for k = 1..m."""
    if j < 1 or m < 0:
        raise ValueError(f"need j >= 1 and m >= 0, got j={j}, m={m}")
    cs = [1] + [0] * order
    for k in range(j, min(j + m - 1, order) + 1):
        _times_one_minus_qk(cs, k)
    return TruncatedSeries(tuple(cs))


def qpoch_infinite_power(j: int, c: int, order: int) -> TruncatedSeries:
    """(q^j; q)_oo ** c truncated at ``order``; negative ``c`` goes through :func:`invert`."""
    if j < 1:
        raise ValueError(f"need j >= 1, got {j}")
    cs = [1] + [0] * order
    for _ in range(abs(c)):
        for k in range(j, order + 1):
            _times_one_minus_qk(cs, k)
    result = TruncatedSeries(tuple(cs))
    return invert(result) if c < 0 else result


@dataclass(frozen=True)
class ThetaParams:
    b: int

    def __post_init__(self):
        if self.b < 1:
            raise ValueError(f"h_b needs b >= 1, got {self.b}")

    def sign(self, n: int) -> int:
        if self.b % 2:
            return -1 if n % 2 else 1
        return 1 if n >= 0 else -1

    def exponent(self, n: int) -> int:
        return self.b * n * (n + 1) // 2 - n


def h_series(p: ThetaParams | int, order: int) -> TruncatedSeries:
    """The theta (b odd) or false theta (b even) series h_b.

    Sums sign_b(n) q^(b n (n+1)/2 - n) over all integers n.  The exponent is
    increasing in n for n >= 0 and decreasing for n <= -1, so each direction
    stops at the first exponent past ``order``.
    """
    if isinstance(p, int):
        p = ThetaParams(p)
    cs = [0] * (order + 1)
    n = 0
    while (e := p.exponent(n)) <= order:
        cs[e] += p.sign(n)
        n += 1
    n = -1
    while (e := p.exponent(n)) <= order:
        cs[e] += p.sign(n)
        n -= 1
    return TruncatedSeries(tuple(cs))
