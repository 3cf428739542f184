"""Nested q-multisums and their truncated evaluation.

A multisum runs over all points x of the non-negative integer lattice and adds

    (-1)^sign(x) * q^exponent(x) * prod (q)_{num_k(x)} / prod (q)_{den_k(x)}

where ``exponent`` is a rational quadratic form and the Pochhammer subscripts
are integer linear forms.  A term with any negative subscript is zero.

:func:`evaluate` walks the lattice depth first and prunes a branch once a lower
bound on every exponent below it exceeds the truncation order.
:func:`evaluate_naive` is the unpruned reference used to cross-check it.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

import numpy as np

from .series import TruncatedSeries, invert, mul, one, qpoch_finite, zero

_INT64_LIMIT = 2**63 - 1


class InvalidSpec(ValueError):
    """A multisum description that violates a structural requirement."""


class UnboundedVariable(InvalidSpec):
    """A summation variable whose exponent does not grow, so the sum cannot be truncated."""


@dataclass(frozen=True)
class LinearForm:
    """Integer linear form ``sum c_i x_i + constant`` over summation variables."""

    coefficients: tuple[tuple[int, int], ...] = ()
    constant: int = 0

    def __post_init__(self):
        if isinstance(self.coefficients, Mapping):
            items = self.coefficients.items()
        else:
            items = self.coefficients
        merged: dict[int, int] = {}
        for i, c in items:
            if int(c) != c:
                raise InvalidSpec(f"linear form coefficient {c!r} is not an integer")
            merged[int(i)] = merged.get(int(i), 0) + int(c)
        canon = tuple(sorted((i, c) for i, c in merged.items() if c))
        object.__setattr__(self, "coefficients", canon)
        if int(self.constant) != self.constant:
            raise InvalidSpec(f"linear form constant {self.constant!r} is not an integer")
        object.__setattr__(self, "constant", int(self.constant))

    @classmethod
    def of(cls, *indices: int, constant: int = 0) -> "LinearForm":
        """Sum of the given variables (repeats add up) plus a constant."""
        return cls(tuple((i, 1) for i in indices), constant)

    def __call__(self, point: Sequence[int]) -> int:
        return self.constant + sum(c * point[i] for i, c in self.coefficients)

    def variables(self) -> set[int]:
        return {i for i, _ in self.coefficients}


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QuadraticExponent:
    """Rational quadratic polynomial in the summation variables.

    ``quad`` maps index pairs ``(i, j)`` with ``i <= j`` to coefficients, so
    ``(i, i)`` is the square term and ``(i, j)`` the cross term x_i x_j.
    """

    quad: tuple[tuple[tuple[int, int], Fraction], ...] = ()
    linear: tuple[tuple[int, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        quad: dict[tuple[int, int], Fraction] = {}
        items = self.quad.items() if isinstance(self.quad, Mapping) else self.quad
        for (i, j), c in items:
            key = (min(i, j), max(i, j))
            quad[key] = quad.get(key, Fraction(0)) + _frac(c)
        lin: dict[int, Fraction] = {}
        items = self.linear.items() if isinstance(self.linear, Mapping) else self.linear
        for i, c in items:
            lin[i] = lin.get(i, Fraction(0)) + _frac(c)
        object.__setattr__(self, "quad", tuple(sorted((k, v) for k, v in quad.items() if v)))
        object.__setattr__(self, "linear", tuple(sorted((k, v) for k, v in lin.items() if v)))
        object.__setattr__(self, "constant", _frac(self.constant))

    def diagonal(self, i: int) -> Fraction:
        return dict(self.quad).get((i, i), Fraction(0))

    def linear_coefficient(self, i: int) -> Fraction:
        return dict(self.linear).get(i, Fraction(0))

    def cross_terms(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, c) for (i, j), c in self.quad if i != j]

    def variables(self) -> set[int]:
        out = {i for i, _ in self.linear}
        for (i, j), _ in self.quad:
            out.update((i, j))
        return out

    def __call__(self, point: Sequence[int]) -> Fraction:
        total = self.constant
        for (i, j), c in self.quad:
            total += c * point[i] * point[j]
        for i, c in self.linear:
            total += c * point[i]
        return total

    def denominator(self) -> int:
        """Least common denominator of all coefficients."""
        d = self.constant.denominator
        for _, c in self.quad:
            d = math.lcm(d, c.denominator)
        for _, c in self.linear:
            d = math.lcm(d, c.denominator)
        return d


@dataclass(frozen=True)
class MultisumSpec:
    nvars: int
    exponent: QuadraticExponent = field(default_factory=QuadraticExponent)
    sign: LinearForm = field(default_factory=LinearForm)
    numerator_pochhammers: tuple[LinearForm, ...] = ()
    denominator_pochhammers: tuple[LinearForm, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "numerator_pochhammers", tuple(self.numerator_pochhammers))
        object.__setattr__(self, "denominator_pochhammers", tuple(self.denominator_pochhammers))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.nvars)))
        else:
            object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != self.nvars:
            raise InvalidSpec(f"{len(self.names)} names for {self.nvars} variables")
        if len(set(self.names)) != self.nvars:
            raise InvalidSpec(f"repeated variable name in {self.names}")
        used = self.exponent.variables() | self.sign.variables()
        for form in self.numerator_pochhammers + self.denominator_pochhammers:
            used |= form.variables()
        bad = [i for i in used if not 0 <= i < self.nvars]
        if bad:
            raise InvalidSpec(f"variable indices {sorted(bad)} outside 0..{self.nvars - 1}")
        for i, j, c in self.exponent.cross_terms():
            if c < 0:
                raise InvalidSpec(
                    f"negative cross coefficient {c} on {self.names[i]}*{self.names[j]}"
                )


@dataclass
class EnumerationStats:
    points_visited: int = 0
    points_contributing: int = 0
    elapsed: float = 0.0


def integrality_check(e: QuadraticExponent, nvars: Optional[int] = None) -> bool:
    """True iff ``e`` takes integer values on every non-negative integer point.

    A quadratic with integer values at 0, e_i, 2 e_i and e_i + e_j is an integer
    combination of binomials in the coordinates, so these points decide it.
    """
    if nvars is None:
        nvars = max(e.variables(), default=-1) + 1
    zero_pt = [0] * nvars

    def at(*idx):
        p = list(zero_pt)
        for i in idx:
            p[i] += 1
        return e(p)

    if at().denominator != 1:
        return False
    for i in range(nvars):
        if at(i).denominator != 1 or at(i, i).denominator != 1:
            return False
        for j in range(i + 1, nvars):
            if at(i, j).denominator != 1:
                return False
    return True


MONOTONE = "monotone"
DIAGONAL_BOUNDED = "diagonal-bounded"


def strategy_check(s: MultisumSpec) -> list[str]:
    """Per-variable enumeration strategy.

    A variable is monotone when its square and linear coefficients are both
    non-negative; the exponent then never decreases as it grows.  A negative
    linear coefficient needs a positive square term to bound it.
    """
    out = []
    for i in range(s.nvars):
        d = s.exponent.diagonal(i)
        lin = s.exponent.linear_coefficient(i)
        name = s.names[i]
        if d < 0:
            raise UnboundedVariable(f"variable {name} has negative square coefficient {d}")
        if d == 0 and lin < 0:
            raise UnboundedVariable(f"variable {name} has negative linear coefficient and no square term")
        if d == 0 and lin == 0:
            raise UnboundedVariable(f"exponent does not grow with variable {name}")
        out.append(MONOTONE if lin >= 0 else DIAGONAL_BOUNDED)
    return out


def _univariate_min(d: Fraction, lin: Fraction) -> Fraction:
    """min over integers x >= 0 of d x^2 + lin x, for d >= 0."""
    if lin >= 0:
        return Fraction(0)
    # d > 0 here; the integer minimiser is next to the real vertex
    v = -lin / (2 * d)
    lo = math.floor(v)
    return min(d * x * x + lin * x for x in (lo, lo + 1) if x >= 0)


def univariate_box(s: MultisumSpec, order: int) -> list[int]:
    """Per-variable upper bounds containing every point with exponent <= ``order``.

    Cross coefficients are non-negative, so a point's exponent is at least its
    own univariate part plus the minima of the others.
    """
    strategy_check(s)
    ds = [s.exponent.diagonal(i) for i in range(s.nvars)]
    ls = [s.exponent.linear_coefficient(i) for i in range(s.nvars)]
    mins = [_univariate_min(d, lin) for d, lin in zip(ds, ls)]
    total_min = s.exponent.constant + sum(mins)
    box = []
    for i in range(s.nvars):
        slack = order - (total_min - mins[i])
        x = 0
        while True:
            nxt = x + 1
            val = ds[i] * nxt * nxt + ls[i] * nxt
            grows = ds[i] * (2 * nxt + 1) + ls[i] >= 0
            if val > slack and grows:
                break
            x = nxt
        # x is the last value whose univariate part is within the slack
        box.append(x)
    return box


def validate(s: MultisumSpec) -> list[str]:
    if not integrality_check(s.exponent, s.nvars):
        raise InvalidSpec("exponent is not integer-valued on the lattice")
    return strategy_check(s)


# -- term assembly (series-core arithmetic only; used by the naive oracle) --


def term_series(s: MultisumSpec, point: Sequence[int], order: int) -> TruncatedSeries:
    """The exact contribution of one lattice point, truncated at ``order``."""
    point = list(point)
    nums = [f(point) for f in s.numerator_pochhammers]
    dens = [f(point) for f in s.denominator_pochhammers]
    if any(m < 0 for m in nums + dens):
        return zero(order)
    e = s.exponent(point)
    if e.denominator != 1:
        raise InvalidSpec(f"non-integer exponent {e} at {point}")
    e = int(e)
    if e > order:
        return zero(order)
    if e < 0:
        raise InvalidSpec(f"negative exponent {e} at {point}")
    sgn = -1 if s.sign(point) % 2 else 1
    rest = order - e
    t = one(rest)
    for m in nums:
        t = mul(t, qpoch_finite(1, m, rest))
    for m in dens:
        t = mul(t, invert(qpoch_finite(1, m, rest)))
    return TruncatedSeries((0,) * e + tuple(sgn * c for c in t.coeffs))


def evaluate_naive(
    s: MultisumSpec, order: int, box: Optional[Sequence[int]] = None
) -> TruncatedSeries:
    """Plain nested loop over ``box`` adding every term, without pruning."""
    if box is None:
        box = univariate_box(s, order) if s.nvars else []
    acc = [0] * (order + 1)
    for point in itertools.product(*(range(b + 1) for b in box)):
        t = term_series(s, point, order)
        for i, c in enumerate(t.coeffs):
            acc[i] += c
    return TruncatedSeries(tuple(acc))


# -- pruned evaluation --


class _PochCache:
    """Truncated (q)_m and 1/(q)_m, built incrementally and shared across terms."""

    def __init__(self, order: int, dtype):
        self.order = order
        self.dtype = dtype
        self._inv = [[1] + [0] * order]
        self._fin = [[1] + [0] * order]
        self._inv_arr: dict[int, np.ndarray] = {}
        self._fin_arr: dict[int, np.ndarray] = {}

    def _key(self, m: int) -> int:
        # (1 - q^k) is 1 modulo q^(order+1) once k > order
        return min(m, self.order)

    def inverse(self, m: int) -> np.ndarray:
        m = self._key(m)
        arr = self._inv_arr.get(m)
        if arr is None:
            while len(self._inv) <= m:
                k = len(self._inv)
                cs = list(self._inv[-1])
                for n in range(k, self.order + 1):
                    cs[n] += cs[n - k]
                self._inv.append(cs)
            arr = np.array(self._inv[m], dtype=self.dtype)
            self._inv_arr[m] = arr
        return arr

    def finite(self, m: int) -> np.ndarray:
        m = self._key(m)
        arr = self._fin_arr.get(m)
        if arr is None:
            while len(self._fin) <= m:
                k = len(self._fin)
                cs = list(self._fin[-1])
                for n in range(self.order, k - 1, -1):
                    cs[n] -= cs[n - k]
                self._fin.append(cs)
            arr = np.array(self._fin[m], dtype=self.dtype)
            self._fin_arr[m] = arr
        return arr


def coefficient_bound(s: MultisumSpec, order: int) -> int:
    """Bound on |coefficient| of any single term and of any partial product of its factors.

    Coefficientwise, |(q)_m| <= prod (1 + q^k) and |1/(q)_m| <= 1/(q)_oo, so the
    product of these majorants over all factors dominates every term.
    """
    cs = [1] + [0] * order
    for _ in s.numerator_pochhammers:
        for k in range(1, order + 1):
            for n in range(order, k - 1, -1):
                cs[n] += cs[n - k]
    for _ in s.denominator_pochhammers:
        for k in range(1, order + 1):
            for n in range(k, order + 1):
                cs[n] += cs[n - k]
    return max(cs)


class _Plan:
    """Scaled integer data for the depth-first walk over a fixed variable order."""

    def __init__(self, s: MultisumSpec, order: int, perm: Sequence[int]):
        ex = s.exponent
        self.D = D = ex.denominator()
        self.order = order
        self.nvars = n = s.nvars
        self.perm = list(perm)
        pos = {v: d for d, v in enumerate(self.perm)}
        self.diag = [int(ex.diagonal(v) * D) for v in self.perm]
        self.lin = [int(ex.linear_coefficient(v) * D) for v in self.perm]
        self.const = int(ex.constant * D)
        # cross[d] lists (earlier depth, scaled coefficient)
        self.cross: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for i, j, c in ex.cross_terms():
            di, dj = pos[i], pos[j]
            if di > dj:
                di, dj = dj, di
            self.cross[dj].append((di, int(c * D)))
        umins = [
            int(_univariate_min(ex.diagonal(v), ex.linear_coefficient(v)) * D) for v in self.perm
        ]
        # tail[d] = sum of minima of the variables at depth > d
        self.tail = [sum(umins[d + 1:]) for d in range(n)]
        self.sign = [dict(s.sign.coefficients).get(v, 0) % 2 for v in self.perm]
        self.sign_const = s.sign.constant % 2

        def remap(form: LinearForm) -> tuple[int, tuple[tuple[int, int], ...]]:
            terms = tuple((pos[i], c) for i, c in form.coefficients)
            depth = max((d for d, _ in terms), default=-1)
            return depth, terms

        self.const_factors: list[tuple[bool, int]] = []
        self.factors: list[list[tuple[bool, LinearForm, tuple]]] = [[] for _ in range(n)]
        for is_num, forms in ((True, s.numerator_pochhammers), (False, s.denominator_pochhammers)):
            for form in forms:
                depth, terms = remap(form)
                if depth < 0:
                    self.const_factors.append((is_num, form.constant))
                else:
                    self.factors[depth].append((is_num, form.constant, terms))


def default_variable_order(s: MultisumSpec) -> list[int]:
    """Order the walk so that tightly bounded variables come first.

    Variables with a large square coefficient take few values, and placing
    them early lets each branch complete its Pochhammer factors sooner.
    """
    ex = s.exponent
    return sorted(
        range(s.nvars),
        key=lambda v: (-ex.diagonal(v), -ex.linear_coefficient(v), v),
    )


def evaluate(
    s: MultisumSpec,
    order: int,
    *,
    prune: bool = True,
    variable_order: Optional[Sequence[int]] = None,
) -> tuple[TruncatedSeries, EnumerationStats]:
    """Exact truncated value of the multisum, with enumeration statistics.

    With ``prune`` off, every variable runs over its full univariate box and
    only terms beyond the truncation order are dropped.
    """
    t0 = time.perf_counter()
    validate(s)
    stats = EnumerationStats()
    perm = list(default_variable_order(s) if variable_order is None else variable_order)
    if sorted(perm) != list(range(s.nvars)):
        raise ValueError(f"variable order {perm} is not a permutation of 0..{s.nvars - 1}")
    plan = _Plan(s, order, perm)
    bound = coefficient_bound(s, order)
    dtype = np.int64 if bound <= _INT64_LIMIT // 4 else object
    # leaves accumulated in int64 before spilling into exact Python integers
    flush_every = max(1, _INT64_LIMIT // max(bound, 1) - 1) if dtype is np.int64 else 0
    cache = _PochCache(order, dtype)
    total = [0] * (order + 1)
    acc = np.zeros(order + 1, dtype=dtype)
    pending = 0

    D = plan.D
    DN = D * order
    n = plan.nvars
    box = univariate_box(s, order) if not prune and n else None

    start = np.zeros(order + 1, dtype=dtype)
    start[0] = 1
    for is_num, m in plan.const_factors:
        if m < 0:
            stats.elapsed = time.perf_counter() - t0
            return TruncatedSeries((0,) * (order + 1)), stats
        f = cache.finite(m) if is_num else cache.inverse(m)
        start = np.convolve(start, f)[: order + 1]

    xs = [0] * n

    def emit(prod: np.ndarray, e_scaled: int, parity: int):
        nonlocal acc, pending
        if e_scaled % D:
            raise InvalidSpec(f"non-integer exponent at {xs}")
        e = e_scaled // D
        if e < 0:
            raise InvalidSpec(f"negative exponent {e} at a lattice point")
        stats.points_contributing += 1
        width = order + 1 - e
        if parity:
            acc[e:] -= prod[:width]
        else:
            acc[e:] += prod[:width]
        pending += 1
        if dtype is np.int64 and pending >= flush_every:
            for i, c in enumerate(acc.tolist()):
                total[i] += c
            acc = np.zeros(order + 1, dtype=dtype)
            pending = 0

    if n == 0:
        stats.points_visited = 1
        if plan.const <= DN:
            emit(start, plan.const, plan.sign_const)
    else:
        diag, lin, cross, tail = plan.diag, plan.lin, plan.cross, plan.tail
        sgn, factors = plan.sign, plan.factors

        def walk(d: int, e_prefix: int, prod: np.ndarray, parity: int):
            q2 = diag[d]
            lin_eff = lin[d] + sum(c * xs[p] for p, c in cross[d])
            rest = tail[d]
            last = d == n - 1
            fs = factors[d]
            limit = box[perm[d]] if box is not None else None
            x = 0
            while True:
                if limit is not None and x > limit:
                    break
                e = e_prefix + q2 * x * x + lin_eff * x
                lb = e + rest
                if lb > DN and (prune or last):
                    if limit is None and q2 * (2 * x + 1) + lin_eff >= 0:
                        break
                    x += 1
                    continue
                stats.points_visited += 1
                xs[d] = x
                width = order + 1 - min(-(-lb // D), order)
                p = prod
                ok = True
                if fs:
                    p = prod[:width]
                    for is_num, c0, terms in fs:
                        m = c0 + sum(c * xs[t] for t, c in terms)
                        if m < 0:
                            ok = False
                            break
                        f = cache.finite(m) if is_num else cache.inverse(m)
                        p = np.convolve(p, f[:width])[:width]
                if ok:
                    par = parity ^ (sgn[d] & x)
                    if last:
                        emit(p, e, par)
                    else:
                        walk(d + 1, e, p, par)
                x += 1
            xs[d] = 0

        walk(0, plan.const, start, plan.sign_const)

    for i, c in enumerate(acc.tolist()):
        total[i] += c
    stats.elapsed = time.perf_counter() - t0
    return TruncatedSeries(tuple(int(c) for c in total)), stats
