"""Nested multisums: building a spec, pruned enumeration and the naive oracle."""

from fractions import Fraction

from qtails.multisum import (
    LinearForm,
    MultisumSpec,
    QuadraticExponent,
    evaluate,
    evaluate_naive,
    integrality_check,
    strategy_check,
)
from qtails.series import qpoch_infinite_power

# sum_n q^(n^2) / (q)_n, the first Rogers-Ramanujan sum
rr = MultisumSpec(
    1,
    QuadraticExponent({(0, 0): 1}),
    denominator_pochhammers=(LinearForm.of(0),),   # (q)_n
    names=("n",),
)
series, stats = evaluate(rr, 25)
print(series)
print(stats)

# compare with partitions into parts congruent to 1 or 4 mod 5
parts = [k for k in range(1, 26) if k % 5 in (1, 4)]
counts = [1] + [0] * 25
for p in parts:
    for n in range(p, 26):
        counts[n] += counts[n - p]
print(series.coeffs == tuple(counts))

# half-integer coefficients are fine as long as the exponent is integral
e = QuadraticExponent({(0, 0): Fraction(5, 2)}, {0: Fraction(3, 2)})
print(integrality_check(e))              # True
print(integrality_check(QuadraticExponent({}, {0: Fraction(1, 2)})))   # False

# sum_n q^n / (q)_n = 1/(q)_inf
spec = MultisumSpec(1, QuadraticExponent({}, {0: 1}), denominator_pochhammers=(LinearForm.of(0),))
print(strategy_check(spec))
print(evaluate(spec, 20)[0] == qpoch_infinite_power(1, -1, 20))

# the brute-force evaluator sees the same thing, only slower
two = MultisumSpec(
    2,
    QuadraticExponent({(0, 0): 1, (1, 1): 1, (0, 1): 1}, {0: 1, 1: 1}),
    denominator_pochhammers=(LinearForm.of(0), LinearForm.of(1), LinearForm.of(0, 1)),   # (q)_a (q)_b (q)_{a+b}
    names=("a", "b"),
)
fast, st = evaluate(two, 15)
slow = evaluate_naive(two, 15)
print(fast == slow, st.points_visited, st.points_contributing)
