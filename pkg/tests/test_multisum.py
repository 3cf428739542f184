import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtails.catalog import _phi_8_5, andy_identity, builtin_identities, get_identity, split_eta_multisum
from qtails.dsl import Multisum, Product, eval_expr, parse_expression
from qtails.multisum import (
    DIAGONAL_BOUNDED,
    MONOTONE,
    InvalidSpec,
    LinearForm,
    MultisumSpec,
    QuadraticExponent,
    UnboundedVariable,
    coefficient_bound,
    evaluate,
    evaluate_naive,
    integrality_check,
    strategy_check,
    term_series,
    univariate_box,
)
from qtails.series import TruncatedSeries, h_series, mul, one, qpoch_infinite_power, zero


def spec_of(name):
    return split_eta_multisum(get_identity(name).lhs)[1]


def msum(text):
    e = parse_expression(text)
    assert isinstance(e, Multisum)
    return e.spec


def andy_spec(A):
    return andy_identity(A).lhs.spec


def brute_integral(e, nvars, bound=10):
    return all(
        e(p).denominator == 1 for p in itertools.product(range(bound + 1), repeat=nvars)
    )


def test_linear_form_evaluation():
    f = LinearForm({0: 2, 2: -1}, 3)
    assert f([1, 5, 4]) == 1
    assert LinearForm.of(0, 0, 1)([2, 3]) == 7
    with pytest.raises(InvalidSpec):
        LinearForm({0: Fraction(1, 2)})


def test_quadratic_canonical_form():
    a = QuadraticExponent({(1, 0): 1, (0, 1): 1}, {0: 0})
    b = QuadraticExponent({(0, 1): 2})
    assert a == b
    assert a([2, 3]) == 12


def test_integrality_examples():
    five = QuadraticExponent({(0, 0): Fraction(5, 2)}, {0: Fraction(3, 2)})
    assert integrality_check(five)
    assert not integrality_check(QuadraticExponent({}, {0: Fraction(1, 2)}))
    tri = QuadraticExponent({(0, 0): Fraction(1, 2), (0, 1): 1}, {0: Fraction(1, 2)})
    assert brute_integral(tri, 2)
    assert integrality_check(tri, 2)


def test_integrality_agrees_with_brute_force():
    rng = random.Random(20261014)
    denoms = [1, 1, 2, 2, 3, 4]
    disagreements = 0
    for _ in range(100):
        n = rng.randint(1, 3)

        def r():
            return Fraction(rng.randint(-6, 6), rng.choice(denoms))

        quad = {(i, j): r() for i in range(n) for j in range(i, n) if rng.random() < 0.7}
        lin = {i: r() for i in range(n) if rng.random() < 0.7}
        e = QuadraticExponent(quad, lin, r())
        if integrality_check(e, n) != brute_integral(e, n):
            disagreements += 1
    assert disagreements == 0


def test_strategy_examples():
    assert strategy_check(spec_of("S_5_1")) == [MONOTONE] * 5
    assert strategy_check(andy_spec(-2)) == [DIAGONAL_BOUNDED]
    with pytest.raises(UnboundedVariable):
        strategy_check(MultisumSpec(1, QuadraticExponent({}, {0: -3})))
    with pytest.raises(UnboundedVariable):
        strategy_check(MultisumSpec(2, QuadraticExponent({(0, 1): 1}, {0: 1})))


def test_negative_cross_rejected():
    with pytest.raises(InvalidSpec):
        MultisumSpec(2, QuadraticExponent({(0, 0): 1, (1, 1): 1, (0, 1): -1}))


def test_empty_sum_is_one():
    series, stats = evaluate(MultisumSpec(0), 7)
    assert series == one(7)
    assert stats.points_contributing == 1
    assert evaluate_naive(MultisumSpec(0), 7) == one(7)


def test_s51_low_order():
    series, _ = evaluate(spec_of("S_5_1"), 3)
    oracle = mul(h_series(5, 3), qpoch_infinite_power(1, -5, 3))
    assert series == oracle == TruncatedSeries((1, 4, 15, 45))


@pytest.mark.parametrize("A", range(-3, 4))
def test_andy_for_every_shift(A):
    series, _ = evaluate(andy_spec(A), 30)
    assert series == qpoch_infinite_power(1, -1, 30)


def test_andy_shift_symmetry():
    for A in (1, 2, 3):
        assert evaluate(andy_spec(A), 30)[0] == evaluate(andy_spec(-A), 30)[0]


def test_negative_exponent_rejected():
    # q^(n^2 - 2n) reaches q^-1 at n = 1 once nothing kills that term
    s = msum("sum{vars: n; exp: n^2 - 2*n; den: n;}")
    with pytest.raises(InvalidSpec):
        evaluate(s, 10)


@pytest.mark.parametrize("name, order", [("S_6_2", 8), ("S_5_1", 10), ("S_7_7", 8)])
def test_oracle_equivalence(name, order):
    s = spec_of(name)
    assert evaluate(s, order)[0] == evaluate_naive(s, order)


@pytest.mark.parametrize("name", ["S_5_1", "S_6_2", "8_5"])
def test_pruning_is_sound(name):
    s = split_eta_multisum(_phi_8_5().lhs)[1] if name == "8_5" else spec_of(name)
    pruned, st_pruned = evaluate(s, 12)
    full, st_full = evaluate(s, 12, prune=False)
    assert pruned == full
    assert st_full.points_visited >= st_pruned.points_visited


def test_variable_order_does_not_matter():
    s = spec_of("S_7_4")
    base = evaluate(s, 12)[0]
    rng = random.Random(5)
    for _ in range(3):
        perm = list(range(s.nvars))
        rng.shuffle(perm)
        assert evaluate(s, 12, variable_order=perm)[0] == base


def test_stats_invariant():
    _, stats = evaluate(spec_of("S_6_2"), 15)
    assert 0 < stats.points_contributing <= stats.points_visited
    assert stats.elapsed >= 0


def test_term_series_origin():
    s = msum("sum{vars: a b; exp: a^2 + a*b + b^2 + a; den: a, b, a+b;}")
    assert term_series(s, (0, 0), 6) == one(6)


def test_term_series_e2_term():
    s = msum("sum{vars: n; sign: n; exp: n*(n-1)/2 + n; den: n;}")
    assert term_series(s, (1,), 6) == TruncatedSeries((0, -1, -1, -1, -1, -1, -1))


def test_term_series_negative_subscript():
    assert term_series(andy_spec(-1), (0,), 8) == zero(8)


def test_term_series_numerator():
    s = split_eta_multisum(_phi_8_5().lhs)[1]
    # a = b = 1: q^4 (q)_2 / (q)_1^4 = q^4 (1 + q) / (1 - q)^2
    expected = [0, 0, 0, 0] + [2 * k + 1 for k in range(5)]
    assert term_series(s, (1, 1), 8).coeffs == tuple(expected)


def test_univariate_box_contains_all_terms():
    s = spec_of("S_6_2")
    box = univariate_box(s, 8)
    # one step outside the box along any axis pushes the exponent past 8
    for i, b in enumerate(box):
        p = [0] * s.nvars
        p[i] = b + 1
        assert s.exponent(p) > 8


def test_key_identity_small():
    ident = get_identity("key(n=3,c=1,2)")
    assert eval_expr(ident.lhs, 20) == eval_expr(ident.rhs, 20)


def test_coefficient_bound_dominates_terms():
    s = spec_of("S_6_2")
    bound = coefficient_bound(s, 10)
    for p in itertools.product(range(3), repeat=s.nvars):
        assert max(abs(c) for c in term_series(s, p, 10).coeffs) <= bound


def test_big_coefficients_use_exact_path():
    # the (q)_0 factors are 1 but inflate the majorant past int64
    s = msum("sum{vars: a; exp: a; den: " + ", ".join(["a"] * 3 + ["0"] * 40) + ";}")
    assert coefficient_bound(s, 40) > 2**62
    assert evaluate(s, 40)[0] == evaluate_naive(s, 40, [40])


def test_large_exact_coefficients():
    s = msum("sum{vars: a; exp: a; den: a, a, a, a, a, a, a, a, a, a, a, a;}")
    series, _ = evaluate(s, 60)
    assert series == evaluate_naive(s, 60)
    assert max(series.coeffs) > 2**63


def test_every_catalog_spec_is_valid():
    count = 0
    for ident in builtin_identities():
        for side in (ident.lhs, ident.rhs):
            factors = side.factors if isinstance(side, Product) else (side,)
            for f in factors:
                if isinstance(f, Multisum):
                    assert integrality_check(f.spec.exponent, f.spec.nvars)
                    strategy_check(f.spec)
                    count += 1
    assert count > 100


@st.composite
def small_specs(draw):
    n = draw(st.integers(1, 3))
    quad = {}
    lin = {}
    for i in range(n):
        # k*x(x+1)/2 keeps the exponent integral for any k
        k = draw(st.integers(0, 4))
        extra = draw(st.integers(-1 if k else 1, 3))
        quad[(i, i)] = Fraction(k, 2)
        lin[i] = Fraction(k, 2) + extra
        if k == 0 and lin[i] <= 0:
            lin[i] = Fraction(1)
        if lin[i] < 0 and k == 0:
            lin[i] = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            quad[(i, j)] = draw(st.integers(0, 2))
    pool = [LinearForm.of(i) for i in range(n)] + [
        LinearForm.of(i, j) for i in range(n) for j in range(i + 1, n)
    ] + [LinearForm(((0, 1),), -1)]
    den = draw(st.lists(st.sampled_from(pool), max_size=4))
    num = draw(st.lists(st.sampled_from(pool), max_size=1))
    sign = LinearForm(tuple((i, draw(st.integers(0, 1))) for i in range(n)))
    return MultisumSpec(n, QuadraticExponent(quad, lin), sign, tuple(num), tuple(den))


@settings(max_examples=40, deadline=None)
@given(small_specs(), st.integers(0, 9))
def test_random_specs_match_naive(s, order):
    assert evaluate(s, order)[0] == evaluate_naive(s, order)
