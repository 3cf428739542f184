"""Knot table lookups, tail multisums and the product-form search."""

from qtails.catalog import builtin_identities, get_entry, get_identity, hunt, tail_expression
from qtails.dsl import eval_expr, pretty_print
from qtails.multisum import evaluate
from qtails.series import h_series, mul, qpoch_infinite_power

for name in ["9_1", "-9_1", "10_45", "9_24", "8_7"]:
    e = get_entry(name)
    print(name, e.tail_product, e.mirror_tail_product, e.identity)

# 8_7: eta^7 * S = h5, and eta^8 * S is the table's h3*h5
print(pretty_print(get_identity("S_8_7").rhs))
entry = get_entry("8_7")
s, _ = evaluate(entry.multisum, 20)
phi = mul(qpoch_infinite_power(1, entry.crossings, 20), s)
print(phi == h_series(3, 20) * h_series(5, 20))

print(len(builtin_identities()), "built-in identities")

# search for eta^e * h_b1 * ... * h_bk equal to a series
target = eval_expr(tail_expression("7_2"), 25)
for m in hunt(target, max_factors=3, max_b=10, eta_range=(-3, 3)):
    print("7_2 tail =", m)

target = eval_expr(tail_expression("8_5"), 30)
print("8_5 matches:", hunt(target, 3, 10, (-3, 3)))
