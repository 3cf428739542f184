"""The .qid expression language: parse, print, evaluate."""

from qtails.dsl import (
    DSLSyntaxError,
    eval_expr,
    parse_expression,
    parse_identity_file,
    pretty_print,
)

e = parse_expression("eta^-2 * h(3) * h(5)")
print(e)
print(pretty_print(e))
print(eval_expr(e, 12))

# h(3) is eta, so this is 1 at every order
print(eval_expr(parse_expression("h(3) * eta^-1"), 30))

# multisums are written inline, variables are local to the block
s = parse_expression("sum{vars: a b; exp: a^2 + a*b + b^2 + a + b; den: a, b, a + b;}")
print(pretty_print(s))
print(eval_expr(s, 10))

# errors carry a position
for bad in ["h(0)", "h(3) * ", "sum{vars: a; exp: a^2 + z; den: a;}", "sum{vars: a; exp: a^3; den: a;}"]:
    try:
        parse_expression(bad)
    except DSLSyntaxError as exc:
        print(f"{bad!r}: {exc}")

# identity files hold named declarations
text = '''
# sum_n q^(n^2+n) / (q)_n^2 style checks go here
identity "euler": sum{vars: n; exp: n; den: n;} == eta^-1;
identity "h3 is eta" source "definitions": h(3) == eta;
'''
for ident in parse_identity_file(text):
    print(ident.name, ident.source, eval_expr(ident.lhs, 15) == eval_expr(ident.rhs, 15))
