"""Verification reports, mutants and JSON output."""

from qtails.catalog import get_identity
from qtails.dsl import replace_h_factor
from qtails.verify import reports_from_json, reports_to_json, verify_all, verify_identity

r = verify_identity(get_identity("7_2"), 15)
print(r.summary())

# swap the h(5) on the product side for h(4): caught at q^3
ident = get_identity("S_8_7")
mutant = type(ident)(ident.name + "-mutant", ident.lhs, replace_h_factor(ident.rhs, 0, 4))
print(verify_identity(mutant, 20).summary())

# reports go through JSON with coefficients as decimal strings
reports = verify_all([get_identity(n) for n in ("double", "triple", "S_5_1")])
text = reports_to_json(reports)
print(text)
print(reports_from_json(text) == reports)
