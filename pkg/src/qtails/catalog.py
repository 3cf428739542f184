"""Built-in tail tables, identity catalog and product-form search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Callable, Iterable, Optional, Sequence

from .dsl import EtaPower, Identity, Multisum, Product, SeriesExpr, parse_identity_file, format_identity_file
from .multisum import MultisumSpec
from .series import TruncatedSeries, first_difference, h_series, mul, one, qpoch_infinite_power


class UnknownKnot(LookupError):
    pass


class UnknownIdentity(LookupError):
    pass


# Tail products per knot: "K | tail of K | tail of -K".  Numbers are h indices,
# "^" is a power, "?" marks no known product and "1" is stored as h_2 = 1.
_TABLE_1 = """
8_6 | 3 4 | 5
8_7 | 3 5 | 3^2
8_8 | 3 5 | 3^2
8_9 | 3 4 | 3 4
8_10 | ? | 3^2
8_11 | 3 4 | 3 4
8_12 | 3 4 | 3 4
8_13 | 3^2 4 | 3^2
8_14 | 3 4 | 3^3
8_15 | 3^3 | ?
8_16 | ? | ?
8_17 | ? | ?
8_18 | ? | ?
9_1 | 9 | 1
9_2 | 8 | 3
9_3 | 7 | 4
9_4 | 6 | 5
9_5 | 3 | 4 6
9_6 | 3 6 | 4
9_7 | 3 4 | 6
9_8 | 3 6 | 3^2
9_9 | 4 5 | 4
9_10 | 4^2 | 5
9_11 | 4 5 | 3^2
9_12 | 3 4 | 3 5
9_13 | 4^2 | 3 4
9_14 | 3^2 5 | 3^2
9_15 | 3 4 | 3 5
9_16 | 4 | ?
9_17 | 3^2 | 3^2 5
9_18 | 3 4 | 4^2
9_19 | 3 5 | 3^3
9_20 | 3^2 | 3 4^2
9_21 | 3 4 | 3^2 4
9_22 | ? | 3^2
9_23 | 4^2 | 3^3
9_24 | ? | ?
9_25 | 3^3 | ?
9_26 | 3^2 4 | 3^3
9_27 | 3^3 | 3^2 4
9_28 | ? | ?
9_29 | ? | ?
9_30 | 3^3 | ?
9_31 | 3^4 | 3^3
9_32 | ? | ?
9_33 | ? | ?
9_34 | ? | ?
9_35 | ? | 3
9_36 | ? | 3^2
9_37 | 3^3 | ?
9_38 | ? | ?
9_39 | ? | ?
9_40 | ? | ?
9_41 | ? | ?
"""

_TABLE_2 = """
10_1 | 9 | 3
10_2 | ? | 3
10_3 | 7 | 5
10_4 | ? | 3
10_5 | 3 7 | 3^2
10_6 | 3 6 | 5
10_7 | 3 6 | 3 4
10_8 | 3 | 5 6
10_9 | 3 6 | 3 4
10_10 | 3^2 6 | 3^2
10_11 | 4 5 | 5
10_12 | 3 5 | 3 5
10_13 | 4 5 | 3 4
10_14 | 3^2 5 | 3 4
10_15 | 5^2 | 3^2
10_16 | 4 5 | 3 4
10_17 | ? | 3 5
10_18 | 3^2 5 | 3 4
10_19 | 3 4 5 | 3^2
10_20 | 7 | 3 4
10_21 | 3 6 | 3 4
10_22 | 3 4 | 4 5
10_23 | 3 5 | 3^2 4
10_24 | 4 5 | 3 4
10_25 | 3 4^2 | 3 4
10_26 | 3 4^2 | 3 4
10_27 | 3 5 | 3^2 4
10_28 | 3 4 5 | 3^2
10_29 | 3 4^2 | 3 4
10_30 | 3 4^2 | 3^3
10_31 | 3 5 | 3^2 4
10_32 | ? | 3^3
10_33 | ? | 3^2 4
10_34 | 3 7 | 3^2
10_35 | 3 6 | 3 4
10_36 | 3 6 | 3^3
10_37 | 3 5 | 3 5
10_38 | ? | 3^3
10_39 | 3 4 | 3^2 5
10_40 | ? | 3^2 4
10_41 | 3 4^2 | 3^3
10_42 | 3^2 4 | ?
10_43 | 3^2 4 | 3^2 4
10_44 | 3^3 4 | 3^4
10_45 | 3^4 | 3^4
10_46 | ? | 3
10_47 | ? | 3^2
10_48 | ? | 3 5
10_49 | ? | 3^2 5
10_50 | ? | 3 4
10_51 | ? | 3^2 4
10_52 | ? | 3^3
10_53 | ? | 3^3
10_54 | ? | 3^2
10_55 | ? | 3^3
10_56 | ? | 3 4
10_57 | ? | 3^2 4
10_58 | ? | 3^3
10_59 | ? | 3^3
10_60 | ? | 3^3
10_61 | ? | 3
10_62 | ? | 3^2
10_63 | ? | 3 4
10_64 | ? | 3 4
10_65 | ? | 3^2 4
10_66 | ? | ?
10_67 | ? | 3^3
10_68 | ? | 3^2
10_69 | ? | ?
10_70 | ? | 3 4
10_71 | ? | 3^2 4
10_72 | 3 4 | ?
10_73 | ? | 3^2 4
10_74 | ? | 3 4
10_75 | ? | ?
10_76 | ? | 5
10_77 | ? | 3 5
10_78 | ? | ?
"""


def _parse_product(cell: str) -> Optional[tuple[int, ...]]:
    cell = cell.strip()
    if cell == "?":
        return None
    if cell == "1":
        return (2,)
    out: list[int] = []
    for tok in cell.split():
        b, _, k = tok.partition("^")
        out.extend([int(b)] * int(k or 1))
    return tuple(out)


@dataclass(frozen=True)
class CatalogEntry:
    """One knot: tail products of K and of its mirror, ``None`` where unknown.

    When the knot's multisum S is known, ``multisum`` holds it and
    ``eta_power`` the power m in the identity eta^m * S == product.
    """

    knot: str
    crossings: int
    tail_product: Optional[tuple[int, ...]]
    mirror_tail_product: Optional[tuple[int, ...]]
    multisum: Optional[MultisumSpec] = None
    eta_power: Optional[int] = None
    identity: Optional[str] = None
    corrected: Optional[str] = None
    table: Optional[int] = None

    def mirror(self) -> "CatalogEntry":
        name = self.knot[1:] if self.knot.startswith("-") else "-" + self.knot
        return CatalogEntry(name, self.crossings, self.mirror_tail_product, self.tail_product, table=self.table)

    @property
    def verifiable(self) -> bool:
        return self.multisum is not None


def _rows(text: str, table: int) -> list[CatalogEntry]:
    rows = []
    for line in text.strip().splitlines():
        knot, tail, mirror = (c.strip() for c in line.split("|"))
        crossings = int(knot.split("_")[0])
        rows.append(CatalogEntry(knot, crossings, _parse_product(tail), _parse_product(mirror), table=table))
    return rows


TABLE_ROWS: tuple[CatalogEntry, ...] = tuple(_rows(_TABLE_1, 1) + _rows(_TABLE_2, 2))

# knots whose multisum is displayed: signed knot -> identity name
_KNOT_IDENTITIES = {
    "8_7": "S_8_7",
    "8_13": "S_8_13",
    "-9_5": "S_-9_5",
    "9_14": "S_9_14",
    "-9_17": "S_-9_17",
    "-9_20": "S_-9_20",
    "-9_27": "S_-9_27",
    "9_31": "S_9_31",
    "10_5": "S_10_5",
    "-10_8": "S_-10_8",
    "10_10": "S_10_10",
    "10_15": "S_10_15",
    "10_19": "S_10_19",
    "10_26": "S_10_26",
    "10_28": "S_10_28",
    "10_44": "S_10_44",
}

KEY_IDENTITIES = ("S_5_1", "S_6_2", "S_7_1", "S_7_4", "S_7_7", "S_8_2", "S_-8_4")
REDUCTION_IDENTITIES = tuple(_KNOT_IDENTITIES.values())

# tail of 8_5 after simplification: eta^2 times this double sum
_PHI_8_5 = """
identity "8_5" source "tail of 8_5":
    eta^2 * sum{vars: a b; exp: a^2 + a + b^2 + b; num: a+b; den: a, a, b, b;} == 1;
"""


def split_eta_multisum(e: SeriesExpr) -> tuple[int, MultisumSpec]:
    """Split ``eta^m * sum{...}`` (or a bare multisum) into (m, spec)."""
    if isinstance(e, Multisum):
        return 0, e.spec
    if isinstance(e, Product) and len(e.factors) == 2:
        a, b = e.factors
        if isinstance(a, EtaPower) and a.j == 1 and isinstance(b, Multisum):
            return a.c, b.spec
    raise ValueError("expression is not of the form eta^m * sum{...}")


@lru_cache(maxsize=None)
def _data_identities() -> tuple[Identity, ...]:
    text = resources.files("qtails").joinpath("data/tails.qid").read_text(encoding="utf-8")
    return tuple(parse_identity_file(text))


def _phi_8_5() -> Identity:
    return parse_identity_file(_PHI_8_5)[0]


@lru_cache(maxsize=None)
def _entries() -> dict[str, CatalogEntry]:
    by_name = {i.name: i for i in _data_identities()}
    out: dict[str, CatalogEntry] = {}
    for row in TABLE_ROWS:
        out[row.knot] = row
        out["-" + row.knot] = row.mirror()
    for knot, ident_name in _KNOT_IDENTITIES.items():
        ident = by_name[ident_name]
        m, spec = split_eta_multisum(ident.lhs)
        base = out[knot]
        out[knot] = CatalogEntry(
            base.knot, base.crossings, base.tail_product, base.mirror_tail_product,
            multisum=spec, eta_power=m, identity=ident_name,
            corrected=ident.original_text or None, table=base.table,
        )
    m, spec = split_eta_multisum(by_name["7_2"].lhs)
    out["7_2"] = CatalogEntry("7_2", 7, (6,), None, multisum=spec, eta_power=m, identity="7_2")
    m, spec = split_eta_multisum(_phi_8_5().lhs)
    out["8_5"] = CatalogEntry("8_5", 8, None, None, multisum=spec, eta_power=m)
    return out


def get_entry(name: str) -> CatalogEntry:
    try:
        return _entries()[name]
    except KeyError:
        raise UnknownKnot(f"no catalog entry for knot {name!r}") from None


def tail_expression(name: str) -> SeriesExpr:
    """eta^m * S for a knot whose multisum is known."""
    entry = get_entry(name)
    if entry.multisum is None:
        raise UnknownKnot(f"knot {name!r} has no multisum in the catalog")
    return Product((EtaPower(1, entry.eta_power), Multisum(entry.multisum)))


# -- helper families --


@dataclass(frozen=True)
class HelperFamily:
    family: str
    domain: str
    build: Callable[..., Identity]
    default_grid: tuple[dict, ...]

    def instantiate(self, **params) -> Identity:
        return self.build(**params)


def _one(text: str) -> Identity:
    return parse_identity_file(text)[0]


def e1_identity(j: int) -> Identity:
    if j < 1:
        raise ValueError("e1 needs j >= 1")
    return _one(
        f'identity "e1(j={j})" source "helper (e1), t = q^{j}":\n'
        f"    sum{{vars: n; exp: {j}*n; den: n;}} == eta({j})^-1;"
    )


def e2_identity(j: int) -> Identity:
    if j < 1:
        raise ValueError("e2 needs j >= 1")
    return _one(
        f'identity "e2(j={j})" source "helper (e2), t = q^{j}":\n'
        f"    sum{{vars: n; sign: n; exp: n*(n-1)/2 + {j}*n; den: n;}} == eta({j});"
    )


def andy_identity(A: int) -> Identity:
    return _one(
        f'identity "andy(A={A})" source "helper (andy)":\n'
        f"    sum{{vars: n; exp: n^2 + ({A})*n; den: n, n + ({A});}} == eta^-1;"
    )


def key_identity(n: int, c: Sequence[int]) -> Identity:
    """Instance of the key identity for ``n > 2`` and shifts c_1..c_{n-1} >= 0."""
    c = list(c)
    if n <= 2 or len(c) != n - 1:
        raise ValueError("key identity needs n > 2 and n - 1 shifts")
    if any(ck < 0 for ck in c):
        raise ValueError("key identity is only instantiated for non-negative shifts")
    tag = ",".join(map(str, c))
    den_l = ", ".join(["a"] + [f"a + {ck}" for ck in c])
    lhs = f"eta * sum{{vars: a; sign: {n}*a; exp: {n}*a*(a+1)/2 - a + {sum(c)}*a; den: {den_l};}}"
    iv = [f"i{k}" for k in range(1, n - 1)]
    partial = ["(" + " + ".join(iv[:k]) + ")" for k in range(1, n - 1)]
    sign = " + ".join(f"{n - 1 - j}*{iv[j - 1]}" for j in range(1, n - 1))
    exp_terms = [f"{s}*(1 + {s})/2" for s in partial]
    # c_k multiplies i_1 + ... + i_{k-1} for k = 2..n-1
    exp_terms += [f"{c[k - 1]}*{partial[k - 2]}" for k in range(2, n)]
    den_r = ", ".join(iv + [f"{c[k - 1]} + {partial[k - 1]}" for k in range(1, n - 1)])
    rhs = f"sum{{vars: {' '.join(iv)}; sign: {sign}; exp: {' + '.join(exp_terms)}; den: {den_r};}}"
    return _one(f'identity "key(n={n},c={tag})" source "helper (key)":\n    {lhs}\n    == {rhs};')


def _data_helper(name: str) -> Callable[[], Identity]:
    def build() -> Identity:
        return next(i for i in _data_identities() if i.name == name)

    return build


HELPER_FAMILIES: dict[str, HelperFamily] = {
    "e1": HelperFamily("e1", "t = q^j, j >= 1", e1_identity, tuple({"j": j} for j in range(1, 6))),
    "e2": HelperFamily("e2", "t = q^j, j >= 1", e2_identity, tuple({"j": j} for j in range(1, 6))),
    "andy": HelperFamily("andy", "any integer A", andy_identity, tuple({"A": a} for a in range(-3, 4))),
    "double": HelperFamily("double", "no parameters", _data_helper("double"), ({},)),
    "triple": HelperFamily("triple", "no parameters", _data_helper("triple"), ({},)),
    "key": HelperFamily(
        "key",
        "n > 2, shifts c_k >= 0",
        key_identity,
        tuple(
            {"n": n, "c": c}
            for n in (3, 4, 5)
            for c in itertools.product(range(3), repeat=n - 1)
        ),
    ),
}


def helper_identities(family: Optional[str] = None) -> list[Identity]:
    fams = [HELPER_FAMILIES[family]] if family else HELPER_FAMILIES.values()
    return [f.instantiate(**params) for f in fams for params in f.default_grid]


@lru_cache(maxsize=None)
def _all_identities() -> tuple[Identity, ...]:
    tails = [i for i in _data_identities() if i.name not in ("double", "triple")]
    return tuple(tails + helper_identities())


def builtin_identities() -> list[Identity]:
    """Every verifiable identity: tails, key identities and helper instances."""
    return list(_all_identities())


def get_identity(name: str) -> Identity:
    for ident in _all_identities():
        if ident.name == name:
            return ident
    raise UnknownIdentity(f"no identity named {name!r}")


def export_qid(identities: Optional[Iterable[Identity]] = None) -> str:
    idents = builtin_identities() if identities is None else list(identities)
    return "# exported identity catalog\n\n" + format_identity_file(idents)


# -- hunting for product forms --


@dataclass(frozen=True)
class HuntMatch:
    eta_power: int
    factors: tuple[int, ...]

    def __str__(self) -> str:
        parts = [f"h({b})" for b in self.factors]
        if self.eta_power:
            parts.insert(0, "eta" if self.eta_power == 1 else f"eta^{self.eta_power}")
        return " * ".join(parts) or "1"


def hunt(
    target: TruncatedSeries,
    max_factors: int,
    max_b: int,
    eta_range: tuple[int, int],
    order: Optional[int] = None,
) -> list[HuntMatch]:
    """All products eta^e * h_b1 * ... * h_bk (k <= max_factors) equal to ``target`` through ``order``.

    Indices run over 3..max_b: h_1 = 0 and h_2 = 1 only produce the zero
    series or duplicates.  Results come back sorted by (eta power, factors).
    """
    if order is None:
        order = target.order
    target = target.truncate(order)
    lo, hi = eta_range
    # eta^e * P == target  <=>  P == eta^-e * target
    shifted = {e: mul(target, qpoch_infinite_power(1, -e, order)) for e in range(lo, hi + 1)}
    hs = {b: h_series(b, order) for b in range(3, max_b + 1)}
    matches = []

    def walk(start: int, chosen: list[int], prod: TruncatedSeries):
        for e, t in shifted.items():
            if first_difference(prod, t) is None:
                matches.append(HuntMatch(e, tuple(chosen)))
        if len(chosen) == max_factors:
            return
        for b in range(start, max_b + 1):
            chosen.append(b)
            walk(b, chosen, mul(prod, hs[b]))
            chosen.pop()

    walk(3, [], one(order))
    return sorted(matches, key=lambda m: (m.eta_power, m.factors))
