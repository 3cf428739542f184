"""Exact truncated q-series, nested multisums and tail identities of alternating knots."""

from .series import (
    NonUnitConstantTerm,
    ThetaParams,
    TruncatedSeries,
    add,
    first_difference,
    h_series,
    invert,
    mul,
    qpoch_finite,
    qpoch_infinite_power,
)
from .multisum import (
    EnumerationStats,
    InvalidSpec,
    LinearForm,
    MultisumSpec,
    QuadraticExponent,
    UnboundedVariable,
    evaluate,
    evaluate_naive,
    integrality_check,
    strategy_check,
    term_series,
)
from .dsl import (
    DSLSyntaxError,
    DuplicateName,
    EtaPower,
    HFunc,
    Identity,
    Multisum,
    One,
    Product,
    eval_expr,
    parse_expression,
    parse_identity_file,
    pretty_print,
)
from .catalog import (
    CatalogEntry,
    UnknownKnot,
    builtin_identities,
    get_entry,
    get_identity,
    hunt,
)
from .verify import VerificationReport, verify_all, verify_identity

__version__ = "0.1.0"
