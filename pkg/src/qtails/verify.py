"""Identity verification and machine-readable reports."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

from .dsl import Identity, Multisum, Product, SeriesExpr, eval_expr
from .multisum import EnumerationStats
from .series import TruncatedSeries, first_difference

VERIFIED = "verified"
MISMATCH = "mismatch"
CORRECTION_SUSPECT = "correction-suspect"
ERROR = "error"

REPORT_FIELDS = (
    "name",
    "order",
    "status",
    "first_mismatch",
    "lhs_coefficient",
    "rhs_coefficient",
    "points_visited",
    "elapsed_ms",
)


@dataclass(frozen=True)
class VerificationReport:
    name: str
    order: int
    status: str
    first_mismatch: Optional[int] = None
    lhs_coefficient: Optional[str] = None
    rhs_coefficient: Optional[str] = None
    points_visited: int = 0
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status in (MISMATCH, CORRECTION_SUSPECT):
            if self.first_mismatch is None or self.lhs_coefficient is None or self.rhs_coefficient is None:
                raise ValueError("a mismatch report needs the index and both coefficients")
        if self.status == VERIFIED and self.first_mismatch is not None:
            raise ValueError("a verified report cannot carry a mismatch index")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        if set(obj) != set(REPORT_FIELDS):
            raise ValueError(f"report fields {sorted(obj)} do not match {sorted(REPORT_FIELDS)}")
        return cls(**obj)

    def comparable(self) -> dict:
        """Report fields except the wall-clock time."""
        d = self.to_json()
        d.pop("elapsed_ms")
        return d

    def summary(self) -> str:
        line = f"{self.status:<18} {self.name}  order={self.order}  points={self.points_visited}  {self.elapsed_ms}ms"
        if self.first_mismatch is not None:
            line += (
                f"\n    first mismatch at q^{self.first_mismatch}:"
                f" lhs {self.lhs_coefficient}, rhs {self.rhs_coefficient}"
            )
        return line


def max_multisum_vars(e: SeriesExpr) -> int:
    if isinstance(e, Multisum):
        return e.spec.nvars
    if isinstance(e, Product):
        return max((max_multisum_vars(f) for f in e.factors), default=0)
    return 0


def default_order(ident: Identity) -> int:
    """20 when a side holds a sum over eight or more variables, 30 otherwise."""
    nv = max(max_multisum_vars(ident.lhs), max_multisum_vars(ident.rhs))
    return 20 if nv >= 8 else 30


def compare(
    name: str,
    order: int,
    lhs: TruncatedSeries,
    rhs: TruncatedSeries,
    *,
    corrected: bool = False,
    points_visited: int = 0,
    elapsed_ms: int = 0,
) -> VerificationReport:
    k = first_difference(lhs, rhs)
    if k is None:
        return VerificationReport(name, order, VERIFIED, points_visited=points_visited, elapsed_ms=elapsed_ms)
    return VerificationReport(
        name,
        order,
        CORRECTION_SUSPECT if corrected else MISMATCH,
        k,
        str(lhs[k]),
        str(rhs[k]),
        points_visited,
        elapsed_ms,
    )


def verify_identity(ident: Identity, order: Optional[int] = None) -> VerificationReport:
    """Evaluate both sides of ``ident`` and compare them through ``order``."""
    if order is None:
        order = default_order(ident)
    t0 = time.perf_counter()
    stats: list[EnumerationStats] = []
    try:
        lhs = eval_expr(ident.lhs, order, stats)
        rhs = eval_expr(ident.rhs, order, stats)
    except Exception:
        ms = int((time.perf_counter() - t0) * 1000)
        return VerificationReport(ident.name, order, ERROR, points_visited=sum(s.points_visited for s in stats), elapsed_ms=ms)
    ms = int((time.perf_counter() - t0) * 1000)
    return compare(
        ident.name,
        order,
        lhs,
        rhs,
        corrected=ident.corrected,
        points_visited=sum(s.points_visited for s in stats),
        elapsed_ms=ms,
    )


def _verify_job(args):
    ident, order = args
    return verify_identity(ident, order)


def verify_all(
    identities: Sequence[Identity], order: Optional[int] = None, jobs: int = 1
) -> list[VerificationReport]:
    """Reports in input order; with ``jobs > 1`` identities run in worker processes."""
    work = [(i, order) for i in identities]
    if jobs <= 1:
        return [_verify_job(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_verify_job, work))


def reports_to_json(reports: Iterable[VerificationReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2) + "\n"


def reports_from_json(text: str) -> list[VerificationReport]:
    return [VerificationReport.from_json(o) for o in json.loads(text)]
