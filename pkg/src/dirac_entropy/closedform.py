"""Closed-form predictions for traces of entropy-type operator differences."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .errors import ArgumentError, GeometryError
from .geometry import Interval, IntervalSet, Partition, cross_ratio_log, multi_cross_ratio_log, set_algebra
from .testfns import TestFunction, renyi, u_unit

TWO_PI_SQ = 2.0 * math.pi ** 2

FORMULA_IDS = ("two_interval", "n_interval", "renyi_corollary", "intersecting",
               "asymptotic_bounded", "asymptotic_unbounded")

PROVENANCE = {
    "two_interval": "U(0,1;f)/(2 pi^2) times the log cross ratio of two separated intervals",
    "n_interval": "U(0,1;f)/(2 pi^2) times the pairwise log cross ratios summed over a partition",
    "renyi_corollary": "(1+alpha)/(12 alpha) times the pairwise log cross ratios (Renyi entanglement entropy)",
    "intersecting": "U(0,1;f)/(2 pi^2) ln(|I1||I2|/(|I1 cap I2||I1 cup I2|)) for overlapping intervals",
    "asymptotic_bounded": "(1+alpha)/(12 alpha) |I1||I2|/r^2, leading order at large separation r",
    "asymptotic_unbounded": "(1+alpha)/(12 alpha) |I1|/r, leading order with a half-line partner",
}


@dataclass(frozen=True)
class ClosedFormResult:
    value: float
    formula_id: str
    inputs: dict = field(default_factory=dict)
    conjectural: bool = False
    u_value: float | None = None
    u_source: str = "closed"

    @property
    def provenance(self) -> str:
        return PROVENANCE[self.formula_id]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["provenance"] = self.provenance
        return d


def renyi_coefficient(alpha: float) -> float:
    """``(1 + alpha)/(12 alpha)``, i.e. ``U(0,1;h_alpha)/(2 pi^2)``."""
    if not alpha > 0:
        raise ArgumentError("alpha must be positive")
    return 1.0 / 12.0 if math.isinf(alpha) else (1.0 + alpha) / (12.0 * alpha)


def _iv(iv: Interval) -> list:
    return [iv.a, iv.b]


def two_interval_trace(i1: Interval, i2: Interval, f: TestFunction) -> ClosedFormResult:
    u, _, src = u_unit(f)
    val = u / TWO_PI_SQ * cross_ratio_log(i1, i2)
    return ClosedFormResult(val, "two_interval", {"i1": _iv(i1), "i2": _iv(i2), "f": f.name},
                            u_value=u, u_source=src)


def n_interval(iset: IntervalSet, part: Partition, f: TestFunction) -> ClosedFormResult:
    u, _, src = u_unit(f)
    val = u / TWO_PI_SQ * multi_cross_ratio_log(iset, part)
    return ClosedFormResult(val, "n_interval",
                            {"set": [_iv(iv) for iv in iset], "p1": list(part.p1),
                             "p2": list(part.p2), "f": f.name}, u_value=u, u_source=src)


def renyi_ee(iset: IntervalSet, part: Partition, alpha: float) -> ClosedFormResult:
    c = renyi_coefficient(alpha)
    val = c * multi_cross_ratio_log(iset, part)
    return ClosedFormResult(val, "renyi_corollary",
                            {"set": [_iv(iv) for iv in iset], "p1": list(part.p1),
                             "p2": list(part.p2), "alpha": alpha}, u_value=c * TWO_PI_SQ)


def intersecting_log(i1: Interval, i2: Interval) -> float:
    """``ln(|I1||I2|/(|I1 cap I2||I1 cup I2|))``; with one half-line the
    ratio reduces to ``|bounded| / |I1 cap I2|``."""
    alg = set_algebra(i1, i2)
    inter = alg.intersection.measure
    if inter <= 0:
        raise GeometryError(f"intervals ({i1}) and ({i2}) have no overlap of positive length")
    d12, d21 = alg.difference, set_algebra(i2, i1).difference
    if d12.empty or d21.empty:
        raise GeometryError("each interval must stick out of the other")
    if not (d12.bounded or d21.bounded):
        raise GeometryError("at least one set difference must be bounded")
    if i1.bounded and i2.bounded:
        return math.log(i1.length * i2.length / (inter * alg.union.measure))
    bounded = i1 if i1.bounded else i2
    return math.log(bounded.length / inter)


def intersecting_trace(i1: Interval, i2: Interval, f: TestFunction) -> ClosedFormResult:
    """Overlapping-interval formula; flagged conjectural unless f is a polynomial."""
    u, _, src = u_unit(f)
    val = u / TWO_PI_SQ * intersecting_log(i1, i2)
    return ClosedFormResult(val, "intersecting", {"i1": _iv(i1), "i2": _iv(i2), "f": f.name},
                            conjectural=f.kind not in ("poly", "monomial"), u_value=u, u_source=src)


@dataclass(frozen=True)
class SeparationRow:
    r: float
    exact: float
    leading: float

    @property
    def ratio(self) -> float:
        return self.exact / self.leading


def separation_expansion(i1: Interval, i2_template: Interval, r: float, alpha: float) -> SeparationRow:
    """Exact Renyi entropy and its large-distance leading term.

    The partner interval is ``i2_template`` translated by ``r``; for a
    template adjacent to ``i1`` the gap equals ``r``. Leading terms are
    ``c |I1||I2|/g^2`` (bounded partner) and ``c |I1|/g`` (half-line partner)
    with ``c = (1+alpha)/(12 alpha)`` and ``g`` the gap.
    """
    if not i1.bounded:
        raise GeometryError("the first interval must be bounded")
    if math.isinf(i2_template.a):
        raise GeometryError("the partner template must extend to the right")
    i2 = Interval(i2_template.a + r, i2_template.b + r)
    gap = i1.gap_to(i2)
    if gap <= 0:
        raise GeometryError(f"shift r={r} does not separate the intervals")
    c = renyi_coefficient(alpha)
    exact = c * cross_ratio_log(i1, i2)
    if i2.bounded:
        leading = c * i1.length * i2.length / gap ** 2
    else:
        leading = c * i1.length / gap
    return SeparationRow(float(r), exact, leading)


def two_interval_renyi(i1: Interval, i2: Interval, alpha: float) -> ClosedFormResult:
    return two_interval_trace(i1, i2, renyi(alpha))
