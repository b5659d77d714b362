"""Interval sets, cross-ratio logarithms and Moebius-type symmetry maps.

Endpoints are plain floats; an unbounded side is represented by ``math.inf``
(or ``-math.inf``) and never by a large finite number, so that the limit forms
of the cross ratio can detect it exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import GeometryError, TouchingClosuresError


@dataclass(frozen=True)
class Interval:
    """Open interval ``(a, b)``; at most one endpoint may be infinite."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if math.isnan(a) or math.isnan(b):
            raise GeometryError(f"NaN endpoint in ({a}, {b})")
        if math.isinf(a) and math.isinf(b):
            raise GeometryError("an interval may have at most one infinite endpoint")
        if a == math.inf or b == -math.inf:
            raise GeometryError(f"invalid infinite endpoint in ({a}, {b})")
        if not a < b:
            raise GeometryError(f"interval needs a < b, got ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.a) and math.isfinite(self.b)

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def gap_to(self, other: "Interval") -> float:
        """Distance between closures; 0 when they touch, negative on overlap."""
        if self.b <= other.a:
            return other.a - self.b
        if other.b <= self.a:
            return self.a - other.b
        return -min(self.b, other.b) + max(self.a, other.a)

    def __str__(self):
        return f"{_fmt(self.a)},{_fmt(self.b)}"


def _fmt(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return repr(float(x))


class IntervalSet:
    """Finite union of open intervals, kept sorted by left endpoint.

    Intervals may touch or overlap; ``strictly_separated`` tells whether all
    closures are pairwise disjoint.
    """

    __slots__ = ("_intervals",)

    def __init__(self, intervals: Iterable[Interval | tuple[float, float]] = ()):
        ivs = [iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals]
        ivs.sort(key=lambda iv: (iv.a, iv.b))
        self._intervals = tuple(ivs)

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._intervals

    def __iter__(self):
        return iter(self._intervals)

    def __len__(self):
        return len(self._intervals)

    def __getitem__(self, k):
        return self._intervals[k]

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self._intervals == other._intervals

    def __hash__(self):
        return hash(self._intervals)

    def __repr__(self):
        return f"IntervalSet({[(iv.a, iv.b) for iv in self._intervals]})"

    def __str__(self):
        return ";".join(str(iv) for iv in self._intervals)

    @property
    def empty(self) -> bool:
        return not self._intervals

    @property
    def bounded(self) -> bool:
        return all(iv.bounded for iv in self._intervals)

    @property
    def measure(self) -> float:
        return sum(iv.length for iv in self.normalized())

    @property
    def min_gap(self) -> float:
        """Smallest distance between consecutive closures (``inf`` for N < 2)."""
        ivs = self._intervals
        if len(ivs) < 2:
            return math.inf
        return min(nxt.a - cur.b for cur, nxt in zip(ivs[:-1], ivs[1:]))

    @property
    def strictly_separated(self) -> bool:
        return self.min_gap > 0

    def endpoints(self) -> list[float]:
        return [e for iv in self._intervals for e in (iv.a, iv.b)]

    def normalized(self) -> "IntervalSet":
        """Merge overlapping intervals; touching ones stay separate pieces."""
        out: list[Interval] = []
        for iv in self._intervals:
            if out and iv.a < out[-1].b:
                last = out.pop()
                out.append(Interval(last.a, max(last.b, iv.b)))
            else:
                out.append(iv)
        return IntervalSet(out)

    def require_separated(self) -> "IntervalSet":
        gap = self.min_gap
        if gap == 0:
            raise TouchingClosuresError(f"closures touch in {self}")
        if gap < 0:
            raise GeometryError(f"intervals overlap in {self}")
        return self

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._intervals + tuple(other))


@dataclass(frozen=True)
class Partition:
    """Split of interval indices ``0..N-1`` into two nonempty groups."""

    p1: tuple[int, ...]
    p2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "p1", tuple(sorted(int(i) for i in self.p1)))
        object.__setattr__(self, "p2", tuple(sorted(int(i) for i in self.p2)))
        if not self.p1 or not self.p2:
            raise GeometryError("both partition blocks must be nonempty")
        if set(self.p1) & set(self.p2):
            raise GeometryError("partition blocks overlap")
        if len(set(self.p1)) != len(self.p1) or len(set(self.p2)) != len(self.p2):
            raise GeometryError("repeated index in partition")

    @property
    def size(self) -> int:
        return len(self.p1) + len(self.p2)

    def validate(self, n: int) -> "Partition":
        if set(self.p1) | set(self.p2) != set(range(n)):
            raise GeometryError(f"partition {self.p1}|{self.p2} does not cover 0..{n - 1}")
        return self

    def swapped(self) -> "Partition":
        return Partition(self.p2, self.p1)


def _log_cross_terms(i1: Interval, i2: Interval) -> float:
    # factors that contain an infinite endpoint appear once above and once
    # below the fraction bar and cancel in the limit
    num = ((i1.a, i2.a), (i1.b, i2.b))
    den = ((i1.a, i2.b), (i1.b, i2.a))
    total = 0.0
    for pairs, sign in ((num, 1.0), (den, -1.0)):
        for x, y in pairs:
            if math.isinf(x) or math.isinf(y):
                continue
            total += sign * math.log(abs(x - y))
    return total


def check_pair(i1: Interval, i2: Interval) -> float:
    """Validate a separated pair and return the gap between closures."""
    if not (i1.bounded or i2.bounded):
        raise GeometryError("at most one of the two intervals may be unbounded")
    gap = i1.gap_to(i2)
    if gap == 0:
        raise TouchingClosuresError(f"closures of ({i1}) and ({i2}) touch")
    if gap < 0:
        raise GeometryError(f"intervals ({i1}) and ({i2}) overlap")
    return gap


def cross_ratio_log(i1: Interval, i2: Interval) -> float:
    """Logarithm of the cross ratio of two intervals with disjoint closures.

    ``ln[|a2-a1||b2-b1| / (|a2-b1||b2-a1|)]``; if one interval is unbounded
    the limit form (e.g. ``ln[(a2-a1)/(a2-b1)]`` for ``i2 = (a2, inf)``) is
    returned. Always positive.
    """
    check_pair(i1, i2)
    return _log_cross_terms(i1, i2)


def multi_cross_ratio_log(iset: IntervalSet, part: Partition) -> float:
    """Sum of pairwise cross-ratio logs between the two partition blocks."""
    iset.require_separated()
    part.validate(len(iset))
    unbounded = [iv for iv in iset if not iv.bounded]
    if len(unbounded) > 1:
        raise GeometryError("at most one interval may be unbounded")
    total = 0.0
    for k in part.p1:
        for l in part.p2:
            total += _log_cross_terms(iset[k], iset[l])
    return total


def apply_mobius(iset: IntervalSet, kind: str, value: float | None = None) -> IntervalSet:
    """Map every endpoint by a translation, a dilation or ``x -> 1/x``."""
    if kind == "translate":
        t = float(value)
        return IntervalSet(Interval(iv.a + t, iv.b + t) for iv in iset)
    if kind == "scale":
        s = float(value)
        if s == 0:
            raise GeometryError("scale factor must be nonzero")
        if s > 0:
            return IntervalSet(Interval(s * iv.a, s * iv.b) for iv in iset)
        return IntervalSet(Interval(s * iv.b, s * iv.a) for iv in iset)
    if kind == "invert":
        if any(e <= 0 for e in iset.endpoints()):
            raise GeometryError("inversion needs strictly positive endpoints")
        return IntervalSet(Interval(1.0 / iv.b, 1.0 / iv.a) for iv in iset)
    raise GeometryError(f"unknown transform {kind!r}")


class SetAlgebra(NamedTuple):
    difference: IntervalSet
    intersection: IntervalSet
    union: IntervalSet


def set_algebra(i1: Interval, i2: Interval) -> SetAlgebra:
    """``i1 \\ i2``, ``i1 & i2`` and ``i1 | i2`` as interval sets.

    Boundary points are ignored (measure-zero), so the difference of
    ``(0, 2)`` and ``(1, 3)`` is ``(0, 1)``.
    """
    lo, hi = max(i1.a, i2.a), min(i1.b, i2.b)
    inter = IntervalSet([Interval(lo, hi)]) if lo < hi else IntervalSet()
    diff = []
    if lo < hi:
        if i1.a < lo:
            diff.append(Interval(i1.a, lo))
        if hi < i1.b:
            diff.append(Interval(hi, i1.b))
    else:
        diff.append(i1)
    union = IntervalSet([i1, i2]).normalized()
    if lo == hi:
        union = IntervalSet([Interval(min(i1.a, i2.a), max(i1.b, i2.b))])
    return SetAlgebra(IntervalSet(diff), inter, union)


def elementary_pieces(*sets: IntervalSet) -> list[Interval]:
    """Common refinement: split the union of all sets at every endpoint."""
    cuts = sorted({e for s in sets for e in s.endpoints()})
    pieces = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi) if math.isfinite(lo) and math.isfinite(hi) else (
            hi - 1.0 if math.isinf(lo) else lo + 1.0)
        if any(iv.a < mid < iv.b for s in sets for iv in s):
            pieces.append(Interval(lo, hi))
    return pieces


def decompose(iset: IntervalSet, pieces: Sequence[Interval]) -> list[int]:
    """Indices of the ``pieces`` whose union is ``iset``."""
    idx = []
    for k, p in enumerate(pieces):
        inside = [iv.a <= p.a and p.b <= iv.b for iv in iset]
        if any(inside):
            idx.append(k)
    covered = sum(pieces[k].length for k in idx)
    if math.isfinite(covered) and not math.isclose(covered, iset.measure, rel_tol=1e-12, abs_tol=1e-14):
        raise GeometryError(f"{iset} is not a union of the given pieces")
    return idx


def parse_interval(text: str) -> Interval:
    """Parse ``"a,b"``; ``inf``/``-inf`` are accepted as endpoints."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise GeometryError(f"cannot parse interval {text!r}; expected 'a,b'")
    try:
        a, b = (float(p) for p in parts)
    except ValueError as exc:
        raise GeometryError(f"cannot parse interval {text!r}: {exc}") from None
    return Interval(a, b)


def parse_interval_set(text: str) -> IntervalSet:
    """Parse a semicolon-separated list such as ``"0,1;4,5"``."""
    chunks = [c for c in text.split(";") if c.strip()]
    if not chunks:
        raise GeometryError(f"empty interval set {text!r}")
    return IntervalSet(parse_interval(c) for c in chunks)


def parse_partitioned_sets(text: str) -> tuple[IntervalSet, Partition]:
    """Parse ``"0,1;4,5|2,3"`` into a combined set and its two-block partition."""
    halves = text.split("|")
    if len(halves) != 2:
        raise GeometryError(f"expected two blocks separated by '|', got {text!r}")
    s1, s2 = parse_interval_set(halves[0]), parse_interval_set(halves[1])
    tagged = sorted([(iv, 0) for iv in s1] + [(iv, 1) for iv in s2], key=lambda p: (p[0].a, p[0].b))
    combined = IntervalSet(iv for iv, _ in tagged)
    p1 = [k for k, (_, g) in enumerate(tagged) if g == 0]
    p2 = [k for k, (_, g) in enumerate(tagged) if g == 1]
    return combined, Partition(p1, p2)
