"""Numerical estimators for traces of entropy-type operator differences.

Two independent routes:

* cutoff route: band-limited projectors on interval unions, eigenvalues, and
  the combination ``S(A) + S(B) - S(A u B)`` swept over the cutoff,
* block-word route (monomials ``t^m``): the exact expansion of
  ``P(A u B)^m`` into blocks, with principal-value diagonal blocks.

The cutoff symbol has two Fermi points while the half-line projector has one,
so cutoff estimates converge to twice the single-point value. The factor is
recorded as ``chirality_factor`` and never applied silently.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .closedform import separation_expansion
from .errors import ArgumentError, GeometryError, NumericalError, ResourceError
from .geometry import (Interval, IntervalSet, check_pair, decompose, elementary_pieces,
                       set_algebra)
from .quad import QuadratureRule, composite_gauss_legendre, gauss_legendre, graded_breaks, oscillatory_nodes
from .specops import (NODE_CAP, assemble_cross_block, assemble_pv_block, entropy_sum,
                      sine_kernel_matrix, sym_eig)
from .testfns import TestFunction

log = logging.getLogger(__name__)

MAX_WORD_LENGTH = 8
CHIRALITY_FACTOR = 2.0


@dataclass(frozen=True)
class SweepConfig:
    """Cutoff sweep over ``kappa`` (wavenumber of the sine kernel).

    ``nodes`` is ``None`` for automatic sizing at ``kappa_max`` or a fixed
    node count per elementary interval.
    """

    kappa_min: float
    kappa_max: float
    samples: int = 61
    averaging: str = "window_mean"
    nodes: int | None = None
    node_cap: int = NODE_CAP

    def __post_init__(self):
        if self.samples < 1:
            raise ArgumentError("samples must be positive")
        if self.samples == 1 and self.kappa_min > self.kappa_max:
            raise ArgumentError("kappa_min must not exceed kappa_max")
        if self.samples > 1 and not self.kappa_min < self.kappa_max:
            raise ArgumentError("kappa_min must be below kappa_max")
        if not self.kappa_min > 0:
            raise ArgumentError("kappa must be positive")
        if self.averaging not in ("none", "window_mean"):
            raise ArgumentError(f"unknown averaging {self.averaging!r}")
        if self.samples < 3:
            warnings.warn("fewer than 3 sweep samples: no error bar", RuntimeWarning, stacklevel=3)

    @property
    def kappas(self) -> np.ndarray:
        if self.samples == 1:
            return np.array([float(self.kappa_max)])
        return np.linspace(self.kappa_min, self.kappa_max, self.samples)


@dataclass
class TraceEstimate:
    value: float
    error_bar: float
    per_kappa: list = field(default_factory=list)
    chirality_factor: float = CHIRALITY_FACTOR
    windows: list = field(default_factory=list)

    @property
    def chiral_value(self) -> float:
        return self.value / self.chirality_factor

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bar": self.error_bar,
            "chirality_factor": self.chirality_factor,
            "chiral_value": self.chiral_value,
            "per_kappa": [[float(k), float(v)] for k, v in self.per_kappa],
        }


# ---------------------------------------------------------------- cutoff route

def min_endpoint_distance(pieces) -> float:
    ends = sorted({e for p in pieces for e in (p.a, p.b)})
    return float(np.min(np.diff(ends)))


class CutoffEngine:
    """Shared Gauss-Legendre panels for one set of elementary intervals.

    Every system in a sweep is assembled from the same panels so the
    single-set divergences cancel node for node.
    """

    def __init__(self, pieces, kappa_max: float, nodes: int | None = None, node_cap: int = NODE_CAP):
        self.pieces = list(pieces)
        if not all(p.bounded for p in self.pieces):
            raise ArgumentError("cutoff route needs bounded intervals")
        self.rules: list[QuadratureRule] = []
        for p in self.pieces:
            n = nodes if nodes is not None else oscillatory_nodes(kappa_max, p.length)
            if n > node_cap:
                raise ResourceError(f"{n} nodes for ({p}) exceed the cap of {node_cap}")
            self.rules.append(gauss_legendre(n, p))

    def entropy(self, idx, f: TestFunction, kappa: float) -> float:
        if not idx:
            return 0.0
        x = np.concatenate([self.rules[i].nodes for i in idx])
        w = np.concatenate([self.rules[i].weights for i in idx])
        spec = sym_eig(sine_kernel_matrix(x, w, kappa))
        return entropy_sum(spec, f).value

    def combination(self, terms, f: TestFunction, kappa: float) -> float:
        """``sum sign * S(union of pieces)`` over ``(sign, indices)`` terms."""
        return math.fsum(sign * self.entropy(idx, f, kappa) for sign, idx in terms)


def _terms_for(sets_with_signs, pieces):
    return [(sign, decompose(s, pieces)) for sign, s in sets_with_signs]


def _delta_sets(set1: IntervalSet, set2: IntervalSet):
    return [(1.0, set1), (1.0, set2), (-1.0, set1 | set2)]


def delta_raw(set1: IntervalSet, set2: IntervalSet, f: TestFunction, kappa: float,
              engine: CutoffEngine | None = None, nodes: int | None = None) -> float:
    """``S(set1) + S(set2) - S(set1 u set2)`` at one cutoff, no separation check."""
    engine = engine or CutoffEngine(elementary_pieces(set1, set2), kappa, nodes)
    return engine.combination(_terms_for(_delta_sets(set1, set2), engine.pieces), f, kappa)


def _average(kappas, raw, averaging: str, d: float):
    kappas, raw = np.asarray(kappas), np.asarray(raw)
    if raw.size == 1:
        return float(raw[0]), 0.0, []
    if averaging == "none":
        return float(raw[-1]), float(np.std(raw, ddof=1)), []
    # windows span at least two periods of cos(2 kappa d)
    width = 2.0 * math.pi / d
    n_win = int((kappas[-1] - kappas[0]) // width)
    if n_win < 2:
        return float(np.mean(raw)), float(np.std(raw, ddof=1)), []
    edges = np.linspace(kappas[0], kappas[-1], n_win + 1)
    means = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (kappas >= lo) & ((kappas < hi) | (hi == edges[-1]))
        if np.any(sel):
            means.append(float(np.mean(raw[sel])))
    means = np.array(means)
    return float(np.mean(means)), float(np.std(means, ddof=1)), means.tolist()


def _sweep(set_terms, pieces, f: TestFunction, sweep: SweepConfig) -> TraceEstimate:
    kappas = sweep.kappas
    engine = CutoffEngine(pieces, float(kappas.max()), sweep.nodes, sweep.node_cap)
    terms = _terms_for(set_terms, pieces)
    raw = [engine.combination(terms, f, float(k)) for k in kappas]
    value, err, windows = _average(kappas, raw, sweep.averaging, min_endpoint_distance(pieces))
    return TraceEstimate(value, err, list(zip(kappas.tolist(), raw)), CHIRALITY_FACTOR, windows)


def delta_trace_cutoff(set1: IntervalSet, set2: IntervalSet, f: TestFunction,
                       sweep: SweepConfig) -> TraceEstimate:
    """Cutoff estimate of ``tr[f(P(A)) + f(P(B)) - f(P(A u B))]`` (two Fermi points)."""
    if not (set1.bounded and set2.bounded):
        raise ArgumentError("cutoff route needs bounded intervals")
    (set1 | set2).require_separated()
    pieces = list((set1 | set2).intervals)
    return _sweep(_delta_sets(set1, set2), pieces, f, sweep)


def _intersect_parts(i1: Interval, i2: Interval):
    alg = set_algebra(i1, i2)
    if alg.intersection.empty or alg.intersection.measure <= 0:
        raise GeometryError(f"intervals ({i1}) and ({i2}) do not overlap")
    if alg.difference.empty or set_algebra(i2, i1).difference.empty:
        raise GeometryError("each interval must stick out of the other")
    return alg


def _f_sets(i1: Interval, i2: Interval):
    alg = _intersect_parts(i1, i2)
    s1, s2 = IntervalSet([i1]), IntervalSet([i2])
    return [(1.0, s1), (1.0, s2), (-1.0, alg.intersection), (-1.0, alg.union)], \
        elementary_pieces(s1, s2)


def f_raw(i1: Interval, i2: Interval, f: TestFunction, kappa: float,
          engine: CutoffEngine | None = None, nodes: int | None = None) -> float:
    """``S(I1) + S(I2) - S(I1 n I2) - S(I1 u I2)`` at one cutoff."""
    terms, pieces = _f_sets(i1, i2)
    engine = engine or CutoffEngine(pieces, kappa, nodes)
    return engine.combination(_terms_for(terms, engine.pieces), f, kappa)


def f_trace_cutoff(i1: Interval, i2: Interval, f: TestFunction, sweep: SweepConfig) -> TraceEstimate:
    """Cutoff estimate for overlapping intervals (two Fermi points)."""
    if not (i1.bounded and i2.bounded):
        raise ArgumentError("cutoff route needs bounded intervals")
    terms, pieces = _f_sets(i1, i2)
    return _sweep(terms, pieces, f, sweep)


# ---------------------------------------------------------------- block words

def cyclic_words(m: int) -> dict[tuple, int]:
    """Closed walks on the two blocks of length m visiting both, up to rotation.

    Maps the canonical (lexicographically smallest) rotation to its orbit size.
    """
    out: dict[tuple, int] = {}
    for seq in itertools.product((0, 1), repeat=m):
        if len(set(seq)) < 2:
            continue
        rots = {seq[i:] + seq[:i] for i in range(m)}
        out[min(rots)] = len(rots)
    return out


def _interval_rule(iv: Interval, n: int, grade=None, finest=None) -> tuple[QuadratureRule, np.ndarray | None]:
    if grade is None:
        return gauss_legendre(n, iv), None
    br = graded_breaks(iv, grade, finest)
    return composite_gauss_legendre(br, n, iv), br


def word_traces(i1: Interval, i2: Interval, m: int, n_nodes: int = 64, grade=(None, None),
                finest: float | None = None) -> dict[tuple, complex]:
    """Trace of every canonical block word (without multiplicity)."""
    if m < 2 or m > MAX_WORD_LENGTH:
        raise ArgumentError(f"word length must lie in 2..{MAX_WORD_LENGTH}")
    check_pair(i1, i2)
    r1, b1 = _interval_rule(i1, n_nodes, grade[0], finest) if i1.bounded else (None, None)
    r2, b2 = _interval_rule(i2, n_nodes, grade[1], finest) if i2.bounded else (None, None)
    if r1 is None or r2 is None:
        if m > 2:
            raise ArgumentError("words with diagonal blocks need bounded intervals")
        cb = assemble_cross_block(i1, i2, n_nodes, n_nodes)
    else:
        cb = assemble_cross_block(i1, i2, n_nodes, n_nodes, rules=(r1, r2))
    T = cb.complex_matrix
    blocks = {(0, 1): T, (1, 0): T.conj().T}
    if m > 2:
        blocks[(0, 0)] = assemble_pv_block(i1, n_nodes, b1).collocation
        blocks[(1, 1)] = assemble_pv_block(i2, n_nodes, b2).collocation
    out = {}
    for w in cyclic_words(m):
        P = blocks[(w[0], w[1 % m])]
        for i in range(1, m):
            P = P @ blocks[(w[i], w[(i + 1) % m])]
        out[w] = complex(np.trace(P))
    return out


def delta_trace_poly(i1: Interval, i2: Interval, m: int, n_nodes: int = 64, **kw) -> float:
    """``tr[f(P(I1)) + f(P(I2)) - f(P(I1 u I2))]`` for ``f = t^m`` via block words.

    ``-sum`` of all word traces with at least one off-diagonal block.
    """
    traces = word_traces(i1, i2, m, n_nodes, **kw)
    mult = cyclic_words(m)
    total = -sum(mult[w] * t for w, t in sorted(traces.items()))
    # the exact trace is real; the imaginary residue tracks discretization error
    if abs(total.imag) > 1e-3 * max(abs(total.real), 1e-12):
        raise NumericalError("block-word trace is not real", imag=total.imag)
    return float(total.real)


@dataclass
class PolyLimitResult:
    value: float
    per_eps: list
    drift: float
    fit_residual: float


def f_trace_poly_limit(i1: Interval, i2: Interval, m: int, eps_list, n_nodes: int = 16) -> PolyLimitResult:
    """``tr F(I1, I2; t^m)`` from shrunken differences and a linear fit in eps.

    With ``J = I1 \\ I2`` pulled back from ``I2`` by ``eps`` the value
    ``Delta(J_eps, I2) - Delta(J_eps, I1 n I2)`` is finite for each eps; the
    three smallest eps are fitted linearly and the intercept returned.
    Panels are graded geometrically toward the eps-gap.
    """
    alg = _intersect_parts(i1, i2)
    (J,) = alg.difference.intervals if len(alg.difference) == 1 else (None,)
    if J is None:
        raise GeometryError("I1 \\ I2 must be a single interval")
    inter = alg.intersection.intervals[0]
    eps = np.sort(np.asarray(eps_list, dtype=float))
    if eps.size < 3:
        raise ArgumentError("need at least three eps values")
    if eps[-1] >= 0.5 * J.length:
        raise ArgumentError("eps must be small compared with |I1 \\ I2|")
    rows = []
    for e in eps:
        if J.b <= i2.a:  # difference on the left
            Je, g_j, g_o = Interval(J.a, J.b - e), "right", "left"
        else:
            Je, g_j, g_o = Interval(J.a + e, J.b), "left", "right"
        a = delta_trace_poly(Je, i2, m, n_nodes, grade=(g_j, g_o), finest=e)
        b = delta_trace_poly(Je, inter, m, n_nodes, grade=(g_j, g_o), finest=e)
        rows.append((float(e), a - b))
    v = np.array([r[1] for r in rows])
    coef = np.polyfit(eps[:3], v[:3], 1)
    resid = float(np.max(np.abs(np.polyval(coef, eps[:3]) - v[:3])))
    value = float(coef[1])
    if not np.isfinite(value) or resid > 1e-3 * max(abs(value), 1e-12):
        raise NumericalError("eps extrapolation did not settle", residual=resid, value=value)
    return PolyLimitResult(value, rows, float(np.ptp(v)), resid)


# ---------------------------------------------------------------- asymptotics

@dataclass
class AsymptoticTable:
    rows: list

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.exact / r.leading - 1.0 for r in self.rows])

    @property
    def residual_ratios(self) -> np.ndarray:
        res = self.residuals
        return res[1:] / res[:-1]


def asymptotic_check(i1: Interval, i2: Interval, alpha: float, r_list) -> AsymptoticTable:
    """Exact vs leading large-distance Renyi entropy for ``i2`` shifted by each r."""
    r = np.asarray(r_list, dtype=float)
    if np.any(np.diff(r) <= 0):
        raise ArgumentError("r_list must increase")
    return AsymptoticTable([separation_expansion(i1, i2, float(x), alpha) for x in r])
