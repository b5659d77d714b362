"""Widom-type coefficient for mollified interval symbols.

For symbols ``a`` with values in [0, 1] the coefficient is

    B(a; f) = 1/(8 pi^2) int int U(a(x), a(y); f) / (x - y)^2 dx dy.

For two intervals with smooth cutoffs ``phi_1``, ``phi_2`` the combination
``B(phi_1^2) + B(phi_2^2) - B((phi_1 + phi_2)^2)`` only receives
contributions from ``I1 x I2`` (and its mirror), where the integrand is
``U(s, 0) + U(0, u) - U(s, u)`` with ``s = phi_1^2(x)``, ``u = phi_2^2(y)``.
Plateau x plateau is done in closed form; every region touching a collar
is integrated by tensor Gauss-Legendre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ArgumentError
from .geometry import Interval, IntervalSet, cross_ratio_log
from .quad import QuadratureRule, composite_gauss_legendre, gauss_legendre, graded_breaks
from .testfns import TestFunction, smooth_step, u_coefficient, u_values

EIGHT_PI_SQ = 8.0 * math.pi ** 2


@dataclass(frozen=True)
class MollifiedSymbol:
    """Smooth approximation of the indicator of ``base`` with collar width ``epsilon``."""

    base: IntervalSet
    epsilon: float
    profile: Callable = field(default=smooth_step, repr=False)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ArgumentError("epsilon must be positive")
        if self.base.empty or not self.base.bounded:
            raise ArgumentError("mollified symbols need nonempty bounded intervals")
        if any(self.epsilon >= 0.5 * iv.length for iv in self.base):
            raise ArgumentError("epsilon must be below half of every interval length")
        if len(self.base) > 1:
            gap = self.base.min_gap
            if not self.epsilon < 0.25 * gap:
                raise ArgumentError("epsilon must be below a quarter of the gap")

    def regions(self):
        """``(interval, kind)`` pieces per base interval, kind in {left, plateau, right}."""
        e = self.epsilon
        out = []
        for iv in self.base:
            out.append((Interval(iv.a, iv.a + e), "left", iv))
            out.append((Interval(iv.a + e, iv.b - e), "plateau", iv))
            out.append((Interval(iv.b - e, iv.b), "right", iv))
        return out


def mollifier_eval(sym: MollifiedSymbol, x) -> np.ndarray | float:
    """``phi_eps(x)``: exactly 1 on plateaus, exactly 0 outside the base set."""
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    e = sym.epsilon
    for iv in sym.base:
        m = (xa > iv.a) & (xa < iv.b)
        out[m] = sym.profile(np.minimum(xa[m] - iv.a, iv.b - xa[m]) / e)
    return out if out.ndim else float(out)


def mollifier_d1(sym: MollifiedSymbol, x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa)
    e = sym.epsilon
    for iv in sym.base:
        left = (xa > iv.a) & (xa - iv.a < iv.b - xa)
        right = (xa < iv.b) & ~left & (xa > iv.a)
        out[left] = smooth_step((xa[left] - iv.a) / e, 1) / e
        out[right] = -smooth_step((iv.b - xa[right]) / e, 1) / e
    return out


def _rule(iv: Interval, n: int, toward: str | None = None, finest: float | None = None) -> QuadratureRule:
    if toward is None or finest is None or finest >= iv.length:
        return gauss_legendre(n, iv)
    return composite_gauss_legendre(graded_breaks(iv, toward, finest), n, iv)


# ---------------------------------------------------------------- Besov seminorm

@dataclass(frozen=True)
class BesovValue:
    value: float
    quadrature_error: float


def _besov_sq(sym: MollifiedSymbol, n: int) -> float:
    pieces = []  # (interval, constant value or None)
    ends = sym.base.intervals
    pieces.append((Interval(-math.inf, ends[0].a), 0.0))
    for k, (reg, kind, _) in enumerate(sym.regions()):
        pieces.append((reg, 1.0 if kind == "plateau" else None))
        if kind == "right" and k // 3 + 1 < len(ends):
            pieces.append((Interval(ends[k // 3].b, ends[k // 3 + 1].a), 0.0))
    pieces.append((Interval(ends[-1].b, math.inf), 0.0))

    total = 0.0
    rules = {}
    for i, (A, ca) in enumerate(pieces):
        if ca is None:
            rules[i] = gauss_legendre(n, A)
    for i, (A, ca) in enumerate(pieces):
        for j in range(i, len(pieces)):
            B, cb = pieces[j]
            sym_factor = 1.0 if i == j else 2.0
            if ca is not None and cb is not None:
                if ca != cb:
                    total += sym_factor * (ca - cb) ** 2 * cross_ratio_log(A, B)
                continue
            if ca is None and cb is None:
                ra, rb = rules[i], rules[j]
                x, y = ra.nodes[:, None], rb.nodes[None, :]
                fa, fb = mollifier_eval(sym, ra.nodes)[:, None], mollifier_eval(sym, rb.nodes)[None, :]
                with np.errstate(divide="ignore", invalid="ignore"):
                    G = (fa - fb) ** 2 / (x - y) ** 2
                if i == j:
                    d = mollifier_d1(sym, ra.nodes)
                    G[np.diag_indices_from(G)] = d ** 2
                total += sym_factor * float(ra.weights @ G @ rb.weights)
                continue
            # collar against a constant region: inner integral in closed form
            (cr, c), k = ((B, cb), i) if ca is None else ((A, ca), j)
            r = rules[k]
            x = r.nodes
            p, q = cr.a, cr.b
            inner = np.abs((0.0 if math.isinf(p) else 1.0 / (p - x)) - (0.0 if math.isinf(q) else 1.0 / (q - x)))
            vals = (mollifier_eval(sym, x) - c) ** 2 * inner
            total += sym_factor * float(r.weights @ vals)
    return total / EIGHT_PI_SQ


def besov_seminorm(sym: MollifiedSymbol, n: int = 48) -> BesovValue:
    """Square root of ``1/(8 pi^2) int int (a(x) - a(y))^2/(x - y)^2``.

    Error estimate: change against a rule with 3/2 as many nodes per collar.
    """
    v1 = _besov_sq(sym, n)
    v2 = _besov_sq(sym, (3 * n) // 2)
    return BesovValue(math.sqrt(v2), abs(math.sqrt(v2) - math.sqrt(v1)))


# ---------------------------------------------------------------- combination

def _g_values(f: TestFunction, s: np.ndarray, u: np.ndarray, level: int) -> np.ndarray:
    """``U(s,0) + U(0,u) - U(s,u)`` on the tensor grid ``s x u``."""
    Us0 = u_values(f, s, 0.0, level)[:, None]
    U0u = u_values(f, 0.0, u, level)[None, :]
    S, V = np.meshgrid(s, u, indexing="ij")
    return Us0 + U0u - u_values(f, S, V, level)


def widom_combination(i1: Interval, i2: Interval, f: TestFunction, epsilon: float,
                      n: int = 40, level: int = 8) -> float:
    """``B(phi_1^2; f) + B(phi_2^2; f) - B(phi^2; f)`` for collar width ``epsilon``."""
    s1 = MollifiedSymbol(IntervalSet([i1]), epsilon)
    s2 = MollifiedSymbol(IntervalSet([i2]), epsilon)
    MollifiedSymbol(IntervalSet([i1, i2]), epsilon)  # joint constraints
    u01 = u_coefficient(f, 0.0, 1.0).value
    right_of = i2.a > i1.a
    total = 0.0
    for A, ka, _ in s1.regions():
        for B, kb, _ in s2.regions():
            if ka == "plateau" and kb == "plateau":
                total += 2.0 * u01 * cross_ratio_log(A, B)
                continue
            dist = A.gap_to(B)
            ra = _rule(A, n, ("right" if right_of else "left") if ka == "plateau" else None, dist)
            rb = _rule(B, n, ("left" if right_of else "right") if kb == "plateau" else None, dist)
            s = mollifier_eval(s1, ra.nodes) ** 2
            u = mollifier_eval(s2, rb.nodes) ** 2
            G = _g_values(f, s, u, level)
            K = 1.0 / (ra.nodes[:, None] - rb.nodes[None, :]) ** 2
            total += float(ra.weights @ (G * K) @ rb.weights)
    return 2.0 * total / EIGHT_PI_SQ


@dataclass
class WidomLimit:
    rows: list  # (epsilon, value)
    extrapolated: float
    reference: float


def richardson(v_e: float, v_e2: float, v_e4: float) -> float:
    """Limit from values at eps, eps/2, eps/4 removing O(eps) and O(eps^2) terms."""
    return (8.0 * v_e4 - 6.0 * v_e2 + v_e) / 3.0


def widom_limit(i1: Interval, i2: Interval, f: TestFunction, epsilon: float, n: int = 40) -> WidomLimit:
    """Evaluate at ``eps, eps/2, eps/4`` and extrapolate to ``eps -> 0``."""
    eps = [epsilon, epsilon / 2.0, epsilon / 4.0]
    vals = [widom_combination(i1, i2, f, e, n) for e in eps]
    ref = u_coefficient(f, 0.0, 1.0).value / (2.0 * math.pi ** 2) * cross_ratio_log(i1, i2)
    return WidomLimit(list(zip(eps, vals)), richardson(*vals), ref)
