"""Quadrature rules: Gauss-Legendre, tanh-sinh, semi-infinite maps and
principal-value corrected rules.

All rules are immutable :class:`QuadratureRule` records. The tanh-sinh rule
also stores the distances of every node to both domain ends, computed without
cancellation, so integrands with endpoint singularities can be evaluated
accurately right next to the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import expit

from .errors import ArgumentError, NumericalError
from .geometry import Interval

SCHEMES = ("gauss_legendre", "tanh_sinh", "pv_corrected", "composite", "semi_infinite")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    domain: Interval
    left_gap: np.ndarray | None = field(default=None, repr=False)
    right_gap: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("nodes", "weights", "left_gap", "right_gap"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.nodes)

    def integrate(self, func) -> float:
        return float(np.dot(self.weights, func(self.nodes)))


@lru_cache(maxsize=64)
def _legendre_reference(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on (-1, 1) by Newton iteration on P_n."""
    k = np.arange(1, n + 1)
    # Chebyshev-type initial guess, descending order
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise NumericalError(f"Legendre root iteration did not converge for n={n}")
    # refresh derivative at the converged nodes
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1].copy(), w[::-1].copy()
    # exact mirror symmetry
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def _require_finite(domain: Interval):
    if not domain.bounded:
        raise ArgumentError(f"rule needs a finite domain, got ({domain})")


def gauss_legendre(n: int, domain: Interval = Interval(-1.0, 1.0)) -> QuadratureRule:
    """n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1."""
    if n < 1:
        raise ArgumentError("n must be positive")
    _require_finite(domain)
    x, w = _legendre_reference(int(n))
    half = 0.5 * domain.length
    nodes = domain.a + half * (x + 1.0)
    return QuadratureRule(nodes, half * w, "gauss_legendre", domain)


def oscillatory_nodes(wavenumber: float, length: float, margin: int = 16) -> int:
    """Node count for a kernel oscillating with ``wavenumber`` on ``length``."""
    return int(math.ceil(2.0 * wavenumber * length / math.pi)) + margin


def composite_gauss_legendre(breaks, n: int, domain: Interval | None = None) -> QuadratureRule:
    """Gauss-Legendre on each panel ``[breaks[k], breaks[k+1]]``."""
    breaks = np.asarray(breaks, dtype=float)
    if np.any(np.diff(breaks) <= 0):
        raise ArgumentError("panel breakpoints must increase")
    x, w = _legendre_reference(int(n))
    lo, hi = breaks[:-1, None], breaks[1:, None]
    nodes = (lo + 0.5 * (hi - lo) * (x + 1.0)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    dom = domain or Interval(breaks[0], breaks[-1])
    return QuadratureRule(nodes, weights, "composite", dom)


def graded_breaks(domain: Interval, toward: str | None, finest: float, ratio: float = 0.5,
                  base_panels: int = 1) -> np.ndarray:
    """Panel breakpoints refined geometrically toward one or both ends.

    Panels shrink by ``ratio`` until they are no wider than ``finest``.
    """
    _require_finite(domain)
    L = domain.length
    if toward is None or finest >= L / base_panels:
        return np.linspace(domain.a, domain.b, base_panels + 1)
    depth = max(1, int(math.ceil(math.log(finest / L) / math.log(ratio))))
    offsets = L * ratio ** np.arange(depth, 0, -1)
    if toward == "right":
        return np.concatenate([[domain.a], domain.b - offsets[::-1], [domain.b]])
    if toward == "left":
        return np.concatenate([[domain.a], domain.a + offsets, [domain.b]])
    if toward == "both":
        half = 0.5 * L
        offsets = half * ratio ** np.arange(depth, 0, -1)
        left = domain.a + offsets
        right = domain.b - offsets[::-1]
        return np.concatenate([[domain.a], left, [domain.a + half], right, [domain.b]])
    raise ArgumentError(f"unknown grading direction {toward!r}")


def tanh_sinh(levels: int = 7, domain: Interval = Interval(0.0, 1.0), s_max: float = 4.0) -> QuadratureRule:
    """Double-exponential rule with step ``h = 2**(3 - levels)``.

    Nodes whose distance to the right end would round to zero are dropped so
    that every node lies strictly inside the open domain.
    """
    if levels < 3:
        raise ArgumentError("tanh-sinh needs levels >= 3")
    _require_finite(domain)
    h = 2.0 ** (3 - levels)
    m = int(math.floor(s_max / h))
    s = h * np.arange(-m, m + 1)
    q = 0.5 * np.pi * np.sinh(s)
    # x = 1/(1+e^{-2q}), 1-x = 1/(1+e^{2q}) without subtraction
    u = 1.0 / (1.0 + np.exp(-2.0 * q))
    c = 1.0 / (1.0 + np.exp(2.0 * q))
    w = h * 0.5 * np.pi * np.cosh(s) * u * c * 2.0
    L = domain.length
    left, right = L * u, L * c
    nodes = domain.a + left
    keep = (nodes > domain.a) & (nodes < domain.b) & (w > 0)
    keep &= np.concatenate([[True], np.diff(nodes) > 0])
    return QuadratureRule(nodes[keep], L * w[keep], "tanh_sinh", domain,
                          left_gap=left[keep], right_gap=right[keep])


def tanh_sinh_gaps(levels: int = 8, s_max: float = 6.2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tanh-sinh on (0, 1) in gap form: ``(t, 1 - t, w)``.

    Both gaps are computed directly, so nodes pile up to ~1e-300 at either end
    even though ``1 - t`` is not representable as a node near 1. Needed for
    integrands with algebraic end singularities of small exponent.
    """
    h = 2.0 ** (3 - levels)
    m = int(math.floor(s_max / h))
    s = h * np.arange(-m, m + 1)
    q = 0.5 * np.pi * np.sinh(s)
    t, c = expit(2.0 * q), expit(-2.0 * q)
    w = h * np.pi * np.cosh(s) * t * c
    keep = (t > 0) & (c > 0) & (w > 0)
    return t[keep], c[keep], w[keep]


@dataclass(frozen=True, eq=False)
class SemiInfiniteRule(QuadratureRule):
    """Rule on ``(lower, inf)`` obtained by mapping a rule on (0, 1)."""

    offsets: np.ndarray | None = field(default=None, repr=False)

    def integrate_checked(self, func) -> tuple[float, bool]:
        """Integrate and report whether the far tail looks convergent.

        The contribution of the outermost two decades of ``lambda`` is compared
        with the two decades before them. Power decay faster than
        ``lambda**-1`` shrinks this ratio well below one.
        """
        vals = self.weights * func(self.nodes)
        total = float(np.sum(vals))
        if not np.isfinite(total):
            return total, False
        top = float(np.max(self.offsets))
        far = np.abs(np.sum(vals[self.offsets > 1e-2 * top]))
        mid = np.abs(np.sum(vals[(self.offsets > 1e-4 * top) & (self.offsets <= 1e-2 * top)]))
        if far <= 1e-14 * max(abs(total), 1e-300):
            return total, True
        return total, bool(far < 0.5 * mid)


def semi_infinite(mapping: str, base_rule: QuadratureRule, lower: float = 0.5) -> SemiInfiniteRule:
    """Map a rule on (0, 1) to ``(lower, inf)``.

    ``rational``: ``x = lower + u/(1-u)``; ``exp``: ``x = lower + expm1(u/(1-u))``.
    Weights include the Jacobian. Exp-mapped nodes beyond ``e**700`` are dropped.
    """
    if base_rule.domain.a != 0.0 or base_rule.domain.b != 1.0:
        raise ArgumentError("base rule must live on (0, 1)")
    u, w = base_rule.nodes, base_rule.weights
    c = base_rule.right_gap if base_rule.right_gap is not None else 1.0 - u
    v = u / c
    if mapping == "rational":
        off, jac = v, 1.0 / (c * c)
    elif mapping == "exp":
        ok = v < 700.0
        c, v, w = c[ok], v[ok], w[ok]
        off, jac = np.expm1(v), np.exp(v) / (c * c)
    else:
        raise ArgumentError(f"unknown map {mapping!r}")
    return SemiInfiniteRule(lower + off, w * jac, "semi_infinite",
                            Interval(lower, math.inf), offsets=off)


def graded_unit_rule(panels_per_side: int = 40, ratio: float = 0.5, n: int = 10) -> QuadratureRule:
    """Composite Gauss-Legendre on (0, 1) graded geometrically toward both ends.

    The rule is mirror symmetric, so distances to the right end are the
    reversed nodes and carry no cancellation error.
    """
    left = 0.5 * ratio ** np.arange(panels_per_side, 0, -1)
    breaks = np.concatenate([[0.0], left, [0.5], 1.0 - left[::-1], [1.0]])
    x, w = _legendre_reference(int(n))
    lo, hi = breaks[:panels_per_side + 1, None], breaks[1:panels_per_side + 2, None]
    half_nodes = (lo + 0.5 * (hi - lo) * (x + 1.0)).ravel()
    half_weights = (0.5 * (hi - lo) * w).ravel()
    nodes = np.concatenate([half_nodes, 1.0 - half_nodes[::-1]])
    weights = np.concatenate([half_weights, half_weights[::-1]])
    return QuadratureRule(nodes, weights, "composite", Interval(0.0, 1.0),
                          left_gap=nodes.copy(),
                          right_gap=np.concatenate([1.0 - half_nodes, half_nodes[::-1]]))


@dataclass(frozen=True, eq=False)
class PVRule(QuadratureRule):
    """Gauss-Legendre panels packaged with the principal-value correction.

    ``matrix @ phi(nodes)`` approximates ``PV int phi(y)/(x_i - y) dy`` at
    every node by subtract-and-add over the whole domain: the divided
    difference ``(phi(y) - phi(x_i))/(x_i - y)`` is smooth and integrated by
    the panels, the log term makes the rule exact for constants, and the self
    term ``-w_i phi'(x_i)`` comes from the node's panel interpolant.
    """

    breaks: np.ndarray | None = field(default=None, repr=False)
    panel_size: int = 0

    def _panels(self):
        n = self.panel_size
        for p in range(len(self.breaks) - 1):
            yield slice(p * n, (p + 1) * n), self.breaks[p], self.breaks[p + 1]

    @property
    def off_diagonal(self) -> np.ndarray:
        x, w = self.nodes, self.weights
        d = x[:, None] - x[None, :]
        np.fill_diagonal(d, 1.0)
        off = w[None, :] / d
        np.fill_diagonal(off, 0.0)
        return off

    @property
    def log_term(self) -> np.ndarray:
        a, b = self.domain.a, self.domain.b
        return np.log((self.nodes - a) / (b - self.nodes))

    @property
    def derivative(self) -> np.ndarray:
        """Block-diagonal Lagrange differentiation on each panel."""
        n = self.panel_size
        ref, wref = _legendre_reference(n)
        bary = (-1.0) ** np.arange(n) * np.sqrt((1.0 - ref * ref) * wref)
        D = np.zeros((len(self.nodes), len(self.nodes)))
        for sl, _, _ in self._panels():
            x = self.nodes[sl]
            d = x[:, None] - x[None, :]
            np.fill_diagonal(d, 1.0)
            Dp = (bary[None, :] / bary[:, None]) / d
            np.fill_diagonal(Dp, 0.0)
            np.fill_diagonal(Dp, -Dp.sum(axis=1))
            D[sl, sl] = Dp
        return D

    @property
    def matrix(self) -> np.ndarray:
        off = self.off_diagonal
        corr = np.diag(self.log_term - off.sum(axis=1))
        return off + corr - self.weights[:, None] * self.derivative

    def apply(self, phi_values) -> np.ndarray:
        return self.matrix @ np.asarray(phi_values)

    def at(self, x: float, phi) -> float:
        """PV integral at an arbitrary interior point."""
        a, b = self.domain.a, self.domain.b
        if not a < x < b:
            raise ArgumentError(f"evaluation point {x} outside ({a}, {b})")
        hit = np.flatnonzero(self.nodes == x)
        if hit.size:
            return float(self.apply(phi(self.nodes))[hit[0]])
        y, w = self.nodes, self.weights
        fx = float(np.asarray(phi(np.array([x])))[0])
        s = np.sum(w * (phi(y) - fx) / (x - y))
        return float(s + fx * math.log((x - a) / (b - x)))


def pv_rule(n: int, domain: Interval, breaks=None) -> PVRule:
    """Node-collocated rule for ``PV int_a^b phi(y)/(x - y) dy``.

    ``breaks`` optionally splits the domain into panels of ``n`` nodes each.
    """
    if n < 8:
        raise ArgumentError("pv_rule needs n >= 8")
    _require_finite(domain)
    breaks = np.array([domain.a, domain.b] if breaks is None else breaks, dtype=float)
    if breaks[0] != domain.a or breaks[-1] != domain.b:
        raise ArgumentError("panel breaks must span the domain")
    g = composite_gauss_legendre(breaks, n, domain)
    return PVRule(g.nodes, g.weights, "pv_corrected", domain, breaks=breaks, panel_size=int(n))
