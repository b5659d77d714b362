"""Test functions, the two-point coefficient ``U(s1, s2; f)`` and the local
Hoelder-type norm used to check admissibility of a test function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .errors import ArgumentError, FunctionSpecError, NumericalError
from .geometry import Interval
from .quad import tanh_sinh_gaps

Array = np.ndarray
ALPHA_ONE_TOL = 1e-9
ALPHA_SERIES_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Real function with analytic first and second derivatives.

    ``singular_points`` lists where the function may fail to be C^2. ``mirror``
    marks ``f(1 - t) == f(t)``, which lets callers evaluate near 1 through an
    exactly computed distance to 1. All callables take and return numpy arrays.
    """

    eval: Callable[[Array], Array]
    d1: Callable[[Array], Array]
    d2: Callable[[Array], Array]
    support_hint: Interval = Interval(0.0, 1.0)
    zero_at_zero: bool = True
    singular_points: tuple = ()
    name: str = "custom"
    kind: str = "custom"
    params: tuple = field(default=())
    mirror: bool = False

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, t):
        return self.eval(np.asarray(t, dtype=float))

    def __repr__(self):
        return f"TestFunction({self.name})"


def _check_alpha(alpha: float):
    if not alpha > 0 or math.isnan(alpha):
        raise ArgumentError(f"alpha must be positive, got {alpha}")


def _inside(t: Array):
    t = np.asarray(t, dtype=float)
    m = (t > 0.0) & (t < 1.0)
    return t, m


def renyi_eval(alpha: float, t) -> Array | float:
    """Renyi entropy function ``h_alpha``, zero outside (0, 1)."""
    _check_alpha(alpha)
    t, m = _inside(t)
    out = np.zeros_like(t)
    s = np.minimum(t[m], 1.0 - t[m])
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        out[m] = -s * np.log(s) - (1.0 - s) * np.log1p(-s)
    elif abs(alpha - 1.0) < ALPHA_SERIES_TOL:
        # h_a = -ln(S(a))/(a-1) expanded around a = 1, S(a) = s^a + (1-s)^a
        e = alpha - 1.0
        l1, l2 = np.log(s), np.log1p(-s)
        m1 = s * l1 + (1.0 - s) * l2
        m2 = s * l1 ** 2 + (1.0 - s) * l2 ** 2
        m3 = s * l1 ** 3 + (1.0 - s) * l2 ** 3
        out[m] = -(m1 + e * (m2 - m1 ** 2) / 2.0 + e * e * (m3 - 3.0 * m1 * m2 + 2.0 * m1 ** 3) / 6.0)
    elif math.isinf(alpha):
        out[m] = -np.log1p(-s)
    else:
        # ln[(1-s)^a (1 + (s/(1-s))^a)] without cancellation for small s
        r = (s / (1.0 - s)) ** alpha
        out[m] = (alpha * np.log1p(-s) + np.log1p(r)) / (1.0 - alpha)
    return out if out.ndim else float(out)


def _renyi_d1(alpha: float, t):
    t, m = _inside(t)
    out = np.zeros_like(t)
    x = t[m]
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        out[m] = np.log((1.0 - x) / x)
    else:
        S = x ** alpha + (1.0 - x) ** alpha
        N = x ** (alpha - 1.0) - (1.0 - x) ** (alpha - 1.0)
        out[m] = alpha / (1.0 - alpha) * N / S
    return out


def _renyi_d2(alpha: float, t):
    t, m = _inside(t)
    out = np.zeros_like(t)
    x = t[m]
    if abs(alpha - 1.0) < ALPHA_ONE_TOL:
        out[m] = -1.0 / (x * (1.0 - x))
    else:
        S = x ** alpha + (1.0 - x) ** alpha
        N = x ** (alpha - 1.0) - (1.0 - x) ** (alpha - 1.0)
        M = x ** (alpha - 2.0) + (1.0 - x) ** (alpha - 2.0)
        out[m] = -alpha * M / S - alpha ** 2 / (1.0 - alpha) * (N / S) ** 2
    return out


def renyi(alpha: float) -> TestFunction:
    _check_alpha(alpha)
    return TestFunction(
        eval=lambda t: np.asarray(renyi_eval(alpha, t), dtype=float),
        d1=lambda t: _renyi_d1(alpha, t),
        d2=lambda t: _renyi_d2(alpha, t),
        singular_points=(0.0, 1.0),
        name=f"halpha:{alpha:g}",
        kind="renyi",
        params=(float(alpha),),
        mirror=True,
    )


def polynomial(coeffs: Sequence[float]) -> TestFunction:
    """``f(t) = sum_j coeffs[j-1] t^j`` (no constant term)."""
    c = np.concatenate([[0.0], np.asarray(coeffs, dtype=float)])
    if c.size < 2:
        raise FunctionSpecError("polynomial needs at least one coefficient")
    p = np.polynomial.Polynomial(c)
    p1, p2 = p.deriv(1), p.deriv(2)
    label = ",".join(f"{x:g}" for x in c[1:])
    return TestFunction(
        eval=lambda t: p(np.asarray(t, dtype=float)),
        d1=lambda t: p1(np.asarray(t, dtype=float)),
        d2=lambda t: p2(np.asarray(t, dtype=float)),
        name=f"poly:{label}",
        kind="poly",
        params=tuple(c[1:]),
    )


def monomial(m: int) -> TestFunction:
    if int(m) != m or m < 1:
        raise FunctionSpecError(f"monomial degree must be a positive integer, got {m}")
    m = int(m)
    f = polynomial([0.0] * (m - 1) + [1.0])
    return TestFunction(f.eval, f.d1, f.d2, name=f"monomial:{m}", kind="monomial", params=(m,))


def parse_function(text: str) -> TestFunction:
    """Parse ``halpha:<a>``, ``monomial:<m>`` or ``poly:<c1,c2,...>``."""
    kind, _, arg = text.strip().partition(":")
    try:
        if kind == "halpha":
            return renyi(float(arg))
        if kind == "monomial":
            return monomial(int(arg))
        if kind == "poly":
            return polynomial([float(x) for x in arg.split(",") if x.strip()])
    except ValueError as exc:
        raise FunctionSpecError(f"bad function spec {text!r}: {exc}") from exc
    raise FunctionSpecError(f"unknown function kind {kind!r}; expected halpha, monomial or poly")


def harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))


# ---------------------------------------------------------------- U coefficient

@dataclass(frozen=True)
class UCoefficient:
    sigma1: float
    sigma2: float
    value: float
    quadrature_error: float


_U_LEVEL = 8
_U_MAX_LEVEL = 11
_U_TOL = 1e-11
_u_cache: dict = {}


def _segment_values(f: TestFunction, lo, hi, t, c):
    """``f((1-t) lo + t hi)``, reflected through 1 - x for mirror functions."""
    x = c * lo + t * hi
    if not f.mirror:
        return f.eval(x)
    xr = c * (1.0 - lo) + t * (1.0 - hi)
    return np.where(x > 0.5, f.eval(xr), f.eval(x))


def _u_terms(f: TestFunction, lo: float, hi: float, level: int) -> Array:
    t, c, w = tanh_sinh_gaps(level)
    flo, fhi = f.eval(np.array([lo, hi]))
    # mirror functions have their kink at x = 1/2; split the t-range there
    split = (0.5 - lo) / (hi - lo) if f.mirror else -1.0
    if 0.0 < split < 1.0:
        r = 1.0 - split
        parts = [(split * t, r + split * c, split * w), (split + r * t, r * c, r * w)]
    else:
        parts = [(t, c, w)]
    out = []
    for tt, cc, ww in parts:
        num = _segment_values(f, lo, hi, tt, cc) - cc * flo - tt * fhi
        out.append(ww * num / (tt * cc))
    return np.concatenate(out)


def u_coefficient(f: TestFunction, sigma1: float, sigma2: float) -> UCoefficient:
    """``U(s1, s2; f)`` by tanh-sinh quadrature on t in (0, 1).

    The error estimate is the difference to the next coarser level, floored at
    the rounding level of the sum.
    """
    s1, s2 = float(sigma1), float(sigma2)
    if s1 == s2:
        return UCoefficient(s1, s2, 0.0, 0.0)
    lo, hi = min(s1, s2), max(s1, s2)
    key = (id(f), round(lo, 12), round(hi, 12))
    hit = _u_cache.get(key)
    if hit is not None and hit[0] is f:
        v, e = hit[1]
        return UCoefficient(s1, s2, v, e)
    prev = None
    for level in range(_U_LEVEL - 1, _U_MAX_LEVEL + 1):
        terms = _u_terms(f, lo, hi, level)
        val = float(np.sum(terms))
        if not np.isfinite(val):
            raise NumericalError("U integrand is not finite", sigma1=s1, sigma2=s2, level=level)
        if prev is not None:
            err = max(abs(val - prev), 32 * np.finfo(float).eps * float(np.sum(np.abs(terms))))
            if err <= _U_TOL * max(1.0, abs(val)):
                break
        prev = val
    else:
        raise NumericalError("U quadrature did not converge", sigma1=s1, sigma2=s2,
                             last=val, change=abs(val - prev))
    if len(_u_cache) > 200_000:
        _u_cache.clear()
    _u_cache[key] = (f, (val, err))
    return UCoefficient(s1, s2, val, err)


def u_values(f: TestFunction, s1, s2, level: int = _U_LEVEL) -> Array:
    """Vectorized ``U(s1, s2; f)`` at a fixed tanh-sinh level (no error control)."""
    s1, s2 = np.broadcast_arrays(np.asarray(s1, dtype=float), np.asarray(s2, dtype=float))
    lo, hi = np.minimum(s1, s2).ravel(), np.maximum(s1, s2).ravel()
    t, c, w = tanh_sinh_gaps(level)
    flo, fhi = f.eval(lo), f.eval(hi)
    out = np.empty(lo.shape)
    chunk = max(1, 200_000 // len(t))
    for k in range(0, lo.size, chunk):
        a, b = lo[k:k + chunk, None], hi[k:k + chunk, None]
        num = _segment_values(f, a, b, t, c) - c * flo[k:k + chunk, None] - t * fhi[k:k + chunk, None]
        out[k:k + chunk] = (num / (t * c)) @ w
    out[lo == hi] = 0.0
    return out.reshape(s1.shape)


def u_renyi_closed(alpha: float) -> float:
    """``U(0, 1; h_alpha) = pi^2 (1 + alpha) / (6 alpha)``."""
    _check_alpha(alpha)
    if math.isinf(alpha):
        return math.pi ** 2 / 6.0
    return math.pi ** 2 * (1.0 + alpha) / (6.0 * alpha)


def u_unit(f: TestFunction) -> tuple[float, float, str]:
    """``U(0, 1; f)`` from a closed form when one exists.

    Returns ``(value, error, source)`` with source ``closed`` or ``quadrature``.
    """
    if f.kind == "renyi":
        return u_renyi_closed(f.params[0]), 0.0, "closed"
    if f.kind == "monomial":
        return -harmonic(f.params[0] - 1), 0.0, "closed"
    if f.kind == "poly":
        c = f.params
        return -math.fsum(cj * harmonic(j) for j, cj in enumerate(c[1:], start=1)), 0.0, "closed"
    u = u_coefficient(f, 0.0, 1.0)
    return u.value, u.quadrature_error, "quadrature"


# ---------------------------------------------------------------- smooth cutoffs

def smooth_step(u, deriv: int = 0) -> Array:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, ``g(u)/(g(u)+g(1-u))``
    with ``g(u) = exp(-1/u)``. ``deriv`` selects the 0th, 1st or 2nd derivative.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    if deriv == 0:
        out[u >= 1.0] = 1.0
    m = (u > 0.0) & (u < 1.0)
    x = u[m]
    q = 1.0 / x - 1.0 / (1.0 - x)
    S = expit(-q)
    if deriv == 0:
        out[m] = S
        return out
    q1 = -1.0 / x ** 2 - 1.0 / (1.0 - x) ** 2
    SS = S * expit(q)
    S1 = -SS * q1
    if deriv == 1:
        out[m] = S1
        return out
    q2 = 2.0 / x ** 3 - 2.0 / (1.0 - x) ** 3
    out[m] = -(S1 * (1.0 - 2.0 * S) * q1 + SS * q2)
    return out


def bump(center: float, width: float) -> TestFunction:
    """Smooth cutoff: 1 on ``|x - c| <= width/2``, 0 for ``|x - c| >= width``."""

    def _arg(x):
        r = np.abs(np.asarray(x, dtype=float) - center) / width
        return 2.0 * (1.0 - r), np.sign(np.asarray(x, dtype=float) - center)

    def ev(x):
        u, _ = _arg(x)
        return smooth_step(u)

    def d1(x):
        u, sg = _arg(x)
        return smooth_step(u, 1) * (-2.0 * sg / width)

    def d2(x):
        u, _ = _arg(x)
        return smooth_step(u, 2) * (4.0 / width ** 2)

    return TestFunction(ev, d1, d2, Interval(center - width, center + width), False, (),
                        name=f"bump({center:g},{width:g})", kind="bump")


def _product(f: TestFunction, g: TestFunction, name: str, sing) -> TestFunction:
    return TestFunction(
        eval=lambda x: f.eval(x) * g.eval(x),
        d1=lambda x: f.d1(x) * g.eval(x) + f.eval(x) * g.d1(x),
        d2=lambda x: f.d2(x) * g.eval(x) + 2 * f.d1(x) * g.d1(x) + f.eval(x) * g.d2(x),
        support_hint=f.support_hint, zero_at_zero=f.zero_at_zero,
        singular_points=tuple(sing), name=name, kind="piece",
    )


def _combine(parts: list[tuple[float, TestFunction]], name: str, sing, zero) -> TestFunction:
    return TestFunction(
        eval=lambda x: sum(c * p.eval(x) for c, p in parts),
        d1=lambda x: sum(c * p.d1(x) for c, p in parts),
        d2=lambda x: sum(c * p.d2(x) for c, p in parts),
        zero_at_zero=zero, singular_points=tuple(sing), name=name, kind="piece",
    )


def _constant(value: float) -> TestFunction:
    return TestFunction(lambda x: np.full(np.shape(x), value, dtype=float),
                        lambda x: np.zeros(np.shape(x)), lambda x: np.zeros(np.shape(x)),
                        zero_at_zero=value == 0.0, name=f"const({value:g})", kind="const")


def assumption_split(f: TestFunction, zeta_width: float) -> list[TestFunction]:
    """Split ``f`` into pieces, each singular only at one point and vanishing there.

    For singular points ``x_1 < ... < x_n`` and bumps ``z_i`` of half width
    ``zeta_width`` (scaled down if the bumps would overlap):
    ``f_i = (f - f(x_i)) z_i`` for ``i < n`` and ``f_n = f - sum_{i<n} f_i``.
    With a single point the pieces are ``f - f(x_1) z_1`` and ``f(x_1) z_1``.
    """
    if not 0.0 < zeta_width < 1.0:
        raise ArgumentError("zeta_width must lie in (0, 1)")
    pts = sorted(f.singular_points) or [0.0]
    width = zeta_width
    if len(pts) > 1:
        width = min(width, 0.49 * float(np.min(np.diff(pts))))
    vals = [float(f.eval(np.array([p]))[0]) for p in pts]
    if len(pts) == 1:
        z = bump(pts[0], width)
        corr = _product(_constant(vals[0]), z, "", ())
        first = _combine([(1.0, f), (-1.0, corr)], f"{f.name}|split0", pts, True)
        second = _combine([(1.0, corr)], f"{f.name}|split1", (), vals[0] == 0.0)
        return [first, second]
    pieces = []
    for p, v in zip(pts[:-1], vals[:-1]):
        shifted = _combine([(1.0, f), (-1.0, _constant(v))], "", (p,), False) if v else f
        pieces.append(_product(shifted, bump(p, width), f"{f.name}|near{p:g}", (p,)))
    last = _combine([(1.0, f)] + [(-1.0, q) for q in pieces], f"{f.name}|near{pts[-1]:g}",
                    (pts[-1],), f.zero_at_zero)
    return pieces + [last]


# ---------------------------------------------------------------- Hoelder norm

@dataclass(frozen=True)
class HoelderGrid:
    """Geometric sample distances ``radius * 2**(-j/density)`` on both sides of y.

    Doubling ``density`` adds points without removing any, so the grid
    supremum is nondecreasing under refinement.
    """

    radius: float = 1.0
    density: int = 16
    octaves: int = 40

    def refine(self) -> "HoelderGrid":
        return HoelderGrid(self.radius, 2 * self.density, self.octaves)

    def points(self, y: float) -> Array:
        d = self.radius * 2.0 ** (-np.arange(self.density * self.octaves + 1) / self.density)
        return np.concatenate([y - d[::-1], y + d])


def hoelder_norm(f: TestFunction, y: float, gamma: float, grid: HoelderGrid | None = None) -> float:
    """Grid lower bound of ``max_k sup_x |f^(k)(x)| |x - y|^(k - gamma)``, k = 0, 1, 2."""
    if not 0.0 <= gamma <= 1.0:
        raise ArgumentError("gamma must lie in [0, 1]")
    grid = grid or HoelderGrid()
    x = grid.points(y)
    x = x[x != y]
    r = np.abs(x - y)
    best = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for k, fn in enumerate((f.eval, f.d1, f.d2)):
            vals = np.abs(fn(x)) * r ** (k - gamma)
            vals = vals[~np.isnan(vals)]
            if vals.size:
                best = max(best, float(np.max(vals)))
    return best
