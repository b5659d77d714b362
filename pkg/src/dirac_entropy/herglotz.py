"""Herglotz-type integral representation of the Renyi function ``h_alpha``
for ``0 < alpha < 1`` and its von Neumann limit, evaluated on real ``t`` in (0, 1).

    h_alpha(t) = B(alpha)/(1-alpha)
                 - 1/(1-alpha) int_{1/2}^inf f_alpha(l) K_t(l) dl,

with ``K_t(l) = R_t(l) - R_t(-l) + (1/2-l)/((1/2-l)^2+1) - (1/2+l)/((1/2+l)^2+1)``
and ``R_t(l) = 1/(t - 1/2 + l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, NumericalError
from .quad import SemiInfiniteRule, graded_unit_rule, semi_infinite

ALPHA_MIN = 0.05
PAIR_TOL = 1e-8


def _check_alpha(alpha: float, allow_one: bool = False):
    hi_ok = alpha <= 1.0 if allow_one else alpha < 1.0
    if not (alpha >= ALPHA_MIN and hi_ok):
        rng = f"[{ALPHA_MIN}, 1]" if allow_one else f"[{ALPHA_MIN}, 1)"
        raise ArgumentError(f"alpha must lie in {rng}, got {alpha}")


def _check_t(t: float):
    if not 0.0 < t < 1.0:
        raise ArgumentError(f"t must lie in (0, 1), got {t}")


def f_alpha(alpha: float, lam) -> np.ndarray | float:
    """``(1/pi) arctan[r^a sin(a pi)/(1 + r^a cos(a pi))]`` with ``r = (2l-1)/(2l+1)``.

    The denominator is rewritten as ``1 - r^a + 2 r^a cos^2(a pi/2)`` so it
    stays accurate as ``alpha -> 1`` and ``l -> inf``.
    """
    _check_alpha(alpha)
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0.5):
        raise ArgumentError("lambda must be at least 1/2")
    with np.errstate(divide="ignore"):
        lr = np.log1p(-2.0 / (2.0 * lam + 1.0))
    ra = np.exp(alpha * lr)
    den = -np.expm1(alpha * lr) + ra * 2.0 * math.cos(0.5 * alpha * math.pi) ** 2
    out = np.arctan2(ra * math.sin(alpha * math.pi), den) / math.pi
    return out if out.ndim else float(out)


def b_alpha(alpha: float) -> float:
    """``(1/2) ln(1 + 2^a + 2^(a/2+1) cos(3 a pi/4))``."""
    if not 0.0 < alpha <= 1.0:
        raise ArgumentError(f"alpha must lie in (0, 1], got {alpha}")
    arg = 1.0 + 2.0 ** alpha + 2.0 ** (0.5 * alpha + 1.0) * math.cos(0.75 * alpha * math.pi)
    if not arg > 0:
        raise NumericalError("nonpositive log argument in B(alpha)", alpha=alpha, argument=arg)
    return 0.5 * math.log(arg)


def resolvent_pair(z: float, lam: float) -> tuple[float, float]:
    """``(R_z(l), R_z(-l))`` with ``R_z(l) = 1/(z - 1/2 + l)``."""
    if not 0.0 < z < 1.0:
        raise ArgumentError(f"z must lie in (0, 1), got {z}")
    if lam < 0.5:
        raise ArgumentError("lambda must be at least 1/2")
    d1, d2 = z - 0.5 + lam, z - 0.5 - lam
    if d1 == 0 or d2 == 0:
        raise ArgumentError(f"pole of the resolvent at z={z}, lambda={lam}")
    return 1.0 / d1, 1.0 / d2


def kernel(t: float, lam) -> np.ndarray:
    """``K_t(l)`` in a cancellation-free form; decays like ``l**-3``.

    With ``c = t - 1/2`` the resolvent difference is ``2l/(l^2 - c^2)`` and the
    two counterterms combine to ``-2l (l^2 + 3/4)/(l^4 + 3l^2/2 + 25/16)``.
    """
    inv = 1.0 / np.asarray(lam, dtype=float)
    c2 = (t - 0.5) ** 2
    q = inv * inv
    num = 0.75 + c2 + (25.0 / 16.0 + 0.75 * c2) * q
    # scaled by l**-6 to stay finite for huge l
    return 2.0 * inv * q * num / ((1.0 - c2 * q) * (1.0 + 1.5 * q + 25.0 / 16.0 * q * q))


def kernel_direct(t: float, lam) -> np.ndarray:
    """``K_t`` term by term (reference for tests)."""
    lam = np.asarray(lam, dtype=float)
    rp, rm = 1.0 / (t - 0.5 + lam), 1.0 / (t - 0.5 - lam)
    p, q = 0.5 - lam, 0.5 + lam
    return rp - rm + p / (p * p + 1.0) - q / (q * q + 1.0)


@lru_cache(maxsize=4)
def _rules() -> tuple[SemiInfiniteRule, SemiInfiniteRule]:
    base = graded_unit_rule()
    return semi_infinite("rational", base), semi_infinite("exp", base)


@dataclass(frozen=True)
class HerglotzRepresentation:
    """Representation data for one ``alpha`` in (0, 1]; ``alpha == 1`` is
    the von Neumann limit."""

    alpha: float
    quadrature: SemiInfiniteRule = field(default_factory=lambda: _rules()[0], repr=False)

    def __post_init__(self):
        _check_alpha(self.alpha, allow_one=True)
        if np.any(self.quadrature.weights <= 0):
            raise ArgumentError("quadrature weights must be positive")

    def integrand(self, t: float, lam) -> np.ndarray:
        _check_t(t)
        if self.alpha == 1.0:
            return vn_kernel(t, lam)
        return f_alpha(self.alpha, lam) * kernel(t, lam)

    def __call__(self, t: float) -> float:
        if self.alpha == 1.0:
            return von_neumann_eval(t)
        return herglotz_eval(self.alpha, t)


@dataclass(frozen=True)
class HerglotzValue:
    value: float
    integral: float
    integral_exp: float
    converged: bool

    def __float__(self):
        return self.value


def _pair_integrals(integrand) -> tuple[float, float, bool]:
    rat, ex = _rules()
    v1, ok1 = rat.integrate_checked(integrand)
    v2, ok2 = ex.integrate_checked(integrand)
    if not (ok1 and ok2 and np.isfinite(v1)):
        raise NumericalError("semi-infinite integral does not converge", rational=v1, exp=v2)
    if abs(v1 - v2) > PAIR_TOL * max(1.0, abs(v1)):
        raise NumericalError("rational and exp maps disagree", rational=v1, exp=v2)
    return v1, v2, True


def herglotz_detail(alpha: float, t: float) -> HerglotzValue:
    _check_alpha(alpha)
    _check_t(t)
    v1, v2, ok = _pair_integrals(lambda lam: f_alpha(alpha, lam) * kernel(t, lam))
    return HerglotzValue((b_alpha(alpha) - v1) / (1.0 - alpha), v1, v2, ok)


def herglotz_eval(alpha: float, t: float) -> float:
    """``h_alpha(t)`` from the integral representation (``0.05 <= alpha < 1``)."""
    return herglotz_detail(alpha, t).value


def vn_kernel(t: float, lam) -> np.ndarray:
    """``(l - 1/2)(R_t(l) - R_t(-l)) - 2l/(l + 1/2)`` combined:
    ``2l (c^2 - 1/4)/((l^2 - c^2)(l + 1/2))`` with ``c = t - 1/2``."""
    inv = 1.0 / np.asarray(lam, dtype=float)
    c2 = (t - 0.5) ** 2
    return 2.0 * (c2 - 0.25) * inv * inv / ((1.0 - c2 * inv * inv) * (1.0 + 0.5 * inv))


def von_neumann_eval(t: float) -> float:
    """``h_1(t) = -int_{1/2}^inf [(l - 1/2)(R_t(l) - R_t(-l)) - 2l/(l + 1/2)] dl``."""
    _check_t(t)
    v1, _, _ = _pair_integrals(lambda lam: vn_kernel(t, lam))
    return -v1
