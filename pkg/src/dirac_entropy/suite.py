"""Acceptance battery: each check returns measured values and a verdict."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closedform import n_interval, intersecting_trace, two_interval_trace
from .errors import ArgumentError
from .geometry import Interval, IntervalSet, Partition, apply_mobius
from .herglotz import f_alpha, herglotz_eval, von_neumann_eval
from .specops import assemble_cross_block, assemble_cutoff_projector, hs_norm_sq, sym_eig
from .testfns import harmonic, monomial, renyi, renyi_eval, u_coefficient
from .traces import (SweepConfig, asymptotic_check, delta_raw, delta_trace_cutoff, delta_trace_poly,
                     f_trace_cutoff, f_trace_poly_limit)
from .widom import widom_limit

LN43 = math.log(4.0 / 3.0)
TWO_PI_SQ = 2.0 * math.pi ** 2
UNIT_PAIR = (Interval(0.0, 1.0), Interval(2.0, 3.0))
WINDOW = SweepConfig(200.0, 260.0, 61)


@dataclass
class CheckResult:
    id: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        if self.error:
            vals = f"{vals}, error={self.error}" if vals else f"error={self.error}"
        return f"[{status}] {self.id:<20s} {vals} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"id": self.id, "passed": self.passed, "measured": self.measured,
                "seconds": round(self.seconds, 3), "error": self.error}


def _fmt(v) -> str:
    return f"{v:.3e}" if isinstance(v, float) else str(v)


@dataclass(frozen=True)
class Criterion:
    number: int
    id: str
    title: str
    func: Callable[[], tuple[bool, dict]] = field(repr=False)
    slow: bool = False

    def run(self) -> CheckResult:
        t0 = time.perf_counter()
        try:
            ok, measured = self.func()
            err = None
        except Exception as exc:  # a crash is a failed criterion, reported with its class
            ok, measured, err = False, {}, f"{type(exc).__name__}: {exc}"
        return CheckResult(self.id, bool(ok), measured, time.perf_counter() - t0, err)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------- checks

def check_u_closed():
    dev = max(abs(u_coefficient(renyi(a), 0.0, 1.0).value - math.pi ** 2 * (1 + a) / (6 * a))
              for a in (0.5, 1.0, 2.0, 3.0))
    return dev < 1e-7, {"max_abs_dev": dev}


def check_u_monomial():
    dev = max(abs(u_coefficient(monomial(m), 0.0, 1.0).value + harmonic(m - 1)) for m in range(2, 7))
    return dev < 1e-10, {"max_abs_dev": dev}


def check_hs_closed():
    ref = LN43 / (4 * math.pi ** 2)
    vals = [hs_norm_sq(assemble_cross_block(*UNIT_PAIR, n, n)) for n in (32, 64)]
    dev = abs(vals[-1] - ref)
    return dev < 1e-8, {"hs_sq": vals[-1], "abs_dev": dev, "refinement_change": abs(vals[1] - vals[0])}


def check_poly_m2():
    n = 64
    tr = delta_trace_poly(*UNIT_PAIR, 2, n)
    hs = hs_norm_sq(assemble_cross_block(*UNIT_PAIR, n, n))
    ref = two_interval_trace(*UNIT_PAIR, monomial(2)).value
    d1, d2 = abs(tr + 2 * hs), abs(tr - ref)
    return d1 < 1e-10 and d2 < 1e-6, {"trace": tr, "dev_vs_hs": d1, "dev_vs_closed": d2}


def check_poly_m3():
    tr = delta_trace_poly(*UNIT_PAIR, 3, 64)
    ref = -1.5 / TWO_PI_SQ * LN43
    rel = _rel(tr, ref)
    return rel < 1e-4, {"trace": tr, "rel_dev": rel}


def _cutoff_check(f, ref, tol):
    est = delta_trace_cutoff(IntervalSet([UNIT_PAIR[0]]), IntervalSet([UNIT_PAIR[1]]), f, WINDOW)
    rel = _rel(est.chiral_value, ref)
    return rel < tol, {"value": est.value, "error_bar": est.error_bar, "rel_dev": rel}


def check_cutoff_vn():
    return _cutoff_check(renyi(1.0), LN43 / 6.0, 0.02)


def check_cutoff_renyi2():
    return _cutoff_check(renyi(2.0), 3.0 / 24.0 * LN43, 0.04)


def check_multi_interval():
    iset = IntervalSet([(0.0, 1.0), (3.0, 4.0), (6.0, 7.0)])
    ref = n_interval(iset, Partition((0, 2), (1,)), renyi(1.0)).value
    est = delta_trace_cutoff(IntervalSet([(0.0, 1.0), (6.0, 7.0)]), IntervalSet([(3.0, 4.0)]),
                             renyi(1.0), WINDOW)
    rel = _rel(est.chiral_value, ref)
    return rel < 0.03, {"value": est.value, "closed_x2": 2 * ref, "rel_dev": rel}


def check_herglotz_identity():
    ts = np.arange(1, 10) / 10.0
    d1 = max(abs(herglotz_eval(a, t) - renyi_eval(a, t)) for a in (0.1, 0.3, 0.5, 0.7, 0.9) for t in ts)
    d2 = max(abs(von_neumann_eval(t) - renyi_eval(1.0, t)) for t in ts)
    return d1 < 1e-6 and d2 < 1e-6, {"max_dev_alpha": d1, "max_dev_vn": d2}


def check_herglotz_limit():
    a = 1.0 - 1e-4
    d1 = max(abs(herglotz_eval(a, t) - von_neumann_eval(t)) for t in (0.2, 0.5, 0.8))
    b = 1.0 - 1e-6
    d2 = max(abs(f_alpha(b, lam) / (1.0 - b) - (lam - 0.5)) for lam in (1.0, 2.0, 10.0))
    return d1 < 1e-3 and d2 < 1e-3, {"chain_dev": d1, "weight_dev": d2}


def check_widom_limit():
    out, ok = {}, True
    for a in (1.0, 2.0):
        lim = widom_limit(*UNIT_PAIR, renyi(a), 0.1)
        rel = _rel(lim.extrapolated, lim.reference)
        out[f"rel_dev_h{a:g}"] = rel
        ok &= rel < 0.01
    return ok, out


def check_symmetry():
    f = renyi(1.0)
    s1, s2 = IntervalSet([UNIT_PAIR[0]]), IntervalSet([UNIT_PAIR[1]])
    base = two_interval_trace(*UNIT_PAIR, f).value
    cf = 0.0
    # inversion needs positive endpoints, so it acts on the pair shifted by 1
    shifted = [apply_mobius(s, "translate", 1.0) for s in (s1, s2)]
    for kind, val, (a, b) in (("translate", 7.0, (s1, s2)), ("scale", 2.5, (s1, s2)),
                              ("scale", -3.0, (s1, s2)), ("invert", None, shifted)):
        t1, t2 = apply_mobius(a, kind, val), apply_mobius(b, kind, val)
        cf = max(cf, abs(two_interval_trace(t1.intervals[0], t2.intervals[0], f).value - base))
    sp = 0.0
    for kappa in (60.0, 137.3, 200.0):
        raw = delta_raw(s1, s2, f, kappa)
        tr = delta_raw(apply_mobius(s1, "translate", 7.0), apply_mobius(s2, "translate", 7.0), f, kappa)
        sc = delta_raw(apply_mobius(s1, "scale", 2.5), apply_mobius(s2, "scale", 2.5), f, kappa / 2.5)
        sp = max(sp, abs(raw - tr), abs(raw - sc))
    return cf < 1e-11 and sp < 1e-9, {"closed_form_dev": cf, "per_kappa_dev": sp}


def check_intersecting():
    i1, i2 = Interval(0.0, 2.0), Interval(1.0, 3.0)
    ref_poly = -LN43 / TWO_PI_SQ
    lim = f_trace_poly_limit(i1, i2, 2, [2e-2, 1e-2, 5e-3, 2.5e-3])
    rel_poly = _rel(lim.value, ref_poly)
    conj = intersecting_trace(i1, i2, renyi(1.0))
    est = f_trace_cutoff(i1, i2, renyi(1.0), WINDOW)
    rel_cut = _rel(est.chiral_value, conj.value)
    return rel_poly < 1e-3 and rel_cut < 0.03, {"poly_limit": lim.value, "rel_dev_poly": rel_poly,
                                                 "rel_dev_cutoff": rel_cut, "conjectural": conj.conjectural}


def check_asymptotics():
    tab = asymptotic_check(Interval(0.0, 1.0), Interval(1.0, 2.0), 1.0, [50.0, 100.0, 200.0])
    ratios = tab.residual_ratios
    ok = bool(np.all((ratios >= 0.4) & (ratios <= 0.6)))
    return ok, {"ratios": [round(float(r), 6) for r in ratios]}


def check_spectral_hygiene():
    lo, hi, tr_dev = math.inf, -math.inf, 0.0
    for support, k in ((IntervalSet([(0.0, 1.0)]), 80.0),
                       (IntervalSet([(0.0, 1.0), (2.0, 3.0)]), 400.0),
                       (IntervalSet([(0.0, 1.0), (3.0, 4.0), (6.0, 7.0)]), 520.0)):
        sysm = assemble_cutoff_projector(support, k)
        ev = sym_eig(sysm.matrix).eigenvalues
        lo, hi = min(lo, float(ev.min())), max(hi, float(ev.max()))
        tr_dev = max(tr_dev, abs(float(np.sum(ev)) - sysm.kappa * support.measure / math.pi))
    ok = lo >= -1e-6 and hi <= 1 + 1e-6 and tr_dev < 1e-10
    return ok, {"min_eig": lo, "max_eig": hi, "trace_dev": tr_dev}


CRITERIA = (
    Criterion(1, "U-closed", "U(0,1) of Renyi functions", check_u_closed),
    Criterion(2, "U-monomial", "U(0,1) of monomials", check_u_monomial),
    Criterion(3, "HS-closed", "Hilbert-Schmidt norm of the cross block", check_hs_closed),
    Criterion(4, "poly-m2", "block-word trace, m=2", check_poly_m2),
    Criterion(5, "poly-m3", "block-word trace with PV blocks, m=3", check_poly_m3),
    Criterion(6, "cutoff-vN", "cutoff mutual information, alpha=1", check_cutoff_vn, slow=True),
    Criterion(7, "cutoff-renyi2", "cutoff Renyi mutual information, alpha=2", check_cutoff_renyi2, slow=True),
    Criterion(8, "multi-interval", "three intervals, partition {1,3}|{2}", check_multi_interval, slow=True),
    Criterion(9, "herglotz-identity", "integral representation vs direct Renyi", check_herglotz_identity),
    Criterion(10, "herglotz-limit", "alpha -> 1 limit chain", check_herglotz_limit),
    Criterion(11, "widom-limit", "mollified Widom combination limit", check_widom_limit),
    Criterion(12, "symmetry", "translation, scaling and inversion invariance", check_symmetry),
    Criterion(13, "intersecting", "overlapping intervals", check_intersecting, slow=True),
    Criterion(14, "asymptotics", "large-separation remainder", check_asymptotics),
    Criterion(15, "spectral-hygiene", "cutoff projector spectrum", check_spectral_hygiene),
)

BY_ID = {c.id: c for c in CRITERIA}


def select(only=None) -> list[Criterion]:
    if not only:
        return list(CRITERIA)
    out = []
    for key in only:
        if key in BY_ID:
            out.append(BY_ID[key])
        elif key.isdigit() and 1 <= int(key) <= len(CRITERIA):
            out.append(CRITERIA[int(key) - 1])
        else:
            raise ArgumentError(f"unknown criterion {key!r}; known: {', '.join(BY_ID)}")
    return out


def run(only=None, echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    results = []
    for c in select(only):
        r = c.run()
        if echo:
            echo(r.line())
        results.append(r)
    return results
