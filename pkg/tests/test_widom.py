import math

import numpy as np
import pytest

from dirac_entropy.errors import ArgumentError
from dirac_entropy.geometry import Interval, IntervalSet
from dirac_entropy.testfns import bump, polynomial, renyi
from dirac_entropy.widom import (MollifiedSymbol, besov_seminorm, mollifier_eval, richardson,
                                 widom_combination, widom_limit)

I1, I2 = Interval(0, 1), Interval(2, 3)


def test_mollifier_values():
    sym = MollifiedSymbol(IntervalSet([(0, 1)]), 0.1)
    assert mollifier_eval(sym, 0.5) == 1.0
    assert mollifier_eval(sym, 0.1) == 1.0
    assert mollifier_eval(sym, 0.0) == 0.0 and mollifier_eval(sym, -2.0) == 0.0
    assert mollifier_eval(sym, 0.05) == pytest.approx(0.5, abs=1e-15)
    x = np.linspace(0, 0.1, 101)
    assert np.all(np.diff(mollifier_eval(sym, x)) >= 0)


@pytest.mark.parametrize("base,eps", [([(0, 1)], 0.5), ([(0, 1)], 0.0), ([(0, 1), (1.2, 2.5)], 0.06),
                                      ([(0, math.inf)], 0.1)])
def test_mollifier_constraints(base, eps):
    with pytest.raises(ArgumentError):
        MollifiedSymbol(IntervalSet(base), eps)


def test_richardson_exact_quadratic():
    g = lambda e: 0.3 + 2.0 * e - 5.0 * e ** 2
    assert richardson(g(0.1), g(0.05), g(0.025)) == pytest.approx(0.3, abs=1e-14)


def test_linear_f_vanishes():
    assert abs(widom_combination(I1, I2, polynomial([1.0]), 0.1)) < 1e-14


def test_swap_and_translation():
    f = renyi(1.0)
    a = widom_combination(I1, I2, f, 0.1)
    assert abs(a - widom_combination(I2, I1, f, 0.1)) < 1e-12
    assert abs(a - widom_combination(Interval(7, 8), Interval(9, 10), f, 0.1)) < 1e-9


@pytest.mark.parametrize("f", [renyi(1.0), renyi(2.0), bump(0.5, 0.4)], ids=["h1", "h2", "bump"])
def test_limit_matches_two_interval_value(f):
    res = widom_limit(I1, I2, f, 0.1)
    assert abs(res.extrapolated / res.reference - 1) < 0.01


def test_besov_grows_as_collar_shrinks():
    vals = [besov_seminorm(MollifiedSymbol(IntervalSet([(0, 1)]), e)).value for e in (0.2, 0.1, 0.05, 0.025)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_besov_scale_invariant_and_refined():
    a = besov_seminorm(MollifiedSymbol(IntervalSet([(0, 1), (2, 3)]), 0.1))
    b = besov_seminorm(MollifiedSymbol(IntervalSet([(0, 3), (6, 9)]), 0.3))
    assert abs(a.value - b.value) < 1e-9
    assert a.quadrature_error < 1e-6
