import math

import numpy as np
import pytest

from dirac_entropy.errors import ArgumentError
from dirac_entropy.herglotz import (HerglotzRepresentation, b_alpha, f_alpha, herglotz_detail,
                                    herglotz_eval, kernel, kernel_direct, resolvent_pair,
                                    von_neumann_eval)
from dirac_entropy.testfns import renyi_eval

TS = np.linspace(0.1, 0.9, 9)


def test_f_alpha_endpoints_and_monotone():
    assert f_alpha(0.4, 0.5) == 0.0
    assert f_alpha(0.4, 1e12) == pytest.approx(0.2, abs=1e-10)
    lam = np.geomspace(0.5, 1e6, 200)
    for a in (0.1, 0.5, 0.9):
        v = f_alpha(a, lam)
        assert np.all(np.diff(v) > 0) and np.all(v < a / 2)


def test_f_alpha_matches_naive_form():
    lam = np.array([0.7, 2.0, 30.0])
    for a in (0.2, 0.6):
        r = (2 * lam - 1) / (2 * lam + 1)
        naive = np.arctan(r ** a * math.sin(a * math.pi) / (1 + r ** a * math.cos(a * math.pi))) / math.pi
        assert np.allclose(f_alpha(a, lam), naive, rtol=1e-13)


def test_f_alpha_domain():
    with pytest.raises(ArgumentError):
        f_alpha(0.5, 0.4)
    with pytest.raises(ArgumentError):
        f_alpha(0.01, 1.0)
    with pytest.raises(ArgumentError):
        f_alpha(1.0, 1.0)


def test_b_alpha():
    assert b_alpha(1.0) == pytest.approx(0.0, abs=1e-15)
    assert b_alpha(1e-9) == pytest.approx(math.log(2), abs=1e-8)
    assert b_alpha(2 / 3) == pytest.approx(0.5 * math.log(1 + 2 ** (2 / 3)), rel=1e-14)
    a = np.linspace(0.05, 1, 96)
    assert np.max(np.abs(np.diff([b_alpha(x) for x in a]))) < 0.05
    with pytest.raises(ArgumentError):
        b_alpha(0.0)


def test_resolvent_pair():
    p, m = resolvent_pair(0.5, 2.0)
    assert p == 0.5 and m == -0.5
    p, m = resolvent_pair(0.25, 1.0)
    assert p == pytest.approx(1 / 0.75) and m == pytest.approx(1 / -1.25)
    with pytest.raises(ArgumentError):
        resolvent_pair(1.0, 1.0)
    with pytest.raises(ArgumentError):
        resolvent_pair(0.5, 0.2)


def test_kernel_forms_agree_and_decay():
    lam = np.geomspace(0.6, 1e4, 50)
    for t in (0.1, 0.5, 0.93):
        assert np.allclose(kernel(t, lam), kernel_direct(t, lam), rtol=1e-8, atol=1e-14)
    big = np.array([1e2, 1e3, 1e4])
    assert np.all(np.abs(kernel(0.3, big)) * big ** 3 < 2.0)
    assert np.isfinite(kernel(0.3, 1e200))


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_herglotz_identity(alpha):
    ref = renyi_eval(alpha, TS)
    got = np.array([herglotz_eval(alpha, t) for t in TS])
    assert np.max(np.abs(got - ref)) < 1e-8


def test_herglotz_examples():
    assert herglotz_eval(0.5, 0.5) == pytest.approx(math.log(2), abs=1e-8)
    ref = math.log(0.1 ** 0.3 + 0.9 ** 0.3) / 0.7
    assert herglotz_eval(0.3, 0.1) == pytest.approx(ref, abs=1e-8)
    d = herglotz_detail(0.4, 0.2)
    assert d.converged and abs(d.integral - d.integral_exp) < 1e-8


def test_von_neumann():
    assert von_neumann_eval(0.9) == pytest.approx(0.325083, abs=1e-6)
    for t in (0.1, 0.25, 0.4):
        assert abs(von_neumann_eval(t) - von_neumann_eval(1 - t)) < 1e-10
        assert von_neumann_eval(t) == pytest.approx(renyi_eval(1.0, t), abs=1e-8)


def test_alpha_to_one_approaches_vn():
    t = 0.3
    vals = [abs(herglotz_eval(a, t) - von_neumann_eval(t)) for a in (0.9, 0.99, 0.999)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-3


def test_representation_object():
    rep = HerglotzRepresentation(0.5)
    assert rep(0.5) == pytest.approx(math.log(2), abs=1e-8)
    assert HerglotzRepresentation(1.0)(0.9) == pytest.approx(0.325083, abs=1e-6)
    assert np.all(np.isfinite(rep.integrand(0.2, np.array([0.5, 1.0, 1e6]))))
    with pytest.raises(ArgumentError):
        HerglotzRepresentation(0.01)
    with pytest.raises(ArgumentError):
        HerglotzRepresentation(1.2)
    with pytest.raises(ArgumentError):
        rep.integrand(1.5, 1.0)
