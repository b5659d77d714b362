import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirac_entropy.errors import ArgumentError, FunctionSpecError
from dirac_entropy.testfns import (HoelderGrid, assumption_split, harmonic, hoelder_norm, monomial,
                                   parse_function, polynomial, renyi, renyi_eval, u_coefficient,
                                   u_renyi_closed, u_unit, u_values)

ALPHAS = [0.05, 0.3, 0.5, 1.0, 1.0 + 5e-5, 2.0, 3.0, 100.0, math.inf]


def test_renyi_examples():
    assert renyi_eval(1.0, 0.5) == pytest.approx(math.log(2), abs=1e-15)
    assert renyi_eval(2.0, 0.5) == pytest.approx(math.log(2), abs=1e-15)
    assert renyi_eval(0.5, 0.1) == pytest.approx(2 * math.log(math.sqrt(0.1) + math.sqrt(0.9)), rel=1e-14)
    assert renyi_eval(1.0, 0.9) == pytest.approx(-0.9 * math.log(0.9) - 0.1 * math.log(0.1), rel=1e-14)
    assert np.all(renyi_eval(2.0, np.array([-1.0, 0.0, 1.0, 2.0])) == 0.0)
    with pytest.raises(ArgumentError):
        renyi_eval(0.0, 0.5)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_renyi_symmetry_and_bounds(alpha):
    # dyadic grid: 1 - t is exact, so the check sees only the evaluation
    t = np.arange(1, 4096) / 4096.0
    v = renyi_eval(alpha, t)
    assert np.max(np.abs(v - renyi_eval(alpha, 1 - t))) < 1e-14
    assert np.all(v >= 0) and np.all(v <= math.log(2) + 1e-15)


def test_renyi_continuous_across_alpha_one():
    t = np.linspace(0.01, 0.99, 99)
    ref = renyi_eval(1.0, t)
    for d in (1e-10, 1e-8, 1e-6, 5e-5, 2e-4):
        for a in (1 - d, 1 + d):
            assert np.max(np.abs(renyi_eval(a, t) - ref)) < 2 * d


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0, 3.0])
def test_renyi_derivatives(alpha):
    f = renyi(alpha)
    t = np.linspace(0.1, 0.9, 33)
    h = 2e-4

    def fd(g):  # fourth-order central difference
        return (g(t - 2 * h) - 8 * g(t - h) + 8 * g(t + h) - g(t + 2 * h)) / (12 * h)

    assert np.max(np.abs(f.d1(t) - fd(f))) < 1e-6
    assert np.max(np.abs(f.d2(t) - fd(f.d1))) < 1e-6


@pytest.mark.parametrize("alpha", [0.05, 0.5, 1.0, 2.0, 3.0, 100.0])
def test_u_renyi(alpha):
    u = u_coefficient(renyi(alpha), 0.0, 1.0)
    ref = u_renyi_closed(alpha)
    assert abs(u.value - ref) < max(1e-10, 10 * u.quadrature_error)


def test_u_closed_examples():
    assert u_renyi_closed(1.0) == pytest.approx(math.pi ** 2 / 3)
    assert u_renyi_closed(0.5) == pytest.approx(math.pi ** 2 / 2)
    assert u_renyi_closed(math.inf) == pytest.approx(math.pi ** 2 / 6)
    assert u_renyi_closed(1e12) == pytest.approx(math.pi ** 2 / 6, rel=1e-11)


@pytest.mark.parametrize("m", range(1, 8))
def test_u_monomial(m):
    assert abs(u_coefficient(monomial(m), 0.0, 1.0).value + harmonic(m - 1)) < 1e-12
    assert u_unit(monomial(m)) == (-harmonic(m - 1), 0.0, "closed")


def test_u_linear_and_diagonal():
    assert abs(u_coefficient(monomial(1), 0.2, 0.9).value) < 1e-15
    assert u_coefficient(renyi(2.0), 0.3, 0.3).value == 0.0


def test_u_quadratic_open_question():
    # f(t) = t(1-t) = t - t^2 gives (s1 - s2)^2 straight from the definition
    f = polynomial([1.0, -1.0])
    for s1, s2 in ((0.0, 1.0), (0.2, 0.7), (-1.0, 3.0)):
        assert abs(u_coefficient(f, s1, s2).value - (s1 - s2) ** 2) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.sampled_from([0.3, 1.0, 2.0]))
def test_u_swap_symmetry(s1, s2, alpha):
    f = renyi(alpha)
    a, b = u_coefficient(f, s1, s2).value, u_coefficient(f, s2, s1).value
    assert a == b


def test_u_values_matches_scalar():
    f = renyi(1.0)
    s = np.array([0.0, 0.1, 0.5, 0.9])
    u = np.array([1.0, 0.7, 0.2, 0.0])
    got = u_values(f, s, u, level=9)
    ref = [u_coefficient(f, a, b).value for a, b in zip(s, u)]
    assert np.max(np.abs(got - ref)) < 1e-10


def test_parse_function():
    assert parse_function("halpha:2").kind == "renyi"
    assert parse_function("monomial:3").params == (3,)
    p = parse_function("poly:1,-1")
    assert p(0.5) == pytest.approx(0.25)
    for bad in ("sin:1", "monomial:0", "halpha:x", "poly:"):
        with pytest.raises(FunctionSpecError if not bad.startswith("halpha") else ArgumentError):
            parse_function(bad)


def test_hoelder_examples():
    quad = polynomial([1.0, -1.0])
    assert hoelder_norm(quad, 0.0, 1.0) < 5.0
    # f(y) != 0 makes the gamma > 0 norm grow as the grid approaches y
    one = parse_function("poly:1")
    a = hoelder_norm(one, 0.5, 0.5, HoelderGrid(octaves=10))
    b = hoelder_norm(one, 0.5, 0.5, HoelderGrid(octaves=30))
    assert b > 100 * a
    h = renyi(0.5)
    v30 = hoelder_norm(h, 0.0, 0.5, HoelderGrid(octaves=30))
    v60 = hoelder_norm(h, 0.0, 0.5, HoelderGrid(octaves=60))
    assert np.isfinite(v60) and v60 < 1.01 * v30


def test_hoelder_refinement_monotone():
    g = HoelderGrid(density=4)
    for f, y in ((renyi(1.0), 0.0), (renyi(2.0), 1.0), (polynomial([1.0, -1.0]), 0.0)):
        v1 = hoelder_norm(f, y, 0.7, g)
        v2 = hoelder_norm(f, y, 0.7, g.refine())
        assert v2 >= v1


@pytest.mark.parametrize("f", [renyi(1.0), renyi(0.5), polynomial([1.0, -1.0]), monomial(3)])
def test_assumption_split_sum(f):
    pieces = assumption_split(f, 0.3)
    t = np.linspace(-0.5, 1.5, 101)
    total = sum(p(t) for p in pieces)
    assert np.max(np.abs(total - f(t))) < 1e-12


def test_assumption_split_pieces_vanish():
    f = renyi(1.0)
    p0, p1 = assumption_split(f, 0.3)
    assert p0(np.array([0.0]))[0] == 0.0 and p1(np.array([1.0]))[0] == 0.0
    # smooth f with a single singular point and f(0) = 0: second piece is zero
    g = monomial(2)
    parts = assumption_split(g, 0.3)
    assert len(parts) == 2 and np.all(parts[1](np.linspace(-1, 1, 11)) == 0.0)
