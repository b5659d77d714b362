import math

import pytest
from hypothesis import given, settings, strategies as st

from dirac_entropy.errors import GeometryError, TouchingClosuresError
from dirac_entropy.geometry import (Interval, IntervalSet, Partition, apply_mobius, cross_ratio_log,
                                    decompose, elementary_pieces, multi_cross_ratio_log, parse_interval,
                                    parse_interval_set, parse_partitioned_sets, set_algebra)


def test_interval_validation():
    with pytest.raises(GeometryError):
        Interval(1.0, 1.0)
    with pytest.raises(GeometryError):
        Interval(-math.inf, math.inf)
    with pytest.raises(GeometryError):
        Interval(math.nan, 1.0)
    assert not Interval(0.0, math.inf).bounded


def test_cross_ratio_examples():
    assert cross_ratio_log(Interval(0, 1), Interval(2, 3)) == pytest.approx(math.log(4 / 3), rel=1e-15)
    assert cross_ratio_log(Interval(0, 1), Interval(2, math.inf)) == pytest.approx(math.log(2.0), rel=1e-15)
    assert cross_ratio_log(Interval(-math.inf, 0), Interval(1, 2)) == pytest.approx(math.log(2.0), rel=1e-15)


def test_cross_ratio_log_divergence():
    vals = [cross_ratio_log(Interval(0, 1), Interval(1 + e, 3)) for e in (1e-3, 1e-6, 1e-9)]
    # each factor 1000 in eps adds about ln(1000)
    assert vals[1] - vals[0] == pytest.approx(math.log(1e3), rel=1e-2)
    assert vals[2] - vals[1] == pytest.approx(math.log(1e3), rel=1e-4)


def test_touching_and_overlap_rejected():
    with pytest.raises(TouchingClosuresError):
        cross_ratio_log(Interval(0, 1), Interval(1, 2))
    with pytest.raises(GeometryError):
        cross_ratio_log(Interval(0, 2), Interval(1, 3))
    with pytest.raises(GeometryError):
        cross_ratio_log(Interval(0, math.inf), Interval(-math.inf, -1))


def test_multi_cross_ratio():
    s = IntervalSet([(0, 1), (2, 3), (4, 5)])
    part = Partition((0, 2), (1,))
    brute = cross_ratio_log(s[0], s[1]) + cross_ratio_log(s[2], s[1])
    assert multi_cross_ratio_log(s, part) == pytest.approx(brute, rel=1e-14)
    assert multi_cross_ratio_log(s, part.swapped()) == pytest.approx(brute, rel=1e-14)
    two = IntervalSet([(0, 1), (2, 3)])
    assert multi_cross_ratio_log(two, Partition((0,), (1,))) == cross_ratio_log(two[0], two[1])


def test_partition_validation():
    with pytest.raises(GeometryError):
        Partition((), (0,))
    with pytest.raises(GeometryError):
        Partition((0, 1), (1,))
    with pytest.raises(GeometryError):
        multi_cross_ratio_log(IntervalSet([(0, 1), (2, 3), (4, 5)]), Partition((0,), (1,)))


def test_mobius_examples():
    s = IntervalSet([(0, 1), (2, 3)])
    t = apply_mobius(s, "translate", 10)
    assert [(iv.a, iv.b) for iv in t] == [(10, 11), (12, 13)]
    sc = apply_mobius(s, "scale", 2)
    assert [(iv.a, iv.b) for iv in sc] == [(0, 2), (4, 6)]
    neg = apply_mobius(s, "scale", -1)
    assert [(iv.a, iv.b) for iv in neg] == [(-3, -2), (-1, 0)]
    inv = apply_mobius(IntervalSet([(1, 2), (3, 4)]), "invert")
    assert [(iv.a, iv.b) for iv in inv] == [(0.25, 1 / 3), (0.5, 1.0)]
    ref = cross_ratio_log(Interval(1, 2), Interval(3, 4))
    assert cross_ratio_log(*inv) == pytest.approx(ref, rel=1e-12)
    with pytest.raises(GeometryError):
        apply_mobius(s, "invert")


def test_set_algebra():
    alg = set_algebra(Interval(0, 2.5), Interval(1, 4))
    assert [(iv.a, iv.b) for iv in alg.difference] == [(0, 1)]
    assert [(iv.a, iv.b) for iv in alg.intersection] == [(1, 2.5)]
    assert [(iv.a, iv.b) for iv in alg.union] == [(0, 4)]
    assert 2.5 + 3 == pytest.approx(alg.intersection.measure + alg.union.measure)
    dis = set_algebra(Interval(0, 1), Interval(2, 3))
    assert dis.intersection.empty and dis.union.measure == 2
    assert set_algebra(Interval(0, 1), Interval(0, 1)).difference.empty


def test_pieces_and_decompose():
    s1, s2 = IntervalSet([(0, 2)]), IntervalSet([(1, 3)])
    pieces = elementary_pieces(s1, s2)
    assert [(p.a, p.b) for p in pieces] == [(0, 1), (1, 2), (2, 3)]
    assert decompose(s2, pieces) == [1, 2]


def test_parsers():
    assert parse_interval("0, inf") == Interval(0, math.inf)
    assert len(parse_interval_set("0,1;4,5")) == 2
    combined, part = parse_partitioned_sets("0,1;4,5|2,3")
    assert part.p1 == (0, 2) and part.p2 == (1,)
    with pytest.raises(GeometryError):
        parse_interval("0;1")
    with pytest.raises(GeometryError):
        parse_partitioned_sets("0,1")


def test_min_gap_and_separation():
    s = IntervalSet([(0, 1), (1.5, 2), (3, 4)])
    assert s.min_gap == 0.5 and s.strictly_separated
    with pytest.raises(TouchingClosuresError):
        IntervalSet([(0, 1), (1, 2)]).require_separated()


def test_large_separation_expansion():
    r = [1e2, 1e3, 1e4]
    scaled = [cross_ratio_log(Interval(0, 1), Interval(x, x + 2)) * x ** 2 / 2 for x in r]
    rem = [abs(v - 1) for v in scaled]
    assert rem[0] > rem[1] > rem[2]
    assert rem[1] / rem[0] == pytest.approx(0.1, rel=0.05)


pair = st.tuples(st.floats(-50, 50), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))


@settings(max_examples=200, deadline=None)
@given(pair, st.floats(-100, 100), st.floats(0.05, 20))
def test_invariance_property(p, shift, scale):
    a, l1, g, l2 = p
    i1, i2 = Interval(a, a + l1), Interval(a + l1 + g, a + l1 + g + l2)
    s = IntervalSet([i1, i2])
    ref = cross_ratio_log(i1, i2)
    assert ref > 0
    for t in (apply_mobius(s, "translate", shift), apply_mobius(s, "scale", scale),
              apply_mobius(s, "scale", -scale)):
        assert cross_ratio_log(*t) == pytest.approx(ref, rel=1e-9)
    pos = apply_mobius(s, "translate", 1.0 - a)
    ref_pos = cross_ratio_log(*pos)
    assert cross_ratio_log(*apply_mobius(pos, "invert")) == pytest.approx(ref_pos, rel=1e-9)
