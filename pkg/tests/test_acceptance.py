"""Acceptance battery: one test per criterion, each printing a pass/fail line.

Also runnable directly: ``python3 tests/test_acceptance.py [--skip-slow]``.
"""

import sys

import pytest

from dirac_entropy import suite

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # direct execution without the tests directory on the path
    ACCEPTANCE_LINES = []


def _param(c):
    marks = [pytest.mark.slow] if c.slow else []
    return pytest.param(c, id=f"{c.number:02d}-{c.id}", marks=marks)


@pytest.mark.parametrize("criterion", [_param(c) for c in suite.CRITERIA])
def test_criterion(criterion):
    r = criterion.run()
    line = f"{criterion.number:2d} {r.line()}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert r.error is None, r.error
    assert r.passed, line


if __name__ == "__main__":
    skip_slow = "--skip-slow" in sys.argv
    failed = 0
    for c in suite.CRITERIA:
        if skip_slow and c.slow:
            continue
        r = c.run()
        print(f"{c.number:2d} {r.line()}", flush=True)
        failed += not r.passed
    sys.exit(1 if failed else 0)
