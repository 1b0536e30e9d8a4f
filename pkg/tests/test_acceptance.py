"""The twelve acceptance batteries, one test and one printed line each.

The whole suite runs once per session over a shared cache; each test
then prints its criterion's pass/fail line and asserts it.  Run with
`pytest tests/test_acceptance.py -v -s` to watch the lines appear.
"""

import pytest

from xda.acceptance import CRITERIA, run_criteria


@pytest.fixture(scope="module")
def results():
    out = {r.number: r for r in run_criteria(seed=0)}
    assert sorted(out) == sorted(CRITERIA)
    return out


@pytest.mark.parametrize("number", sorted(CRITERIA),
                         ids=["%02d" % n for n in sorted(CRITERIA)])
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    assert r.passed, r.line()
