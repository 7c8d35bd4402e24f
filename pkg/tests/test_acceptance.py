"""Every acceptance criterion at its stated tolerance, one line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines live; they are
also printed in the terminal summary.
"""

import pytest

from nearcurve.acceptance import CRITERIA, run_criterion

_LINES = []


@pytest.mark.slow
@pytest.mark.parametrize("number,name", [(n, name) for n, name, _ in CRITERIA],
                         ids=[name for _, name, _ in CRITERIA])
def test_criterion(number, name):
    res = run_criterion(number)
    print(res.line())
    _LINES.append(res.line())
    assert res.passed, res.line()
