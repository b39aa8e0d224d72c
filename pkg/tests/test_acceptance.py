"""One test per acceptance criterion; each prints its PASS/FAIL line.

Run ``pytest -s tests/test_acceptance.py`` to see the lines, or use
``ptquartic verify-all`` for the same checks from the command line.
"""

import pytest

from ptquartic.acceptance import CHECKS, run_criterion


@pytest.mark.slow
@pytest.mark.parametrize("criterion", sorted(CHECKS))
def test_criterion(criterion, capsys):
    result = run_criterion(criterion)
    with capsys.disabled():
        print("\n" + result.line())
    assert result.passed, result.detail
