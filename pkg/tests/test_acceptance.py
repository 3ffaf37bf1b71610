"""Acceptance suite: every criterion at its stated scale and tolerance.

Each test prints one PASS/FAIL line; `oukp accept` runs the same registry.
"""

import pytest

from oukp.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize(
    "number,title", [(num, title) for num, title, _ in CRITERIA],
    ids=[f"criterion_{num:02d}" for num, _, _ in CRITERIA],
)
def test_acceptance_criterion(number, title):
    result = run_criterion(number)
    print(result.line())
    assert result.passed, f"criterion {number} failed: {result.details}"
