"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Runtime budgets are part of each criterion's verdict.
"""

from __future__ import annotations

import pytest

from holonomy_lab.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = run_criterion(number, seed=0)
    with capsys.disabled():
        print("\n" + result.line(), flush=True)
    assert result.passed, "; ".join(result.failures)
