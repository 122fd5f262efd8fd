"""Acceptance battery: every criterion runs at its stated tolerance and
prints one PASS/FAIL line.  The criteria live in harmap.suite so the CLI
``suite`` subcommand exercises exactly the same code.
"""

import pytest

from harmap import suite


@pytest.mark.parametrize("criterion", suite.CRITERIA, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    result = criterion(seed=42)
    status = "PASS" if result.passed else "FAIL"
    print(f"\n{result.cid} {status} ({result.seconds:.2f}s): {result.description}")
    print(f"    {result.detail}")
    assert result.passed, f"{result.cid}: {result.detail}"


def test_suite_deterministic_for_fixed_seed():
    first = suite.criterion_means_sweep(seed=42)
    second = suite.criterion_means_sweep(seed=42)
    assert first.passed == second.passed
    # detail is identical apart from the trailing wall-clock figure
    assert first.detail.rsplit(",", 1)[0] == second.detail.rsplit(",", 1)[0]
