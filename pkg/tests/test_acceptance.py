"""Acceptance suite: one test per shipped criterion, one printed line each.

Criterion 12 asserts the stated remainder-gap shrink factor of >= 2; at
alpha = 0.26 the slowest surviving power sum (order 4, exponent 1.04)
shrinks its partial-sum gaps by only ~1.1x per decade, so the criterion
fails on the true mathematics.  It is kept as stated rather than
loosened; see the expected-failure marker.
"""

import pytest

from tracefluct.acceptance import CRITERIA, run_criteria


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, capsys):
    result = CRITERIA[cid]()
    with capsys.disabled():
        print(result.format_line())
    if cid == 12 and not result.passed:
        pytest.fail(
            "criterion 12 is unattainable as stated: " + result.detail
            + " -- the order-4 power sum at 4*alpha = 1.04 dominates the gaps",
        )
    assert result.passed, result.detail


def test_runner_subsets():
    results = run_criteria(only=[1, 5])
    assert [r.cid for r in results] == [1, 5]
    assert all(r.passed for r in results)
