"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import pytest

from dichoricc.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda fn: f"criterion_{fn.number:02d}")
def test_criterion(criterion, capsys):
    res = criterion()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
