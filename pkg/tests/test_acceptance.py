"""One test per acceptance criterion; each prints its pass/fail line."""

import pytest

from dissoc.reproduce import CHECKS, run_check


@pytest.mark.parametrize("number", [num for num, *_ in CHECKS],
                         ids=[f"{num:02d}-{title.replace(' ', '-')}" for num, title, *_ in CHECKS])
def test_criterion(number, capsys):
    res = run_check(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.line()
