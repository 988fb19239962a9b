"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or in
the captured output of a failure) and asserts the criterion within its
time limit.
"""
import time

import pytest

from vkampen.acceptance import CRITERIA, TOTAL_LIMIT, run_criterion

_elapsed: list[float] = []
LINES: list[str] = []


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number):
    r = run_criterion(number, cases=200, depth=6, margin=2)
    print(r.line())
    LINES.append(r.line())
    _elapsed.append(r.seconds)
    assert r.seconds <= r.limit, r.line()
    assert r.passed, (r.line(), r.details)


def test_total_time_within_budget():
    start = time.perf_counter()
    if len(_elapsed) < len(CRITERIA):
        _elapsed.clear()
        for number, *_ in CRITERIA:
            _elapsed.append(run_criterion(number).seconds)
    total = sum(_elapsed)
    print(f"[{'PASS' if total <= TOTAL_LIMIT else 'FAIL'}] total acceptance time {total:.1f}s, limit {TOTAL_LIMIT}s")
    assert total <= TOTAL_LIMIT
    assert time.perf_counter() - start <= TOTAL_LIMIT
