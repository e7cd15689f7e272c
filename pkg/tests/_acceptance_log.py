"""Collected (criterion, passed, detail) rows, printed by the conftest hook."""

RESULTS = []


def record(number, ok, detail):
    RESULTS.append((number, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}")
    return bool(ok)
