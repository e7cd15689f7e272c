import _acceptance_log


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_acceptance_log.RESULTS, key=lambda r: str(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}")
