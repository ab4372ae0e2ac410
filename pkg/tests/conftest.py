ACCEPTANCE = []


def record(criterion: str, passed: bool, detail: str):
    ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, ok, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0][1:])):
        terminalreporter.write_line(f"{crit} {'PASS' if ok else 'FAIL'}  {detail}")
