ACCEPTANCE = {}


def record(criterion: int, name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (name, ok, detail)
    print(f"criterion {criterion} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k} [{'PASS' if ok else 'FAIL'}] {name}: {detail}")
