ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
