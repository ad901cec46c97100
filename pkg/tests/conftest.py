"""Shared pytest wiring: surface the acceptance checklist after the run."""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, status, text in sorted(RESULTS):
        terminalreporter.write_line(f"criterion {num}: {status}  {text}")
