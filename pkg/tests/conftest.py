"""Shared pytest hooks.

The acceptance tests register their pass/fail lines here so they survive
output capture and show up once, together, at the end of the run.
"""

criterion_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for text in criterion_lines:
            terminalreporter.line(text)
