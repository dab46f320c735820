"""Shared pytest plumbing: surface the acceptance-criterion verdict lines.

Stdout is captured during the run, so the acceptance tests also append
their one-line verdicts here and we replay them in the terminal summary.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
