"""Shared test plumbing: a recorder that prints one line per acceptance
criterion in the terminal summary, pass or fail."""

from contextlib import contextmanager

_LINES = []


@contextmanager
def criterion(cid: str, description: str):
    try:
        yield
    except BaseException:
        _LINES.append(f"criterion {cid} FAIL: {description}")
        raise
    _LINES.append(f"criterion {cid} PASS: {description}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
