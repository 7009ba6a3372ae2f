"""Shared pytest infrastructure.

The acceptance tests register their verdicts here so the summary block
at the end of a run always carries one PASS/FAIL line per criterion,
whether or not pytest captured the in-test output.
"""

CRITERION_RESULTS = []


def record_criterion(name: str, ok: bool, detail: str = "") -> bool:
    """Log one acceptance verdict; returns ok so callers can assert it."""
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    CRITERION_RESULTS.append(line)
    print(line, flush=True)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in CRITERION_RESULTS:
        terminalreporter.write_line(line)
