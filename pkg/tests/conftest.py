import sys
from pathlib import Path

HERE = Path(__file__).parent
FIXTURES = HERE / "fixtures"
GOLDEN = HERE / "golden"

sys.path.insert(0, str(HERE))

# one line per acceptance criterion, filled in by test_acceptance.py
AC_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if AC_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(AC_LINES, key=lambda k: int(k[2:])):
            terminalreporter.write_line(AC_LINES[key])
