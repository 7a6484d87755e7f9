import sys


def pytest_terminal_summary(terminalreporter):
    # echo the acceptance lines, whichever name the module was imported under
    for name in ("test_acceptance", "tests.test_acceptance"):
        lines = getattr(sys.modules.get(name), "RESULTS", None)
        if lines:
            terminalreporter.section("acceptance criteria")
            for line in sorted(lines, key=lambda s: int(s.split()[1])):
                terminalreporter.write_line(line)
            return
