# collects the one-line verdicts printed by test_acceptance and repeats them
# at the end of the run, where captured output would otherwise hide them
VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
