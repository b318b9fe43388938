acceptance_verdicts = []


def pytest_terminal_summary(terminalreporter):
    # acceptance verdicts must survive output capture in any pytest mode
    if acceptance_verdicts:
        terminalreporter.section("acceptance verdicts")
        for line in acceptance_verdicts:
            terminalreporter.write_line(line)
