def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion, taken from the test outcome."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call":
                continue
            for name, value in getattr(rep, "user_properties", []):
                if name == "acceptance":
                    num, title = value
                    lines.append((num, f"criterion {num:>2}: {'PASS' if rep.passed else 'FAIL'}  {title}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
