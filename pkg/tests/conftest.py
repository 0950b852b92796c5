import sys


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None:
        return
    ran = {int(r.nodeid.split("criterion_")[1][:2]) for key in ("passed", "failed")
           for r in terminalreporter.stats.get(key, []) if "criterion_" in r.nodeid and r.when == "call"}
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ran):
        terminalreporter.write_line(mod.RESULTS.get(num, f"[FAIL] criterion {num:>2}: raised before reporting"))
