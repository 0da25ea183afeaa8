import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        if n in RESULTS:
            ok, detail = RESULTS[n]
            terminalreporter.write_line(f"[{n:2}] {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"[{n:2}] FAIL  not run")
