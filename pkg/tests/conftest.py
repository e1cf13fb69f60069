import functools
import time

from ffclusters.cluster import catalog
from ffclusters.fastforward import DEFAULT_STEPS, Schedule, evolve

REFERENCE = Schedule(B0=10.0, R0=0.0, vbar=100.0, Tff=0.1)

# wall time of each cached run, keyed like reference_run's arguments
RUN_SECONDS = {}
# (criterion, title, passed, detail) rows printed after the session
ACCEPTANCE = []


@functools.lru_cache(maxsize=None)
def reference_run(name, driving=True, steps=DEFAULT_STEPS):
    """Full evolution at the reference schedule; cached for the session."""
    t0 = time.perf_counter()
    recs = evolve(catalog(name), REFERENCE, steps=steps, driving=driving)
    RUN_SECONDS[(name, driving, steps)] = time.perf_counter() - t0
    return recs


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, passed, detail in sorted(ACCEPTANCE):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {num}. {title}: {detail}")
