import time

import pytest

from fovguard.optimizer import StreamClock
from fovguard.resources import DEFAULT_RATES, VideoConfig
from fovguard.trace_io import SynthParams, synth_traces

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    label, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        verdict = "PASS" if rep.passed else "FAIL"
        if _ACCEPTANCE.get(label, ("PASS",))[0] == "FAIL":
            verdict = "FAIL"
        _ACCEPTANCE[label] = (verdict, title)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_ACCEPTANCE, key=lambda s: int(s[2:])):
        verdict, title = _ACCEPTANCE[label]
        terminalreporter.write_line(f"{label} {verdict}: {title}")


@pytest.fixture(scope="session")
def video():
    return VideoConfig()


@pytest.fixture(scope="session")
def rates():
    return DEFAULT_RATES


@pytest.fixture(scope="session")
def traces50():
    return synth_traces(SynthParams(seed=0), 50)


@pytest.fixture(scope="session")
def clock60():
    return StreamClock(l0=3, T_seg=1.0, L=60)


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.fixture
def stopwatch():
    return Stopwatch
