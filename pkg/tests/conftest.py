import os
import sys

import hypothesis
import numpy as np
import pytest

from tfop.grid import GridSpec, SampledFunction
from tfop.weights import WindowSpec

np.seterr(all="warn", under="ignore")

hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=100, deadline=None, derandomize=True)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("debugger", report_multiple_bugs=False, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def line64():
    return GridSpec(1, 8.0, 64)


@pytest.fixture
def gauss64(line64):
    return SampledFunction.from_callable(line64, lambda x: np.exp(-(x**2) / 2))


@pytest.fixture
def window64(line64):
    return WindowSpec("gaussian", line64, 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
