import math
import shutil
from collections import Counter

import numpy as np
import pytest

from nofade.synthetic import bundled_dataset, sample_registry_path


def naive_entropy(pixels):
    """Probability-map oracle: tally with a Counter, sum in pure Python."""
    values = [int(v) for v in np.asarray(pixels).ravel()]
    n = len(values)
    return -sum((c / n) * math.log2(c / n) for c in Counter(values).values())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sample_registry():
    return sample_registry_path()


@pytest.fixture
def bundled(tmp_path):
    """Copies of the bundled synthetic datasets in a scratch directory."""
    out = {}
    for name in ("synth-cls", "synth-seg", "synth-det"):
        out[name] = tmp_path / "datasets" / name
        shutil.copytree(bundled_dataset(name), out[name])
    return out


# -- acceptance summary --------------------------------------------------------

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _criteria.append((marker.args[0], report.passed, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, duration in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  ({duration:.2f}s)")
