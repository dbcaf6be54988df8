import numpy as np
import pytest

from conformfair.dataset import Dataset, split
from conformfair.synth import SynthConfig, generate


def make_dataset(numeric, labels, groups, **kwargs):
    return Dataset.from_arrays(np.asarray(numeric, dtype=float), np.asarray(labels),
                               np.asarray(groups), normalize=kwargs.pop("normalize", False), **kwargs)


@pytest.fixture
def hand8():
    """Eight tuples: majority 4 positive + 2 negative, minority 1 positive + 1 negative."""
    rng = np.random.default_rng(7)
    groups = np.array([0, 0, 0, 0, 0, 0, 1, 1])
    labels = np.array([1, 1, 1, 1, 0, 0, 1, 0])
    return make_dataset(rng.random((8, 2)), labels, groups)


@pytest.fixture(scope="session")
def small_drift():
    """Small orthogonal-drift dataset with a fixed split."""
    d = generate(SynthConfig(n_major=800, n_minor=300, seed=3))
    return d, split(d, 0)


@pytest.fixture(scope="session")
def small_aligned():
    d = generate(SynthConfig(n_major=800, n_minor=300, drift_mode="aligned", seed=3))
    return d, split(d, 0)


_VERDICTS = {}


@pytest.fixture
def verdict():
    """Record and assert one acceptance criterion, printing a PASS/FAIL line."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _VERDICTS[number] = line
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_VERDICTS):
            terminalreporter.write_line(_VERDICTS[number])
