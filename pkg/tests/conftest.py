import numpy as np
import pytest

from csgd.rng import SplitMix64


@pytest.fixture
def rng():
    return SplitMix64(20240611)


def random_complex(gen, *shape):
    """Complex Gaussian array from numpy's generator (independent of the package RNG)."""
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


@pytest.fixture
def npgen():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'}  {detail}")
