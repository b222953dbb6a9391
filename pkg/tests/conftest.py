import os
import sys

import numpy as np
import pytest

# Project modules live at the repository root
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from slocc_families import benchmark_state  # noqa: E402
from state_core import PureState4, basis_state  # noqa: E402


@pytest.fixture
def psi_a():
    return benchmark_state('psiA')


@pytest.fixture
def psi_b():
    return benchmark_state('psiB')


@pytest.fixture
def ghz4():
    return benchmark_state('ghz4')


@pytest.fixture
def zero4():
    return basis_state('0000')


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def state_from_terms(terms, label=None):
    vec = np.zeros(16, dtype=complex)
    for bits, amp in terms:
        vec[int(bits, 2)] += amp
    return PureState4.from_amplitudes(vec, label=label)
