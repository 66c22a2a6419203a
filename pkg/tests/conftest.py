"""Shared fixtures for the galband test suite"""

import os
import tempfile

# keep test logs out of the project tree; must happen before config is imported
os.environ.setdefault("GALBAND_LOG_DIR", tempfile.mkdtemp(prefix="galband-logs-"))

import numpy as np
import pytest

from schema import GALSpec


@pytest.fixture
def lame1() -> GALSpec:
    """PT-Lame potential [2,0,0,0] at m = 0.5"""
    return GALSpec(a=1.0, m=0.5)


@pytest.fixture
def lame2() -> GALSpec:
    """PT-Lame potential [6,0,0,0] at m = 0.5"""
    return GALSpec(a=2.0, m=0.5)


@pytest.fixture
def lame2_edges() -> np.ndarray:
    """The five closed-form band edges of [6,0,0,0] at m = 0.5"""
    delta = np.sqrt(0.75)
    return np.sort(np.array([-3.0 - 2 * delta, -4.5, -3.0, -1.5, -3.0 + 2 * delta]))


@pytest.fixture
def generic_spec() -> GALSpec:
    """A spec with all four terms present"""
    return GALSpec(a=2.0, b=1.0, f=1.0, g=1.0, m=0.4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
