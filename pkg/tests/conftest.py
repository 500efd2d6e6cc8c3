"""
Shared fixtures: the two-tier networks used throughout the tests.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.baselines.popularity import ZipfParams, zipf_popularity
from src.model.types import NetworkModel, TierParams, db_to_linear, dbm_to_watts

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def two_tier(
    sir_db=(-4.0, -4.0),
    capacities=(10.0, 8.0),
    density_ratio=10.0,
    alpha=3.0,
) -> NetworkModel:
    """Macro tier (46 dBm, 1 BS/km^2) plus a denser 30 dBm small-cell tier."""
    return NetworkModel(alpha, (
        TierParams(1.0, dbm_to_watts(46), db_to_linear(sir_db[0]), capacities[0], "macro"),
        TierParams(density_ratio, dbm_to_watts(30), db_to_linear(sir_db[1]), capacities[1], "small"),
    ))


@pytest.fixture
def network_factory():
    return two_tier


@pytest.fixture
def uniform_model():
    return two_tier()


@pytest.fixture
def nonuniform_model():
    return two_tier(sir_db=(-4.0, -2.0))


@pytest.fixture
def zipf20():
    return zipf_popularity(ZipfParams(20, 0.8))


@pytest.fixture
def config_dir():
    return os.path.join(PROJECT_ROOT, "configs")
