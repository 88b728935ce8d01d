"""
conftest.py

Shared fixtures: small seeded problems, feature matrices and a scratch
result store. Fixtures draw only from fixed seeds, so tests can run in
any order.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure project root is on PYTHONPATH for pytest
PROJECT_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PROJECT_ROOT))

from core.dataset import make_matrix, synthesize_planted  # noqa: E402
from db.database import get_connection  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size statistical and scaling checks")


@pytest.fixture
def db_conn():
    """A fresh in-memory result store for each test."""
    conn = get_connection(":memory:")
    yield conn
    conn.close()


@pytest.fixture
def xor_matrix():
    """
    Exact 8-cell XOR distribution: a, b uniform bits, c = a XOR b, each
    cell once. Label = c.
    """
    rows = [(a, b, a ^ b) for a in (0, 1) for b in (0, 1) for _ in range(2)]
    values = np.array(rows, dtype=np.int64)
    return make_matrix(values, values[:, 2], feature_names=["a", "b", "c"])


@pytest.fixture
def planted_matrix():
    """200 x 8 matrix with 3 planted label-dependent columns."""
    return synthesize_planted(
        samples=200, features=8, informative=3, alphabet=4, classes=4, noise=0.1, seed=7
    )
