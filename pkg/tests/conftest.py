"""
Shared fixtures.
"""
import math

import pytest

from crossratio.core.config import Settings
from crossratio.geometry.combinatorics import build_pattern, enumerate_patterns, select_dependent_triple, torus_pattern
from crossratio.geometry.solver import symmetric_point, torus_point

SQRT3 = math.sqrt(3.0)
G2_SYMMETRIC = 2.0 * math.cos(math.pi / 18.0)

G2_PAIRING = [
    (1, 10), (2, 5), (3, 7), (4, 8), (6, 9), (11, 14), (12, 16), (13, 17), (15, 18),
]


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def torus():
    return torus_pattern()


@pytest.fixture
def hexagonal_point():
    return torus_point(SQRT3, SQRT3, SQRT3)


@pytest.fixture
def g2_pattern():
    return build_pattern(2, G2_PAIRING, name="g2-model")


@pytest.fixture
def g2_layout(g2_pattern):
    return select_dependent_triple(g2_pattern)


@pytest.fixture
def symmetric_g2(g2_pattern, g2_layout):
    return symmetric_point(g2_pattern, g2_layout)


@pytest.fixture(scope="session")
def genus2_census():
    return enumerate_patterns(2)
