import math

import pytest

from webtorsion.geometry import polygon_from_vertices
from webtorsion.harness import FuzzConfig, random_convex_body


@pytest.fixture(scope="session")
def unit_square():
    return polygon_from_vertices([(0, 0), (1, 0), (1, 1), (0, 1)])


@pytest.fixture(scope="session")
def equilateral():
    return polygon_from_vertices([(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)])


@pytest.fixture(scope="session")
def small_corpus():
    cfg = FuzzConfig(seed=1234, count=60)
    return [random_convex_body(cfg, i) for i in range(cfg.count)]
