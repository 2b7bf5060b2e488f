import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


def random_pointset(rng, n, d):
    from discrepkit import PointSet
    return PointSet(rng.random((n, d)))


def random_pointset_with_ties(rng, n, d):
    """Random set with injected duplicate coordinates and points."""
    pts = rng.random((n, d))
    if n > 1:
        i, j = rng.integers(0, n, size=2)
        k = rng.integers(0, d)
        pts[i, k] = pts[j, k]
        if rng.random() < 0.3:
            pts[rng.integers(0, n)] = pts[rng.integers(0, n)]
    if rng.random() < 0.2:
        pts[rng.integers(0, n), rng.integers(0, d)] = 0.0
    from discrepkit import PointSet
    return PointSet(pts)
