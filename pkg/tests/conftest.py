import numpy as np
import pytest

from trifun.matcore import LowerTriangular
from trifun.sampling import make_rng, random_lower_triangular

E = np.e


def lt(rows):
    return LowerTriangular.from_rows(rows)


def well_separated_family(count, seed, dmin=2, dmax=12, min_gap=0.5):
    """Seeded random lower-triangular matrices, off-diagonal in [-1, 1], gaps >= min_gap."""
    out = []
    for i in range(count):
        rng = make_rng(seed, i)
        d = int(rng.integers(dmin, dmax + 1))
        out.append(random_lower_triangular(rng, d, min_gap=min_gap))
    return out


@pytest.fixture(scope="session")
def family():
    return well_separated_family(40, seed=11)


@pytest.fixture
def b2():
    return lt([[1], [2, 3]])


@pytest.fixture
def b3():
    return lt([[1], [1, 2], [1, 1, 4]])
