"""Seeded random triangular matrices for benchmarks and property checks."""

import numpy as np

from .matcore import LowerTriangular, packed_index


def make_rng(*key):
    """64-bit PCG generator keyed by a tuple of nonnegative integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in key])))


def spread_diagonal(rng, d, min_gap):
    """``d`` values whose smallest pairwise gap is exactly ``min_gap``.

    Consecutive gaps are ``min_gap * (1 + u)`` with ``u`` uniform in [0, 1),
    one of them pinned to ``min_gap``; the values are centred and shuffled.
    """
    if d == 1:
        return np.array([rng.uniform(-1, 1)])
    steps = min_gap * (1 + rng.uniform(0, 1, size=d - 1))
    steps[rng.integers(d - 1)] = min_gap
    values = np.concatenate([[0.0], np.cumsum(steps)])
    values -= values.mean()
    return rng.permutation(values)


def random_lower_triangular(rng, d, min_gap=0.5, offdiag_scale=1.0):
    """Off-diagonal entries uniform in ``[-offdiag_scale, offdiag_scale]``."""
    diag = spread_diagonal(rng, d, min_gap)
    entries = np.empty(d * (d + 1) // 2)
    for n in range(d):
        start = packed_index(n, 0)
        entries[start:start + n] = rng.uniform(-offdiag_scale, offdiag_scale, size=n)
        entries[start + n] = diag[n]
    return LowerTriangular(d, entries)


def random_rate_matrix(rng, d, min_gap=0.5):
    """Lower-triangular generator: zero first row, nonnegative rates, zero row sums.

    Exit rates ``-b_nn`` are distinct with gaps at least ``min_gap`` and
    are split across the row by Dirichlet weights.
    """
    exit_rates = np.concatenate([[0.0], min_gap * np.cumsum(1 + rng.uniform(0, 1, size=d - 1))])
    exit_rates[1:] = rng.permutation(exit_rates[1:])
    entries = np.zeros(d * (d + 1) // 2)
    for n in range(1, d):
        start = packed_index(n, 0)
        entries[start:start + n] = exit_rates[n] * rng.dirichlet(np.ones(n))
        entries[start + n] = -entries[start:start + n].sum()
    return LowerTriangular(d, entries)
