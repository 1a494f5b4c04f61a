"""Reference implementations on dense storage.

These share no code with the packed triangular routes and exist only to
check them.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import solve_triangular

from .exceptions import (
    EigenvalueOnCut,
    NotConverged,
    SingularResolvent,
    SpectralRadiusTooLarge,
)


@dataclass(frozen=True)
class SeriesControl:
    tol: float = 1e-18
    max_terms: int = 5000
    scaling_squarings: int = None  # None: pick so that the scaled max-norm is <= 0.5

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


def _square(M):
    M = np.asarray(M)
    M = M.astype(np.complex128 if np.iscomplexobj(M) else np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def _triangular_side(M):
    if np.array_equal(M, np.tril(M)):
        return "lower"
    if np.array_equal(M, np.triu(M)):
        return "upper"
    return None


def exp_series(M, ctrl=SeriesControl()):
    """Taylor series with scaling and squaring, summed from the identity term."""
    M = _square(M)
    d = M.shape[0]
    norm = np.max(np.abs(M)) if M.size else 0.0
    s = ctrl.scaling_squarings
    if s is None:
        s = 0
        while norm / 2**s > 0.5:
            s += 1
    X = M / 2**s
    result = np.eye(d, dtype=M.dtype)
    term = np.eye(d, dtype=M.dtype)
    for n in range(1, ctrl.max_terms + 1):
        term = term @ X / n
        result = result + term
        if np.max(np.abs(term)) < ctrl.tol:
            break
    else:
        raise NotConverged(ctrl.max_terms, np.max(np.abs(term)))
    for _ in range(s):
        result = result @ result
    return result


def spectral_radius_bound(M):
    """Exact for triangular input (max modulus of the diagonal), row-sum norm otherwise."""
    M = _square(M)
    if M.size == 0:
        return 0.0
    if _triangular_side(M) is not None:
        return float(np.max(np.abs(np.diag(M))))
    return float(np.max(np.sum(np.abs(M), axis=1)))


def log_series(P, ctrl=SeriesControl()):
    """``sum_{n >= 1} (-1)^(n-1) A^n / n`` for ``A = P - I`` with spectral radius below 1."""
    P = _square(P)
    A = P - np.eye(P.shape[0])
    bound = spectral_radius_bound(A)
    if not bound < 1:
        raise SpectralRadiusTooLarge(bound)
    result = np.zeros_like(A)
    power = np.eye(P.shape[0], dtype=A.dtype)
    for n in range(1, ctrl.max_terms + 1):
        power = power @ A
        term = power * ((-1) ** (n - 1) / n)
        result = result + term
        if np.max(np.abs(term)) < ctrl.tol:
            return result
    raise NotConverged(ctrl.max_terms, np.max(np.abs(term)))


def gauss_legendre(nodes):
    """Nodes and weights on [0, 1]."""
    x, w = leggauss(nodes)
    return (x + 1) / 2, w / 2


def log_integral(P, nodes=32):
    """``int_0^1 A (I + tau A)^{-1} dtau`` by Gauss-Legendre quadrature, ``A = P - I``."""
    P = _square(P)
    if nodes < 1:
        raise ValueError("nodes must be positive")
    d = P.shape[0]
    identity = np.eye(d)
    A = P - identity
    side = _triangular_side(A)
    if side is not None:
        for i, a in enumerate(np.diag(A)):
            if np.imag(a) == 0 and np.real(a) <= -1:
                raise EigenvalueOnCut(i, a)
    taus, weights = gauss_legendre(nodes)
    result = np.zeros_like(A)
    for tau, w in zip(taus, weights):
        R = identity + tau * A
        if side is not None:
            pivots = np.abs(np.diag(R))
            if np.min(pivots) < 1e-14:
                raise SingularResolvent(tau, int(np.argmin(pivots)))
            X = solve_triangular(R, A, lower=(side == "lower"))
        else:
            X = np.linalg.solve(R, A)
        result = result + w * X
    return result
