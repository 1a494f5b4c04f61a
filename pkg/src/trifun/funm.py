"""Matrix functions of simple lower-triangular matrices.

Two independent routes are provided:

* ``apply`` combines scalar function values at the eigenvalues with a
  precomputed coefficient table, so one table serves any number of
  functions or semigroup times;
* ``parlett_apply`` fills ``f(B)`` subdiagonal by subdiagonal from the
  commutation relation ``f(B) B = B f(B)``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSpectrum, DimensionMismatch, DomainViolation
from .matcore import DEFAULT_SEP_TOL, LowerTriangular, packed_index, validate_simple_spectrum
from .theta import ThetaTable, table_index

KINDS = ("exp", "log", "pow", "inv", "poly")


@dataclass(frozen=True)
class ScalarFunction:
    """Builtin scalar map applied to eigenvalues.

    Use the constructors :meth:`exp`, :meth:`log`, :meth:`power`,
    :meth:`inverse` and :meth:`polynomial` rather than the raw fields.
    Polynomial coefficients are in ascending order (``c0 + c1 x + ...``).
    """

    kind: str
    t: float = 1.0
    alpha: float = 1.0
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "poly" and len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")

    @classmethod
    def exp(cls, t=1.0):
        return cls("exp", t=float(t))

    @classmethod
    def log(cls):
        return cls("log")

    @classmethod
    def power(cls, alpha):
        return cls("pow", alpha=float(alpha))

    @classmethod
    def inverse(cls):
        return cls("inv")

    @classmethod
    def polynomial(cls, coeffs):
        return cls("poly", coeffs=tuple(coeffs))

    @property
    def name(self):
        if self.kind == "exp":
            return f"exp(t={self.t:g})"
        if self.kind == "pow":
            return f"pow(alpha={self.alpha:g})"
        if self.kind == "poly":
            return f"poly{list(self.coeffs)}"
        return self.kind

    def _integer_power(self):
        return float(self.alpha).is_integer() and self.alpha >= 0

    def check_domain(self, values):
        """Raise DomainViolation at the first eigenvalue outside the domain."""
        values = np.asarray(values)
        for i, x in enumerate(values):
            if self.kind == "inv" and x == 0:
                raise DomainViolation(self.name, i, x, "zero eigenvalue")
            if self.kind == "log" or (self.kind == "pow" and not self._integer_power()):
                on_cut = np.imag(x) == 0 and np.real(x) <= 0
                if on_cut:
                    raise DomainViolation(self.name, i, x, "eigenvalue on the branch cut (-inf, 0]")

    def __call__(self, values):
        values = np.asarray(values)
        if self.kind == "exp":
            return np.exp(self.t * values)
        if self.kind == "log":
            return np.log(values)
        if self.kind == "pow":
            if self._integer_power():
                return values ** int(self.alpha)
            return np.power(values, self.alpha)
        if self.kind == "inv":
            return 1 / values
        acc = np.zeros_like(values, dtype=np.result_type(values, np.asarray(self.coeffs)))
        for c in reversed(self.coeffs):
            acc = acc * values + c
        return acc


def _evaluate(f, diag):
    f.check_domain(diag)
    return np.asarray(f(diag))


def combine(T, fvals):
    """Assemble ``F[n, m] = delta_nm f_n + sum_{m <= k < n} theta[n, k, m] (f_k - f_n)``."""
    d = T.dim
    fvals = np.asarray(fvals)
    dtype = np.result_type(T.values, fvals)
    out = np.zeros(d * (d + 1) // 2, dtype=dtype)
    for n in range(d):
        f_n = fvals[n]
        acc = np.zeros(n + 1, dtype=dtype)
        for k in range(n):
            start = table_index(n, k, 0)
            acc[:k + 1] += T.values[start:start + k + 1] * (fvals[k] - f_n)
        acc[n] = f_n
        out[packed_index(n, 0):packed_index(n, n) + 1] = acc
    return out


def apply(B, T, f):
    """``f(B)`` from the coefficient table ``T`` of ``B``.

    The diagonal of the result is exactly ``f`` of the diagonal of ``B``.
    """
    if B.dim != T.dim:
        raise DimensionMismatch(f"matrix has d={B.dim}, table has d={T.dim}")
    fvals = _evaluate(f, B.diagonal())
    return B.with_entries(combine(T, fvals))


def exp_semigroup(B, T, ts, parallel=False):
    """``exp(t B)`` for every ``t`` in ``ts``, sharing one table."""
    ts = [float(t) for t in ts]
    if parallel and len(ts) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor() as pool:
            return list(pool.map(lambda t: apply(B, T, ScalarFunction.exp(t)), ts))
    return [apply(B, T, ScalarFunction.exp(t)) for t in ts]


def _check_gaps(diag, threshold):
    d = len(diag)
    for n in range(d):
        for m in range(n):
            gap = abs(diag[n] - diag[m])
            if gap < threshold:
                raise DegenerateSpectrum((m, n), gap, threshold)


def _parlett_fill(B, P):
    """Fill strictly-lower entries of ``P`` (last axis may carry coefficient vectors).

    From ``P B = B P``:
    ``p_nm (b_nn - b_mm) = b_nm (p_nn - p_mm) + sum_{m < k < n} (p_nk b_km - b_nk p_km)``.
    """
    d = B.dim
    Bd = B.to_dense()
    diag = B.diagonal()
    for offset in range(1, d):
        for m in range(d - offset):
            n = m + offset
            total = Bd[n, m] * (P[n, n] - P[m, m])
            for k in range(m + 1, n):
                total = total + P[n, k] * Bd[k, m] - Bd[n, k] * P[k, m]
            P[n, m] = total / (diag[n] - diag[m])
    return P


def parlett_apply(B, f, sep_tol=DEFAULT_SEP_TOL):
    """``f(B)`` by the subdiagonal commutation recurrence, without any table."""
    info = validate_simple_spectrum(B, sep_tol)
    diag = B.diagonal()
    _check_gaps(diag, info.gap_threshold)
    fvals = _evaluate(f, diag)
    d = B.dim
    P = np.zeros((d, d), dtype=np.result_type(B.dtype, fvals))
    P[np.diag_indices(d)] = fvals
    P = _parlett_fill(B, P)
    return B.with_entries(P[np.tril_indices(d)])


def parlett_coefficients(B, info=None):
    """Run the commutation recurrence on coefficient vectors.

    Each ``p_nm`` is tracked as its coefficient vector over the basis of
    diagonal values ``p_00, ..., p_dd``; the result is a coefficient table.
    """
    if info is None:
        info = validate_simple_spectrum(B)
    d = B.dim
    _check_gaps(B.diagonal(), info.gap_threshold)
    P = np.zeros((d, d, d), dtype=B.dtype)
    for i in range(d):
        P[i, i, i] = 1
    P = _parlett_fill(B, P)
    # P[n, m, k] is the weight of p_kk in p_nm
    return ThetaTable.from_dense(np.transpose(P, (0, 2, 1)))


def function_from_name(name, t=1.0, alpha=1.0, coeffs=None):
    """Build a :class:`ScalarFunction` from a CLI-style name and arguments."""
    if name == "exp":
        return ScalarFunction.exp(t)
    if name == "log":
        return ScalarFunction.log()
    if name == "pow":
        return ScalarFunction.power(alpha)
    if name == "inv":
        return ScalarFunction.inverse()
    if name == "poly":
        if not coeffs:
            raise ValueError("poly needs coefficients")
        return ScalarFunction.polynomial(coeffs)
    raise ValueError(f"unknown function {name!r}; expected one of {KINDS}")
