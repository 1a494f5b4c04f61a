"""Generator extraction from a single snapshot of a triangular semigroup.

A real lower-triangular ``P = P(t)`` with positive, distinct diagonal has
exactly one real logarithm, and the generator ``B`` with ``P = exp(t B)``
shares the coefficient table of ``P``. So ``B`` follows from the table of
``P`` and the scalar logarithms ``b_nn = log(p_nn) / t``.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DomainViolation, NonPositiveDiagonal
from .funm import combine
from .matcore import DEFAULT_SEP_TOL, LowerTriangular, row_sums, validate_simple_spectrum
from .oracles import exp_series
from .theta import ThetaTable, compute_theta, conditioning_indicator

DEFAULT_MARKOV_TOL = 1e-12


@dataclass(frozen=True)
class SemigroupSample:
    """Snapshot ``P = P(t)`` of a semigroup at time ``t > 0``."""

    P: LowerTriangular
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"snapshot time must be positive, got {self.t}")
        if self.P.scalar_kind != "real":
            raise DomainViolation(
                "generator", None, complex(self.P.entries[0]),
                "snapshots must be real; use apply with a principal logarithm for complex input",
            )
        for i, p in enumerate(self.P.diagonal()):
            if not p > 0:
                raise NonPositiveDiagonal(i, p)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class MarkovReport:
    nonnegative: bool
    unit_row_sums: bool
    diagonal_in_unit_interval: bool
    min_entry: float
    max_row_sum_error: float
    tol: float

    @property
    def is_markov(self):
        return self.nonnegative and self.unit_row_sums and self.diagonal_in_unit_interval


@dataclass(frozen=True)
class GeneratorDiagnostics:
    row_sums_of_B: np.ndarray = field(repr=False)
    markov_input: bool
    rate_matrix: bool
    conditioning: float


@dataclass(frozen=True)
class GeneratorResult:
    B: LowerTriangular
    eta: ThetaTable
    diagnostics: GeneratorDiagnostics


class Verification(NamedTuple):
    residual: float
    tol: float

    @property
    def ok(self):
        return self.residual <= self.tol


def eta_coefficients(S, sep_tol=DEFAULT_SEP_TOL):
    """Coefficient table of the snapshot; equals the table of the generator."""
    info = validate_simple_spectrum(S.P, sep_tol)
    return compute_theta(S.P, info)


def is_rate_matrix(B, tol=DEFAULT_MARKOV_TOL):
    """Nonnegative off-diagonal entries and nonpositive diagonal, within ``tol``."""
    dense = B.to_dense()
    off = dense - np.diag(np.diag(dense))
    return bool(np.all(off >= -tol) and np.all(np.diag(dense) <= tol))


def check_markov(P, tol=DEFAULT_MARKOV_TOL):
    if P.scalar_kind != "real":
        raise DomainViolation("check_markov", None, complex(P.entries[0]), "matrix must be real")
    entries = P.entries
    sums = row_sums(P)
    diag = P.diagonal()
    row_err = float(np.max(np.abs(sums - 1)))
    return MarkovReport(
        nonnegative=bool(np.min(entries) >= -tol),
        unit_row_sums=row_err <= tol,
        diagonal_in_unit_interval=bool(np.all(diag > 0) and np.all(diag <= 1 + tol)),
        min_entry=float(np.min(entries)),
        max_row_sum_error=row_err,
        tol=float(tol),
    )


def extract_generator(S, sep_tol=DEFAULT_SEP_TOL, markov_tol=DEFAULT_MARKOV_TOL):
    """Unique real generator ``B`` with ``exp(S.t * B) = S.P``."""
    eta = eta_coefficients(S, sep_tol)
    logs = np.log(S.P.diagonal()) / S.t
    B = S.P.with_entries(combine(eta, logs))
    diagnostics = GeneratorDiagnostics(
        row_sums_of_B=row_sums(B),
        markov_input=check_markov(S.P, markov_tol).is_markov,
        rate_matrix=is_rate_matrix(B, markov_tol),
        conditioning=conditioning_indicator(eta),
    )
    return GeneratorResult(B, eta, diagnostics)


def verify_generator(R, S, tol=None):
    """Max entrywise gap between the series exponential of ``t B`` and ``P``.

    The default tolerance is ``1e-8 * d * max|P|``.
    """
    if R.B.dim != S.P.dim:
        raise ValueError(f"generator has d={R.B.dim}, snapshot has d={S.P.dim}")
    P = S.P.to_dense()
    if tol is None:
        tol = 1e-8 * S.P.dim * max(float(np.max(np.abs(P))), 1.0)
    reconstructed = exp_series(R.B.to_dense() * S.t)
    return Verification(float(np.max(np.abs(reconstructed - P))), float(tol))
