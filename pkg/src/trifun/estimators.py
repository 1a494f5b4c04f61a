"""Estimator-style wrappers so the routines compose with scikit-learn tooling."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .funm import apply, exp_semigroup, function_from_name, parlett_apply
from .genlog import DEFAULT_MARKOV_TOL, SemigroupSample, extract_generator, verify_generator
from .matcore import DEFAULT_SEP_TOL, validate_simple_spectrum
from .theta import compute_theta, conditioning_indicator
from .validation import check_lower_triangular, check_matrix_stack


class ThetaExpansion(BaseEstimator):
    """Fit the coefficient table of one triangular matrix, then evaluate many functions.

    Parameters
    ----------
    sep_tol : float
        Minimum relative separation of the diagonal entries.
    zero_tol : float
        Largest modulus tolerated on the zero side of the diagonal.

    Attributes
    ----------
    theta_ : ThetaTable
    spectrum_ : SpectrumInfo
    conditioning_ : float
        Largest coefficient modulus.
    """

    def __init__(self, sep_tol=DEFAULT_SEP_TOL, zero_tol=0.0):
        self.sep_tol = sep_tol
        self.zero_tol = zero_tol

    def fit(self, X, y=None):
        B = check_lower_triangular(X, self.zero_tol)
        self.matrix_ = B
        self.spectrum_ = validate_simple_spectrum(B, self.sep_tol)
        self.theta_ = compute_theta(B, self.spectrum_)
        self.conditioning_ = conditioning_indicator(self.theta_)
        self.dim_ = B.dim
        return self

    def apply(self, func="exp", t=1.0, alpha=1.0, coeffs=None):
        check_is_fitted(self, "theta_")
        f = function_from_name(func, t, alpha, coeffs)
        return apply(self.matrix_, self.theta_, f).oriented_dense()

    def predict(self, ts):
        """``exp(t X)`` for each time in ``ts``, shape ``(len(ts), d, d)``."""
        check_is_fitted(self, "theta_")
        ts = np.atleast_1d(np.asarray(ts, dtype=float)).ravel()
        return np.stack([P.oriented_dense() for P in exp_semigroup(self.matrix_, self.theta_, ts)])


class MatrixFunctionTransformer(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping each triangular matrix ``X`` to ``f(X)``.

    Accepts a single ``(d, d)`` matrix or an ``(n, d, d)`` stack.
    """

    def __init__(self, func="exp", t=1.0, alpha=1.0, coeffs=None, route="theta",
                 sep_tol=DEFAULT_SEP_TOL, zero_tol=0.0):
        self.func = func
        self.t = t
        self.alpha = alpha
        self.coeffs = coeffs
        self.route = route
        self.sep_tol = sep_tol
        self.zero_tol = zero_tol

    def fit(self, X, y=None):
        if self.route not in ("theta", "parlett"):
            raise ValueError(f"route must be 'theta' or 'parlett', got {self.route!r}")
        stack, _ = check_matrix_stack(X)
        self.function_ = function_from_name(self.func, self.t, self.alpha, self.coeffs)
        self.dim_ = stack.shape[1]
        return self

    def _one(self, X):
        B = check_lower_triangular(X, self.zero_tol)
        if self.route == "parlett":
            return parlett_apply(B, self.function_, self.sep_tol).oriented_dense()
        T = compute_theta(B, validate_simple_spectrum(B, self.sep_tol))
        return apply(B, T, self.function_).oriented_dense()

    def transform(self, X):
        check_is_fitted(self, "function_")
        stack, single = check_matrix_stack(X)
        if stack.shape[1] != self.dim_:
            raise ValueError(f"fitted on d={self.dim_}, got d={stack.shape[1]}")
        out = np.stack([self._one(x) for x in stack])
        return out[0] if single else out


class GeneratorEstimator(BaseEstimator):
    """Recover the real generator ``B`` from one snapshot ``P = exp(t B)``.

    Attributes
    ----------
    generator_ : ndarray of shape (d, d)
    eta_ : ThetaTable
    diagnostics_ : GeneratorDiagnostics
    reconstruction_residual_ : float
    """

    def __init__(self, t=1.0, sep_tol=DEFAULT_SEP_TOL, markov_tol=DEFAULT_MARKOV_TOL,
                 zero_tol=0.0):
        self.t = t
        self.sep_tol = sep_tol
        self.markov_tol = markov_tol
        self.zero_tol = zero_tol

    def fit(self, X, y=None):
        P = check_lower_triangular(X, self.zero_tol)
        sample = SemigroupSample(P, self.t)
        result = extract_generator(sample, self.sep_tol, self.markov_tol)
        self.result_ = result
        self.generator_ = result.B.oriented_dense()
        self.eta_ = result.eta
        self.diagnostics_ = result.diagnostics
        self.reconstruction_residual_ = verify_generator(result, sample).residual
        return self

    def predict(self, ts):
        """Semigroup ``exp(s B)`` at each time ``s``, shape ``(len(ts), d, d)``."""
        check_is_fitted(self, "result_")
        ts = np.atleast_1d(np.asarray(ts, dtype=float)).ravel()
        B = self.result_.B
        return np.stack([P.oriented_dense() for P in exp_semigroup(B, self.eta_, ts)])
