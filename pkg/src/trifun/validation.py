"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

import numpy as np

from .exceptions import DimensionMismatch
from .matcore import LowerTriangular, from_dense


def check_square_matrix(X):
    """Return ``X`` as a finite 2-D float or complex array of square shape."""
    X = np.asarray(X)
    if X.dtype.kind not in "biufc":
        raise TypeError(f"expected numeric input, got dtype {X.dtype}")
    X = X.astype(np.complex128 if np.iscomplexobj(X) else np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    return X


def check_matrix_stack(X):
    """Return ``(stack, was_single)`` with ``stack`` of shape ``(n, d, d)``."""
    X = np.asarray(X)
    if X.ndim == 2:
        return check_square_matrix(X)[None, :, :], True
    if X.ndim == 3:
        return np.stack([check_square_matrix(x) for x in X]), False
    raise DimensionMismatch(f"expected a (d, d) matrix or an (n, d, d) stack, got shape {X.shape}")


def check_lower_triangular(X, zero_tol=0.0, orientation="auto"):
    """Coerce ``X`` to :class:`LowerTriangular`.

    ``orientation="auto"`` accepts lower input and falls back to the
    transpose path for upper input.
    """
    if isinstance(X, LowerTriangular):
        return X
    X = check_square_matrix(X)
    if orientation == "auto":
        lower_err = None
        try:
            return from_dense(X, zero_tol, "lower")
        except ValueError as err:
            lower_err = err
        try:
            return from_dense(X, zero_tol, "upper")
        except ValueError:
            raise lower_err from None
    return from_dense(X, zero_tol, orientation)
