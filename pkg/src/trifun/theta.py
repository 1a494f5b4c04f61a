"""Function-independent coefficient tables of simple lower-triangular matrices.

For a lower-triangular ``B`` with distinct diagonal, write
``B = U diag(b_00, ..., b_dd) U^{-1}`` and set
``theta[n, k, m] = U[n, k] * U^{-1}[k, m]`` for ``m <= k <= n``. Every
entry of any function of ``B`` is a linear combination of the function's
values at the diagonal entries with these weights. The table does not
depend on how the eigenvectors are normalised.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSpectrum, DimensionMismatch
from .matcore import LowerTriangular, packed_index, validate_simple_spectrum


def table_size(d):
    return d * (d + 1) * (d + 2) // 6


def table_index(n, k, m):
    """Offset of ``theta[n, k, m]`` (``m <= k <= n``) in lexicographic packed layout."""
    return n * (n + 1) * (n + 2) // 6 + k * (k + 1) // 2 + m


class ThetaTable:
    """Ragged table ``theta[n, k, m]`` for ``0 <= m <= k <= n < dim``.

    Block ``n`` is itself a packed lower triangle in ``(k, m)``, so the
    slice ``theta[n, k, 0..k]`` is contiguous.
    """

    def __init__(self, dim, values):
        values = np.asarray(values)
        values = values.astype(np.complex128 if np.iscomplexobj(values) else np.float64)
        values = values.ravel().copy()
        if values.size != table_size(dim):
            raise DimensionMismatch(
                f"table for d={dim} needs {table_size(dim)} values, got {values.size}"
            )
        values.setflags(write=False)
        self.dim = int(dim)
        self.values = values

    def __getitem__(self, nkm):
        n, k, m = nkm
        if not (0 <= m <= k <= n < self.dim):
            return self.values.dtype.type(0)
        return self.values[table_index(n, k, m)]

    def block(self, n):
        """Dense ``(n + 1) x (n + 1)`` lower triangle of ``theta[n, :, :]``."""
        out = np.zeros((n + 1, n + 1), dtype=self.values.dtype)
        start = table_index(n, 0, 0)
        rows, cols = np.tril_indices(n + 1)
        out[rows, cols] = self.values[start:start + (n + 1) * (n + 2) // 2]
        return out

    def to_dense(self):
        """Zero-padded cube ``T[n, k, m]`` of shape ``(d, d, d)``."""
        d = self.dim
        out = np.zeros((d, d, d), dtype=self.values.dtype)
        for n in range(d):
            out[n, :n + 1, :n + 1] = self.block(n)
        return out

    @classmethod
    def from_dense(cls, cube):
        cube = np.asarray(cube)
        d = cube.shape[0]
        values = [cube[n, k, m] for n in range(d) for k in range(n + 1) for m in range(k + 1)]
        return cls(d, np.asarray(values, dtype=cube.dtype))

    def triplets(self):
        """Yield ``(n, k, m, value)`` in storage order."""
        i = 0
        for n in range(self.dim):
            for k in range(n + 1):
                for m in range(k + 1):
                    yield n, k, m, self.values[i]
                    i += 1

    def __eq__(self, other):
        if not isinstance(other, ThetaTable):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"ThetaTable(dim={self.dim}, conditioning={conditioning_indicator(self):.3g})"


@dataclass(frozen=True)
class EigenPair:
    """Right eigenvectors (columns of ``U``) and left eigenvectors (rows of ``U_inv``)."""

    U: LowerTriangular
    U_inv: LowerTriangular


def compute_theta(B, info=None):
    """Coefficient table of ``B`` by the row-by-row recursion.

    Row ``n`` only needs rows ``< n``:
    ``theta[n, k, m] = sum_{k <= l < n} b[n, l] theta[l, k, m] / (b_kk - b_nn)``
    for ``k < n``, and the last column of each block follows from
    ``sum_l theta[n, l, m] = delta_nm``.
    """
    if info is None:
        info = validate_simple_spectrum(B)
    d = B.dim
    if info.dim != d:
        raise DimensionMismatch(f"spectrum info is for d={info.dim}, matrix has d={d}")
    diag = B.diagonal()
    threshold = info.gap_threshold
    values = np.zeros(table_size(d), dtype=B.dtype)
    for n in range(d):
        b_row = B.row(n)
        b_nn = diag[n]
        for k in range(n):
            gap = diag[k] - b_nn
            if abs(gap) < threshold:
                raise DegenerateSpectrum((k, n), abs(gap), threshold)
            acc = np.zeros(k + 1, dtype=B.dtype)
            for l in range(k, n):
                start = table_index(l, k, 0)
                acc += b_row[l] * values[start:start + k + 1]
            start = table_index(n, k, 0)
            values[start:start + k + 1] = acc / gap
        # k = n: closes each column m < n to the Kronecker delta
        base = table_index(n, 0, 0)
        for m in range(n):
            total = 0
            for l in range(m, n):
                total += values[base + l * (l + 1) // 2 + m]
            values[base + n * (n + 1) // 2 + m] = -total
        values[base + n * (n + 1) // 2 + n] = 1
    return ThetaTable(d, values)


def eigenpair(B, info=None, scales=None):
    """Eigenvector matrix and its inverse by forward substitution.

    The eigenvector for ``b_kk`` has ``v_i = 0`` for ``i < k`` and, by
    default, ``v_k = 1``. ``scales`` rescales each eigenvector column.
    """
    if info is None:
        info = validate_simple_spectrum(B)
    d = B.dim
    diag = B.diagonal()
    Bd = B.to_dense()
    dtype = np.result_type(Bd.dtype, np.asarray(scales).dtype if scales is not None else Bd.dtype)
    U = np.zeros((d, d), dtype=dtype)
    for k in range(d):
        U[k, k] = 1 if scales is None else scales[k]
        for i in range(k + 1, d):
            denom = diag[k] - diag[i]
            if abs(denom) < info.gap_threshold:
                raise DegenerateSpectrum((k, i), abs(denom), info.gap_threshold)
            U[i, k] = Bd[i, k:i] @ U[k:i, k] / denom
    # solve U X = I column by column
    X = np.zeros((d, d), dtype=dtype)
    for j in range(d):
        X[j, j] = 1 / U[j, j]
        for i in range(j + 1, d):
            X[i, j] = -(U[i, j:i] @ X[j:i, j]) / U[i, i]
    rows, cols = np.tril_indices(d)
    return EigenPair(LowerTriangular(d, U[rows, cols]), LowerTriangular(d, X[rows, cols]))


def theta_from_eigenvectors(B, info=None, scales=None):
    """Reference table built directly from explicit eigenvectors."""
    pair = eigenpair(B, info, scales)
    U = pair.U.to_dense()
    V = pair.U_inv.to_dense()
    d = B.dim
    cube = U[:, :, None] * V[None, :, :]
    # zero everything outside m <= k <= n
    n_idx, k_idx, m_idx = np.indices((d, d, d))
    cube[~((m_idx <= k_idx) & (k_idx <= n_idx))] = 0
    return ThetaTable.from_dense(cube)


@dataclass(frozen=True)
class IdentityReport:
    """Maximum residual of each structural identity.

    ``linear_combination``: ``b_nm = sum_k b_kk theta[n, k, m]``;
    ``row_sum``: ``sum_l theta[n, l, m] = delta_nm``;
    ``orthogonality``: ``sum_i theta[n, k, i] theta[i, l, m] = delta_kl theta[n, k, m]``;
    ``eigen``: ``sum_l b_nl theta[l, k, m] = b_kk theta[n, k, m]``.
    """

    linear_combination: float
    row_sum: float
    orthogonality: float
    eigen: float
    tol: float
    worst_linear_combination: tuple = None

    @property
    def residuals(self):
        return {
            "linear_combination": self.linear_combination,
            "row_sum": self.row_sum,
            "orthogonality": self.orthogonality,
            "eigen": self.eigen,
        }

    @property
    def ok(self):
        return all(r <= self.tol for r in self.residuals.values())

    @property
    def max_residual(self):
        return max(self.residuals.values())


def check_identities(B, T, tol=1e-10):
    if B.dim != T.dim:
        raise DimensionMismatch(f"matrix has d={B.dim}, table has d={T.dim}")
    d = B.dim
    cube = T.to_dense()
    Bd = B.to_dense()
    diag = B.diagonal()
    identity = np.eye(d)

    lin = np.abs(np.einsum("k,nkm->nm", diag, cube) - Bd)
    rows = np.abs(cube.sum(axis=1) - identity)
    ortho_lhs = np.einsum("nki,ilm->nklm", cube, cube)
    ortho_rhs = identity[None, :, :, None] * cube[:, :, None, :]
    ortho = np.abs(ortho_lhs - ortho_rhs)
    eig = np.abs(np.einsum("nl,lkm->nkm", Bd, cube) - diag[None, :, None] * cube)

    worst = np.unravel_index(int(np.argmax(lin)), lin.shape)
    return IdentityReport(
        float(lin.max()),
        float(rows.max()),
        float(ortho.max()),
        float(eig.max()),
        float(tol),
        tuple(int(i) for i in worst),
    )


def conditioning_indicator(T):
    """Largest coefficient modulus; grows like the inverse of the smallest gap."""
    return float(np.max(np.abs(T.values)))
