"""Packed lower-triangular matrices, spectrum validation and dense helpers.

Indices are zero-based throughout the library. Row ``i`` of a packed
matrix holds ``i + 1`` entries starting at offset ``i * (i + 1) // 2``.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateSpectrum, DimensionMismatch, NotTriangular

DEFAULT_SEP_TOL = 1e-8


def packed_size(d):
    return d * (d + 1) // 2


def packed_index(i, j):
    """Offset of entry ``(i, j)``, ``j <= i``, in row-major packed storage."""
    return i * (i + 1) // 2 + j


def _as_scalar_array(values):
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        return arr.astype(np.complex128)
    return arr.astype(np.float64)


@dataclass(frozen=True, eq=False)
class LowerTriangular:
    """Lower-triangular matrix in packed row-major storage.

    ``transposed`` records that the matrix was built from an upper-triangular
    input; results derived from it are transposed back on output.
    """

    dim: int
    entries: np.ndarray
    transposed: bool = False

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError(f"dimension must be at least 1, got {self.dim}")
        entries = _as_scalar_array(self.entries).ravel().copy()
        if entries.size != packed_size(self.dim):
            raise DimensionMismatch(
                f"packed storage for d={self.dim} needs {packed_size(self.dim)} "
                f"entries, got {entries.size}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows, transposed=False):
        """Build from ragged rows ``[[b11], [b21, b22], ...]``."""
        rows = [list(r) for r in rows]
        for i, r in enumerate(rows):
            if len(r) != i + 1:
                raise DimensionMismatch(f"row {i + 1} has {len(r)} entries, expected {i + 1}")
        flat = [x for r in rows for x in r]
        return cls(len(rows), np.asarray(flat), transposed)

    @classmethod
    def diag(cls, values):
        values = _as_scalar_array(values)
        d = values.size
        entries = np.zeros(packed_size(d), dtype=values.dtype)
        for i in range(d):
            entries[packed_index(i, i)] = values[i]
        return cls(d, entries)

    @property
    def scalar_kind(self):
        return "complex" if np.iscomplexobj(self.entries) else "real"

    @property
    def dtype(self):
        return self.entries.dtype

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.dim and 0 <= j < self.dim):
            raise IndexError(ij)
        if j > i:
            return self.entries.dtype.type(0)
        return self.entries[packed_index(i, j)]

    def row(self, i):
        start = packed_index(i, 0)
        return self.entries[start:start + i + 1]

    def diagonal(self):
        idx = [packed_index(i, i) for i in range(self.dim)]
        return self.entries[idx].copy()

    def to_dense(self):
        out = np.zeros((self.dim, self.dim), dtype=self.dtype)
        rows, cols = np.tril_indices(self.dim)
        out[rows, cols] = self.entries
        return out

    def oriented_dense(self):
        """Dense matrix in the caller's original orientation."""
        dense = self.to_dense()
        return dense.T.copy() if self.transposed else dense

    def with_entries(self, entries):
        return LowerTriangular(self.dim, entries, self.transposed)

    def __eq__(self, other):
        if not isinstance(other, LowerTriangular):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.transposed == other.transposed
            and self.entries.dtype == other.entries.dtype
            and np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    def __repr__(self):
        return f"LowerTriangular(dim={self.dim}, kind={self.scalar_kind}, rows={self.to_dense().tolist()})"


@dataclass(frozen=True)
class SpectrumInfo:
    diagonal: np.ndarray = field(repr=False)
    min_separation: float
    scale: float
    relative_separation: float
    closest_pair: tuple = None
    sep_tol: float = DEFAULT_SEP_TOL

    @property
    def dim(self):
        return len(self.diagonal)

    @property
    def gap_threshold(self):
        """Absolute gap below which a division by an eigenvalue difference is refused."""
        return self.sep_tol * max(self.scale, 1.0)


def spectrum_info(M, sep_tol=DEFAULT_SEP_TOL):
    """Separation diagnostics for the diagonal of ``M`` without raising."""
    diag = M.diagonal()
    d = diag.size
    scale = float(np.max(np.abs(diag))) if d else 0.0
    if d < 2:
        return SpectrumInfo(diag, float("inf"), scale, float("inf"), None, sep_tol)
    gaps = np.abs(diag[:, None] - diag[None, :])
    gaps[np.diag_indices(d)] = np.inf
    flat = int(np.argmin(gaps))
    i, j = divmod(flat, d)
    min_sep = float(gaps[i, j])
    return SpectrumInfo(
        diag, min_sep, scale, min_sep / max(scale, 1.0), (min(i, j), max(i, j)), sep_tol
    )


def validate_simple_spectrum(M, sep_tol=DEFAULT_SEP_TOL):
    """Check that the diagonal of ``M`` is simple with relative gap above ``sep_tol``.

    Raises DegenerateSpectrum naming the closest pair otherwise.
    """
    if sep_tol < 0:
        raise ValueError("sep_tol must be nonnegative")
    info = spectrum_info(M, sep_tol)
    if not info.relative_separation > sep_tol:
        raise DegenerateSpectrum(info.closest_pair, info.min_separation, info.gap_threshold)
    return info


def as_dense(D):
    D = _as_scalar_array(D)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {D.shape}")
    return D


def from_dense(D, zero_tol=0.0, orientation="lower"):
    """Pack a dense triangular matrix.

    ``orientation="upper"`` packs the transpose and sets the transposed flag,
    so that ``f(D) = f(D.T).T`` can be restored on output.
    """
    D = as_dense(D)
    if orientation == "upper":
        D = D.T
    elif orientation != "lower":
        raise ValueError(f"orientation must be 'lower' or 'upper', got {orientation!r}")
    upper = np.abs(np.triu(D, 1))
    if upper.size and upper.max() > zero_tol:
        i, j = np.unravel_index(int(np.argmax(upper)), upper.shape)
        position = (j, i) if orientation == "upper" else (i, j)
        raise NotTriangular(upper[i, j], position)
    return LowerTriangular(D.shape[0], D[np.tril_indices(D.shape[0])], orientation == "upper")


def dense_from(M):
    return M.to_dense()


def dense_multiply(A, B):
    A = as_dense(A)
    B = as_dense(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    return A @ B


def row_sums(M):
    return np.array([M.row(i).sum() for i in range(M.dim)])


def has_zero_row_sums(M, tol=1e-12):
    """True when every row of ``M`` sums to zero within ``tol``.

    In lower-triangular form the first row is then zero as well.
    """
    sums = row_sums(M)
    if not np.all(np.abs(sums) <= tol):
        return False
    assert abs(M[0, 0]) <= tol
    return True
