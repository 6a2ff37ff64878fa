"""Finite model of the ambient objects: H = C^d, sequences {f_k} with N terms
(zero tail), and N x N matrix mappings E acting on the sequence index."""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    NotPSDError,
    ShapeMismatchError,
    SingularInputError,
    SingularMatrixError,
)
from .models import Tolerances

Vector = NDArray[np.complex128]
ArrayLike = Union[NDArray, Sequence]


def _readonly(a: ArrayLike) -> NDArray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def as_vector(values: ArrayLike) -> Vector:
    v = _readonly(values)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {v.shape}")
    return v


def inner(u: ArrayLike, v: ArrayLike) -> complex:
    """<u, v>, linear in u and conjugate-linear in v."""
    return complex(np.vdot(v, u))


def op_norm(a: ArrayLike) -> float:
    arr = np.asarray(a)
    return float(linalg.norm(arr, 2)) if arr.size else 0.0


def symmetrize(a: ArrayLike) -> NDArray:
    arr = np.asarray(a, dtype=np.complex128)
    return (arr + arr.conj().T) / 2


def unitarity_residual(u: ArrayLike) -> float:
    arr = np.asarray(u, dtype=np.complex128)
    return float(np.max(np.abs(arr.conj().T @ arr - np.eye(arr.shape[1]))))


def _square(a: ArrayLike) -> NDArray:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ShapeMismatchError(f"expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def _is_diagonal(a: NDArray) -> bool:
    return not np.any(a - np.diag(np.diagonal(a)))


@dataclass(frozen=True, eq=False)
class VectorSequence:
    """N vectors of C^d stored as the rows of an (N, d) array."""

    vectors: NDArray
    sum_sq_norms: float = field(init=False)

    def __post_init__(self):
        arr = _readonly(self.vectors)
        if arr.ndim != 2 or 0 in arr.shape:
            raise DimensionMismatchError(f"expected N >= 1 vectors of dimension d >= 1, got shape {arr.shape}")
        object.__setattr__(self, "vectors", arr)
        object.__setattr__(self, "sum_sq_norms", float(np.sum(np.abs(arr) ** 2)))

    @classmethod
    def standard_basis(cls, d: int) -> "VectorSequence":
        return cls(np.eye(d))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def norm(self) -> float:
        """Norm in the direct sum: (sum_k ||f_k||^2)^(1/2)."""
        return float(np.sqrt(self.sum_sq_norms))

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, k: int) -> Vector:
        return self.vectors[k]

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.vectors)

    def map_vectors(self, op: ArrayLike) -> "VectorSequence":
        """Apply a d x d operator to every member: {U f_k}."""
        u = np.asarray(op, dtype=np.complex128)
        if u.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"operator shape {u.shape} does not act on C^{self.dim}")
        return VectorSequence(self.vectors @ u.T)

    def scaled(self, c: complex) -> "VectorSequence":
        return VectorSequence(c * self.vectors)


@dataclass(frozen=True)
class SpectralData:
    sigma_max: float
    sigma_min: float
    hs_norm: float


def spectral_data(E: Union["MatrixMap", ArrayLike]) -> SpectralData:
    """Extreme singular values and the Hilbert-Schmidt (Frobenius) norm."""
    a = E.entries if isinstance(E, MatrixMap) else _square(E)
    hs = float(np.linalg.norm(a))
    if _is_diagonal(a):
        mags = np.abs(np.diagonal(a))
        s_max, s_min = float(mags.max()), float(mags.min())
    else:
        s = linalg.svdvals(a)
        s_max, s_min = float(s[0]), float(s[-1])
    # rank-one rounding can push sigma_max an ulp past the Frobenius norm;
    # sigma_min follows the clamp so sigma_min <= sigma_max <= hs_norm
    s_max = min(s_max, hs)
    return SpectralData(sigma_max=s_max, sigma_min=min(s_min, s_max), hs_norm=hs)


@dataclass(frozen=True, eq=False)
class MatrixMap:
    """N x N matrix E acting on sequences by (E{f})_n = sum_k E_{n,k} f_k."""

    entries: NDArray
    rank_tol: float = DEFAULT_TOLERANCES.rank_tol
    spectral: SpectralData = field(init=False)
    invertible: bool = field(init=False)
    is_diagonal: bool = field(init=False)

    def __post_init__(self):
        arr = _square(self.entries).copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "is_diagonal", _is_diagonal(arr))
        s = spectral_data(self)
        object.__setattr__(self, "spectral", s)
        object.__setattr__(self, "invertible", bool(s.sigma_max > 0 and s.sigma_min > self.rank_tol * s.sigma_max))

    @classmethod
    def identity(cls, n: int, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "MatrixMap":
        """Kronecker delta (delta_{n,k})."""
        return cls(np.eye(n), rank_tol=rank_tol)

    @classmethod
    def diagonal(cls, values: ArrayLike, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "MatrixMap":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)), rank_tol=rank_tol)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        return self.spectral.sigma_max

    def inverse(self) -> "MatrixMap":
        if not self.invertible:
            raise SingularMatrixError(
                f"matrix mapping is not invertible (sigma_min={self.spectral.sigma_min:.3e}, "
                f"sigma_max={self.spectral.sigma_max:.3e})"
            )
        if self.is_diagonal:
            return MatrixMap.diagonal(1.0 / np.diagonal(self.entries), rank_tol=self.rank_tol)
        return MatrixMap(linalg.inv(self.entries), rank_tol=self.rank_tol)

    def conj(self) -> "MatrixMap":
        """Entrywise conjugate E-bar."""
        return MatrixMap(self.entries.conj(), rank_tol=self.rank_tol)

    def adjoint(self) -> "MatrixMap":
        return MatrixMap(self.entries.conj().T, rank_tol=self.rank_tol)

    def apply(self, seq: VectorSequence) -> VectorSequence:
        return apply_matrix_mapping(self, seq)


def apply_matrix_mapping(E: MatrixMap, seq: VectorSequence) -> VectorSequence:
    """E{f_k} = {sum_k E_{n,k} f_k}_n."""
    if seq.n != E.size:
        raise DimensionMismatchError(f"sequence has {seq.n} terms but E is {E.size}x{E.size}")
    if E.is_diagonal:
        return VectorSequence(np.diagonal(E.entries)[:, None] * seq.vectors)
    return VectorSequence(E.entries @ seq.vectors)


def gram_matrix(seq: VectorSequence) -> NDArray:
    """G_{j,k} = <f_k, f_j>."""
    return seq.vectors.conj() @ seq.vectors.T


def row_column_norms(E: MatrixMap) -> Tuple[NDArray, NDArray]:
    """l2 norms of the rows {E_{n,k}}_k and of the columns {E_{k,n}}_k = E{delta_{n,k}}."""
    a = E.entries
    return np.linalg.norm(a, axis=1), np.linalg.norm(a, axis=0)


def hs_bound_check(E: MatrixMap, seq: VectorSequence) -> Tuple[float, float]:
    """(||E{f}||, hs_norm * ||f||) in the direct-sum norm; the first never exceeds the second."""
    return apply_matrix_mapping(E, seq).norm, E.spectral.hs_norm * seq.norm


def polar_decompose(D: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[NDArray, NDArray]:
    """D = V P with V unitary and P = (D*D)^(1/2)."""
    a = _square(D)
    s = spectral_data(a)
    if not (s.sigma_max > 0 and s.sigma_min > tol.rank_tol * s.sigma_max):
        raise SingularInputError(
            f"polar factor is not unique for a singular input (sigma_min={s.sigma_min:.3e})"
        )
    v, p = linalg.polar(a, side="right")
    return v, symmetrize(p)


def hermitian_sqrt(P: ArrayLike, tol: Tolerances = DEFAULT_TOLERANCES) -> NDArray:
    """Positive square root of a Hermitian PSD matrix via its eigendecomposition."""
    a = _square(P)
    scale = op_norm(a)
    if np.max(np.abs(a - a.conj().T)) > tol.orthonorm_tol * max(1.0, scale):
        raise NotHermitianError("matrix is not Hermitian")
    w, u = linalg.eigh(symmetrize(a))
    if w.min() < -tol.rank_tol * scale:
        raise NotPSDError(f"matrix has a negative eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    return symmetrize((u * np.sqrt(w)) @ u.conj().T)
