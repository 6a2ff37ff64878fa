"""Seeded generators for frames, orthonormal bases and matrix mappings.

Every generator is a pure function of its arguments: no global RNG state.
Seeds are expanded with splitmix64 (derive_seed), so trial t of a campaign
with seed s draws from derive_seed(s, t) and each purpose inside a trial
adds its own salt, e.g. derive_seed(derive_seed(s, t), "matrix").
"""
from __future__ import annotations
import hashlib
from typing import Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import BadSpecError, DegenerateDrawError
from .hilbert import MatrixMap, VectorSequence, gram_matrix, symmetrize
from .models import (
    DenseSpec,
    DiagonalSpec,
    ExplicitFrameSpec,
    GramSpec,
    IdentitySpec,
    ParsevalFrameSpec,
    RandomFrameSpec,
    RandomHSSpec,
    StandardFrameSpec,
    Tolerances,
)
from .utils import to_array

MASK64 = (1 << 64) - 1
MAX_RETRIES = 8


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _salt(s: Union[int, str]) -> int:
    if isinstance(s, str):
        return int.from_bytes(hashlib.sha256(s.encode("utf-8")).digest()[:8], "little")
    return int(s) & MASK64


def derive_seed(seed: int, *salts: Union[int, str]) -> int:
    z = splitmix64(int(seed) & MASK64)
    for s in salts:
        z = splitmix64(z ^ _salt(s))
    return z


def seeded_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & MASK64)


def random_complex(rng: np.random.Generator, shape) -> NDArray:
    """Independent uniform real and imaginary parts in [-1, 1]."""
    re = rng.uniform(-1.0, 1.0, shape)
    im = rng.uniform(-1.0, 1.0, shape)
    return re + 1j * im


def _random_unitary(rng: np.random.Generator, n: int, tol: Tolerances) -> Optional[NDArray]:
    q, r = linalg.qr(random_complex(rng, (n, n)))
    d = np.abs(np.diagonal(r))
    if d.min() <= tol.rank_tol * d.max():
        return None
    # fix the column phases so the factorization is unique
    return q * (np.diagonal(r) / d)


def _frame_extremes(vectors: NDArray) -> Tuple[float, float]:
    s = symmetrize(vectors.T @ vectors.conj())
    w = linalg.eigvalsh(s)
    return float(w[0]), float(w[-1])


def gen_random_frame(
    d: int,
    n: int,
    seed: int,
    jitter: float = 0.1,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VectorSequence:
    """N vectors spanning C^d: d columns of a random N x N unitary plus uniform jitter."""
    if d < 1 or n < d:
        raise BadSpecError(f"a frame for C^{d} needs at least d >= 1 vectors (got N={n})")
    for attempt in range(MAX_RETRIES):
        rng = seeded_rng(derive_seed(seed, "frame", attempt))
        u = _random_unitary(rng, n, tol)
        if u is None:
            continue
        vectors = u[:, :d]
        if jitter:
            vectors = vectors + jitter * random_complex(rng, (n, d))
        lo, hi = _frame_extremes(vectors)
        if lo > tol.rank_tol * max(1.0, hi):
            return VectorSequence(vectors)
    raise DegenerateDrawError(f"no spanning draw for d={d}, N={n}, seed={seed} after {MAX_RETRIES} attempts")


def gen_onb(d: int, seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> VectorSequence:
    if d < 1:
        raise BadSpecError("dimension must be >= 1")
    for attempt in range(MAX_RETRIES):
        u = _random_unitary(seeded_rng(derive_seed(seed, "onb", attempt)), d, tol)
        if u is not None:
            return VectorSequence(u.T)
    raise DegenerateDrawError(f"no full-rank draw for d={d}, seed={seed} after {MAX_RETRIES} attempts")


def gen_riesz_basis(d: int, seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> VectorSequence:
    """d linearly independent (generally non-orthogonal) vectors of C^d."""
    return gen_random_frame(d, d, derive_seed(seed, "riesz"), jitter=0.5, tol=tol)


def gen_diagonal_values(n: int, seed: int) -> NDArray:
    """n nonzero complex scalars with moduli in [0.5, 0.5 + sqrt(2)]."""
    z = random_complex(seeded_rng(derive_seed(seed, "diagonal")), (n,))
    mags = np.abs(z)
    mags[mags == 0] = 1.0
    return z / mags * (0.5 + mags)


def gen_frame(spec, d: int, n: int, seed: int, tol: Tolerances = DEFAULT_TOLERANCES) -> VectorSequence:
    if isinstance(spec, RandomFrameSpec):
        return gen_random_frame(d, n, seed, jitter=spec.jitter, tol=tol)
    if isinstance(spec, ParsevalFrameSpec):
        return gen_random_frame(d, n, seed, jitter=0.0, tol=tol)
    if isinstance(spec, StandardFrameSpec):
        return VectorSequence(np.eye(d)[np.arange(n) % d])
    if isinstance(spec, ExplicitFrameSpec):
        seq = VectorSequence(to_array(spec.vectors))
        if seq.n != n or seq.dim != d:
            raise BadSpecError(f"explicit frame has shape ({seq.n}, {seq.dim}), expected ({n}, {d})")
        return seq
    raise BadSpecError(f"unknown frame generator {spec!r}")


def gen_matrix(spec, n: int, seed: Optional[int] = None, tol: Tolerances = DEFAULT_TOLERANCES) -> MatrixMap:
    """Deterministic N x N matrix mapping for a generator spec.

    A seed stored in the spec wins over the seed argument.
    """
    s = getattr(spec, "seed", None)
    s = s if s is not None else (seed or 0)

    if isinstance(spec, IdentitySpec):
        return MatrixMap.identity(n, rank_tol=tol.rank_tol)

    if isinstance(spec, DiagonalSpec):
        if spec.entries is not None:
            values = to_array(spec.entries)
            if values.shape[0] != n:
                raise BadSpecError(f"diagonal has {values.shape[0]} entries, expected {n}")
        else:
            values = gen_diagonal_values(n, s)
        if spec.invertible and np.any(np.abs(values) == 0):
            raise BadSpecError("diagonal entries must be nonzero when invertible is requested")
        E = MatrixMap.diagonal(values, rank_tol=tol.rank_tol)
        if spec.invertible and not E.invertible:
            raise BadSpecError("diagonal entries are numerically zero relative to the largest one")
        return E

    if isinstance(spec, GramSpec):
        if spec.vectors is not None:
            seq = VectorSequence(to_array(spec.vectors))
            if seq.n != n:
                raise BadSpecError(f"gram spec lists {seq.n} vectors, expected {n}")
        else:
            seq = gen_riesz_basis(n, s, tol=tol)
        return MatrixMap(gram_matrix(seq), rank_tol=tol.rank_tol)

    if isinstance(spec, RandomHSSpec):
        # |E_{n,k}| <= rho^(n+k) with 1-based indices
        idx = np.arange(1, n + 1)
        profile = spec.rho ** (idx[:, None] + idx[None, :])
        for attempt in range(MAX_RETRIES):
            rng = seeded_rng(derive_seed(s, "randomhs", attempt))
            w = random_complex(rng, (n, n)) / np.sqrt(2.0)
            E = MatrixMap(w * profile, rank_tol=tol.rank_tol)
            if E.invertible or not spec.invertible:
                return E
        raise DegenerateDrawError(f"no invertible Hilbert-Schmidt draw for n={n}, seed={s}")

    if isinstance(spec, DenseSpec):
        entries = to_array(spec.entries)
        if entries.shape != (n, n):
            raise BadSpecError(f"dense entries have shape {entries.shape}, expected ({n}, {n})")
        return MatrixMap(entries, rank_tol=tol.rank_tol)

    raise BadSpecError(f"unknown matrix generator {spec!r}")
