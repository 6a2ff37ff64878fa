"""Synthesis, analysis and frame operators of a pair ({f_k}, E), with optimal
bounds, E-frame / E-Bessel predicates and the canonical dual."""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy import linalg, optimize

from .config import DEFAULT_TOLERANCES
from .errors import DimensionMismatchError, NotAFrameError
from .generators import random_complex, seeded_rng
from .hilbert import (
    ArrayLike,
    MatrixMap,
    Vector,
    VectorSequence,
    apply_matrix_mapping,
    as_vector,
    hs_bound_check,
    op_norm,
    row_column_norms,
    symmetrize,
)
from .models import FrameBounds, Tolerances, VerifierReport
from .utils import inputs_digest


@dataclass(frozen=True)
class NotAFrame:
    """Result (not an error): the lower frame inequality fails numerically."""
    lower: float
    upper: float
    reason: str = "smallest eigenvalue of the frame operator is not positive"


@dataclass(frozen=True, eq=False)
class EFrameSystem:
    seq: VectorSequence
    E: MatrixMap
    transformed: VectorSequence = field(init=False)
    frame_op: NDArray = field(init=False)

    def __post_init__(self):
        h = apply_matrix_mapping(self.E, self.seq)
        t = h.vectors.T
        s = symmetrize(t @ t.conj().T)
        s.setflags(write=False)
        object.__setattr__(self, "transformed", h)
        object.__setattr__(self, "frame_op", s)

    @classmethod
    def classical(cls, seq: VectorSequence, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "EFrameSystem":
        """The ordinary frame {f_k} (E = identity)."""
        return cls(seq, MatrixMap.identity(seq.n, rank_tol=rank_tol))

    @property
    def dim(self) -> int:
        return self.seq.dim

    @property
    def n(self) -> int:
        return self.seq.n

    @property
    def synthesis_matrix(self) -> NDArray:
        """d x N matrix whose n-th column is h_n = (E{f})_n."""
        return self.transformed.vectors.T

    def digest(self) -> str:
        return inputs_digest(self.seq.vectors, self.E.entries)


def synthesis(sys: EFrameSystem, c: ArrayLike) -> Vector:
    """T_E c = sum_n c_n h_n."""
    coeffs = as_vector(c)
    if coeffs.shape[0] != sys.n:
        raise DimensionMismatchError(f"expected {sys.n} coefficients, got {coeffs.shape[0]}")
    return sys.synthesis_matrix @ coeffs


def analysis(sys: EFrameSystem, f: ArrayLike) -> Vector:
    """T_E* f = {<f, h_n>}_n."""
    v = as_vector(f)
    if v.shape[0] != sys.dim:
        raise DimensionMismatchError(f"expected a vector of C^{sys.dim}, got length {v.shape[0]}")
    return sys.transformed.vectors.conj() @ v


def frame_operator(sys: EFrameSystem) -> NDArray:
    return sys.frame_op


def frame_spectrum(sys: EFrameSystem) -> Tuple[float, float]:
    w = linalg.eigvalsh(sys.frame_op)
    return float(w[0]), float(w[-1])


def optimal_frame_bounds(sys: EFrameSystem, tol: Tolerances = DEFAULT_TOLERANCES) -> Union[FrameBounds, NotAFrame]:
    lo, hi = frame_spectrum(sys)
    if not (hi > 0 and lo > tol.rank_tol * hi):
        return NotAFrame(lower=lo, upper=hi)
    return FrameBounds(lower=lo, upper=hi, provenance="optimal")


def require_frame(sys: EFrameSystem, tol: Tolerances = DEFAULT_TOLERANCES) -> FrameBounds:
    bounds = optimal_frame_bounds(sys, tol)
    if isinstance(bounds, NotAFrame):
        raise NotAFrameError(f"{bounds.reason} (lambda_min={bounds.lower:.3e}, lambda_max={bounds.upper:.3e})")
    return bounds


def _excess(value: float, bound: float) -> float:
    """Relative amount by which value exceeds bound (0 when it does not)."""
    if bound > 0:
        return max(0.0, (value - bound) / bound)
    return max(0.0, value)


def is_e_frame(sys: EFrameSystem, claimed: FrameBounds, tol: Tolerances = DEFAULT_TOLERANCES) -> VerifierReport:
    if claimed.lower is None or not claimed.lower > 0:
        raise ValueError("claimed bounds need a positive lower bound")
    lo, hi = frame_spectrum(sys)
    checks = {
        "lower_excess": (_excess(claimed.lower, lo) if lo > 0 else 1.0, tol.rel_tol),
        "upper_excess": (_excess(hi, claimed.upper), tol.rel_tol),
    }
    optimal = optimal_frame_bounds(sys, tol)
    return VerifierReport.from_checks(
        "e-frame",
        sys.digest(),
        checks,
        predicted=claimed,
        optimal=optimal if isinstance(optimal, FrameBounds) else None,
        details={"lambda_min": lo, "lambda_max": hi},
    )


def is_e_bessel(sys: EFrameSystem, bound: float, tol: Tolerances = DEFAULT_TOLERANCES) -> VerifierReport:
    """Upper inequality only; equivalently ||T_E|| <= sqrt(B)."""
    lo, hi = frame_spectrum(sys)
    t_norm = op_norm(sys.synthesis_matrix)
    checks = {
        "upper_excess": (_excess(hi, bound), tol.rel_tol),
        "synthesis_norm_excess": (_excess(t_norm, float(np.sqrt(bound))), tol.rel_tol),
    }
    return VerifierReport.from_checks(
        "e-bessel",
        sys.digest(),
        checks,
        predicted=FrameBounds(upper=bound, provenance="lemma1"),
        details={"lambda_max": hi, "synthesis_norm": t_norm},
    )


def lemma1_bessel_bound(seq: VectorSequence) -> FrameBounds:
    """Every element of the direct sum is Bessel with bound sum_k ||f_k||^2."""
    return FrameBounds(upper=seq.sum_sq_norms, provenance="lemma1")


def canonical_dual(sys: EFrameSystem, tol: Tolerances = DEFAULT_TOLERANCES) -> VectorSequence:
    """{S_E^-1 h_n}."""
    require_frame(sys, tol)
    dual = linalg.solve(sys.frame_op, sys.synthesis_matrix, assume_a="her")
    return VectorSequence(dual.T)


def reconstruct(sys: EFrameSystem, dual: VectorSequence, f: ArrayLike) -> Vector:
    """sum_n <f, dual_n> h_n."""
    v = as_vector(f)
    if dual.n != sys.n or dual.dim != sys.dim or v.shape[0] != sys.dim:
        raise DimensionMismatchError("dual sequence and vector must match the system shape")
    return sys.synthesis_matrix @ (dual.vectors.conj() @ v)


def dual_reconstruction_check(
    sys: EFrameSystem,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VerifierReport:
    """f = sum_n <f, S_E^-1 h_n> h_n on sampled f, and the dual's frame operator is S_E^-1."""
    dual = canonical_dual(sys, tol)
    rng = seeded_rng(seed)
    recon = 0.0
    for _ in range(samples):
        f = random_complex(rng, (sys.dim,))
        recon = max(recon, float(np.linalg.norm(f - reconstruct(sys, dual, f)) / np.linalg.norm(f)))
    t = dual.vectors.T
    s_dual = symmetrize(t @ t.conj().T)
    inv_gap = op_norm(s_dual @ sys.frame_op - np.eye(sys.dim))
    lo, hi = frame_spectrum(sys)
    return VerifierReport.from_checks(
        "dual",
        inputs_digest(sys.seq.vectors, sys.E.entries, samples=samples, seed=seed),
        {"reconstruction": (recon, tol.rel_tol), "dual_frame_operator": (inv_gap, tol.rel_tol)},
        optimal=FrameBounds(lower=lo, upper=hi, provenance="optimal"),
        details={"condition": hi / lo},
    )


def _quotient(sys: EFrameSystem, fs: NDArray) -> NDArray:
    coeffs = fs @ sys.transformed.vectors.conj().T
    return np.sum(np.abs(coeffs) ** 2, axis=1) / np.sum(np.abs(fs) ** 2, axis=1)


def _polish(sys: EFrameSystem, f0: NDArray, sign: float) -> float:
    d = f0.shape[0]
    t = sys.synthesis_matrix

    def fun(x):
        f = x[:d] + 1j * x[d:]
        nn = float(np.vdot(f, f).real)
        sf = t @ (t.conj().T @ f)
        q = float(np.vdot(f, sf).real) / nn
        g = 2.0 * (sf - q * f) / nn
        return sign * q, sign * np.concatenate([g.real, g.imag])

    x0 = np.concatenate([f0.real, f0.imag])
    res = optimize.minimize(fun, x0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 500})
    return sign * float(res.fun)


def rayleigh_oracle(sys: EFrameSystem, samples: int = 10_000, seed: int = 0, polish: bool = True) -> Tuple[float, float]:
    """Min/max of sum_n |<f, h_n>|^2 / ||f||^2 over random f, independent of the eigensolver.

    Sampling locates the basins; a quasi-Newton polish of the same quotient
    closes the gap that pure sampling leaves in higher dimensions.
    """
    rng = seeded_rng(seed)
    fs = random_complex(rng, (samples, sys.dim))
    fs = fs[np.linalg.norm(fs, axis=1) > 0]
    q = _quotient(sys, fs)
    i_min, i_max = int(np.argmin(q)), int(np.argmax(q))
    q_min, q_max = float(q[i_min]), float(q[i_max])
    if polish:
        q_min = min(q_min, _polish(sys, fs[i_min], 1.0))
        q_max = max(q_max, _polish(sys, fs[i_max], -1.0))
    return q_min, q_max


def analyze_system(
    sys: EFrameSystem,
    tol: Tolerances = DEFAULT_TOLERANCES,
    samples: int = 20,
    seed: int = 0,
) -> VerifierReport:
    """Optimal bounds plus the sampled operator identities of the finite model."""
    rng = seeded_rng(seed)
    lo, hi = frame_spectrum(sys)
    bounds = optimal_frame_bounds(sys, tol)
    lemma1 = lemma1_bessel_bound(sys.seq)
    classical = EFrameSystem.classical(sys.seq, rank_tol=tol.rank_tol)
    scale = max(hi, np.finfo(float).tiny)

    adj = 0.0
    opt = 0.0
    bessel = 0.0
    for _ in range(samples):
        c = random_complex(rng, (sys.n,))
        f = random_complex(rng, (sys.dim,))
        lhs = np.vdot(f, synthesis(sys, c))          # <T c, f>
        rhs = np.vdot(analysis(sys, f), c)           # <c, T* f>
        adj = max(adj, abs(lhs - rhs) / (np.linalg.norm(c) * np.linalg.norm(f)))
        q = float(np.sum(np.abs(analysis(sys, f)) ** 2) / np.vdot(f, f).real)
        opt = max(opt, (lo - q) / scale, (q - hi) / scale)
        raw = float(np.sum(np.abs(analysis(classical, f)) ** 2))
        bound = lemma1.upper * float(np.vdot(f, f).real)
        bessel = max(bessel, _excess(raw, bound))

    # S_E assembled column by column through synthesis(analysis(e_i))
    eye = np.eye(sys.dim)
    s_cols = np.column_stack([synthesis(sys, analysis(sys, eye[:, i])) for i in range(sys.dim)])
    frame_identity = float(np.max(np.abs(s_cols - sys.frame_op))) / scale

    spec = sys.E.spectral
    rows, cols = row_column_norms(sys.E)
    mapped, hs_rhs = hs_bound_check(sys.E, sys.seq)

    checks = {
        "adjointness": (adj, tol.rel_tol),
        "frame_operator_identity": (frame_identity, tol.rel_tol),
        "optimality": (max(0.0, opt), tol.rel_tol),
        "lemma1_bessel": (bessel, tol.rel_tol),
        "hs_bound": (_excess(spec.sigma_max, spec.hs_norm), tol.rel_tol),
        "row_column_bound": (_excess(float(max(rows.max(), cols.max())), spec.sigma_max), tol.rel_tol),
        "direct_sum_bound": (_excess(mapped, hs_rhs), tol.rel_tol),
        "frame_lower": (0.0 if isinstance(bounds, FrameBounds) else 1.0, 0.0),
    }
    return VerifierReport.from_checks(
        "optimal",
        sys.digest(),
        checks,
        predicted=lemma1,
        optimal=bounds if isinstance(bounds, FrameBounds) else None,
        details={
            "lambda_min": lo,
            "lambda_max": hi,
            "E_norm": spec.sigma_max,
            "E_sigma_min": spec.sigma_min,
            "E_hs_norm": spec.hs_norm,
            "lemma1_upper": lemma1.upper,
        },
    )
