"""Verifiers for the E-frame results: classical frames become E-frames under
invertible Hilbert-Schmidt maps (and the diagonal / Gram special cases), the
Bessel identity, the (a, b) diagonal-dominance bounds, E-orthonormal bases and
the three-E-orthonormal-basis decomposition."""
from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import (
    BadEpsilonError,
    DimensionMismatchError,
    NotOrthonormalError,
    NotRieszBasisError,
    ShapeMismatchError,
    SingularMatrixError,
    ZeroDiagonalError,
)
from .frames import (
    EFrameSystem,
    analysis,
    frame_spectrum,
    optimal_frame_bounds,
    require_frame,
)
from .generators import random_complex, seeded_rng
from .hilbert import (
    ArrayLike,
    MatrixMap,
    Vector,
    VectorSequence,
    as_vector,
    gram_matrix,
    hermitian_sqrt,
    op_norm,
    polar_decompose,
    symmetrize,
    unitarity_residual,
)
from .models import FrameBounds, Provenance, Tolerances, VerifierReport
from .utils import inputs_digest

Check = Tuple[float, float]


def _sandwich_checks(predicted: FrameBounds, lo: float, hi: float, tol: Tolerances) -> Dict[str, Check]:
    # slack rel_tol * lambda_max on both sides
    scale = hi if hi > 0 else 1.0
    return {
        "lower_gap": (max(0.0, predicted.lower - lo) / scale, tol.rel_tol),
        "upper_gap": (max(0.0, hi - predicted.upper) / scale, tol.rel_tol),
    }


def _relative_gaps(predicted: FrameBounds, lo: float, hi: float) -> Dict[str, float]:
    """Excess of each predicted bound relative to the bound it is compared with."""
    return {
        "lower_rel_gap": max(0.0, predicted.lower - lo) / lo if lo > 0 else 0.0,
        "upper_rel_gap": max(0.0, hi - predicted.upper) / predicted.upper if predicted.upper > 0 else 0.0,
    }


class Theorem3Report(BaseModel):
    model_config = ConfigDict(frozen=True)

    inputs_digest: str
    classical_bounds: FrameBounds
    E_norm: float
    C: float
    predicted: FrameBounds
    optimal: FrameBounds
    residuals: Dict[str, float]
    tolerances: Dict[str, float]
    relative_gaps: Dict[str, float]
    passed: bool

    def to_report(self, verifier: str = "thm3", extra: Optional[Dict[str, Check]] = None) -> VerifierReport:
        checks = {k: (self.residuals[k], self.tolerances[k]) for k in self.residuals}
        checks.update(extra or {})
        return VerifierReport.from_checks(
            verifier,
            self.inputs_digest,
            checks,
            predicted=self.predicted,
            optimal=self.optimal,
            details={
                "A": self.classical_bounds.lower,
                "B": self.classical_bounds.upper,
                "C": self.C,
                "E_norm": self.E_norm,
                **self.relative_gaps,
            },
        )


def _classical_bounds(frame: VectorSequence, tol: Tolerances) -> FrameBounds:
    return require_frame(EFrameSystem.classical(frame, rank_tol=tol.rank_tol), tol)


def _theorem3(
    frame: VectorSequence,
    E: MatrixMap,
    C: float,
    norm: float,
    provenance: Provenance,
    tol: Tolerances,
) -> Theorem3Report:
    classical = _classical_bounds(frame, tol)
    if not E.invertible:
        raise SingularMatrixError("the matrix mapping must be invertible")
    sys = EFrameSystem(frame, E)
    optimal = require_frame(sys, tol)
    predicted = FrameBounds(lower=C * classical.lower, upper=norm**2 * classical.upper, provenance=provenance)
    checks = _sandwich_checks(predicted, optimal.lower, optimal.upper, tol)
    return Theorem3Report(
        inputs_digest=sys.digest(),
        classical_bounds=classical,
        E_norm=norm,
        C=C,
        predicted=predicted,
        optimal=optimal,
        residuals={k: r for k, (r, _) in checks.items()},
        tolerances={k: t for k, (_, t) in checks.items()},
        relative_gaps=_relative_gaps(predicted, optimal.lower, optimal.upper),
        passed=all(r <= t for r, t in checks.values()),
    )


def theorem3_verify(frame: VectorSequence, E: MatrixMap, tol: Tolerances = DEFAULT_TOLERANCES) -> Theorem3Report:
    """A frame with bounds (A, B) is an E-frame with bounds (C A, ||E||^2 B), C = sigma_min(E)^2."""
    s = E.spectral
    return _theorem3(frame, E, s.sigma_min**2, s.sigma_max, "theorem3", tol)


def diagonal_corollary_verify(
    lambdas: ArrayLike,
    frame: VectorSequence,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VerifierReport:
    lam = as_vector(lambdas)
    mags = np.abs(lam)
    if np.any(mags <= tol.rank_tol):
        raise ZeroDiagonalError("diagonal entries must stay away from zero")
    E = MatrixMap.diagonal(lam, rank_tol=tol.rank_tol)
    lam_max = float(mags.max())
    thm = _theorem3(frame, E, float(mags.min()) ** 2, lam_max, "diagonal", tol)
    norm_gap = abs(E.spectral.sigma_max - lam_max) / lam_max
    return thm.to_report("diag", extra={"norm_gap": (norm_gap, tol.rel_tol)})


def gram_corollary_verify(riesz: VectorSequence, tol: Tolerances = DEFAULT_TOLERANCES) -> VerifierReport:
    """A Riesz basis is an E-frame for its own Gram matrix E_{j,k} = <f_k, f_j>."""
    if riesz.n != riesz.dim:
        raise NotRieszBasisError(f"a Riesz basis of C^{riesz.dim} has exactly {riesz.dim} vectors, got {riesz.n}")
    E = MatrixMap(gram_matrix(riesz), rank_tol=tol.rank_tol)
    if not E.invertible:
        raise NotRieszBasisError("vectors are numerically dependent (Gram matrix is singular)")
    thm = theorem3_verify(riesz, E, tol)
    hermitian = float(np.max(np.abs(E.entries - E.entries.conj().T))) / max(E.norm, 1.0)
    return thm.to_report("gram", extra={"gram_hermitian": (hermitian, tol.rel_tol)})


def bessel_identity_verify(
    seq: VectorSequence,
    E: MatrixMap,
    trials: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VerifierReport:
    """sum_n |<f, (E{f})_n>|^2 = ||E-bar {<f, f_k>}||^2 for sampled f."""
    sys = EFrameSystem(seq, E)
    classical = EFrameSystem.classical(seq, rank_tol=tol.rank_tol)
    e_bar = E.conj().entries
    lo, hi = frame_spectrum(sys)
    rng = seeded_rng(seed)
    gap = 0.0
    ratio = 0.0
    for _ in range(trials):
        f = random_complex(rng, (seq.dim,))
        lhs = float(np.sum(np.abs(analysis(sys, f)) ** 2))
        rhs = float(np.sum(np.abs(e_bar @ analysis(classical, f)) ** 2))
        denom = max(lhs, rhs)
        if denom > 0:
            gap = max(gap, abs(lhs - rhs) / denom)
        ratio = max(ratio, lhs / float(np.vdot(f, f).real))
    bessel_excess = max(0.0, ratio - hi) / hi if hi > 0 else ratio
    return VerifierReport.from_checks(
        "bessel-id",
        inputs_digest(seq.vectors, E.entries, trials=trials, seed=seed),
        {"identity_gap": (gap, tol.rel_tol), "bessel_bound": (bessel_excess, tol.rel_tol)},
        details={"sampled_max_ratio": ratio, "lambda_max": hi, "lambda_min": lo},
    )


def ab_bounds(E: MatrixMap) -> Tuple[float, float]:
    """Column-wise Gershgorin data of G = E*E, G_{j,k} = sum_n E_{n,k} conj(E_{n,j}).

    b = max_k sum_j |G_{j,k}|, a = min_k (G_{k,k} - sum_{j != k} |G_{j,k}|).
    """
    a_ = E.entries
    g = a_.conj().T @ a_
    absg = np.abs(g)
    diag = np.real(np.diagonal(g))
    off = absg.sum(axis=0) - np.abs(np.diagonal(g))
    b = float(absg.sum(axis=0).max())
    a = float((diag - off).min())
    return a, b


class ABReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    inputs_digest: str
    a: float
    b: float
    applicable: bool
    classical_bounds: FrameBounds
    predicted: Optional[FrameBounds] = None
    optimal: Optional[FrameBounds] = None
    residuals: Dict[str, float]
    tolerances: Dict[str, float]
    passed: bool

    def to_report(self) -> VerifierReport:
        checks = {k: (self.residuals[k], self.tolerances[k]) for k in self.residuals}
        details = {"a": self.a, "b": self.b, "A": self.classical_bounds.lower, "B": self.classical_bounds.upper}
        report = VerifierReport.from_checks(
            "ab", self.inputs_digest, checks, predicted=self.predicted, optimal=self.optimal, details=details
        )
        if not self.applicable and report.passed:
            return report.model_copy(update={"passed": False, "skip_reason": "a<=0 not applicable"})
        return report


def ab_theorem_verify(frame: VectorSequence, E: MatrixMap, tol: Tolerances = DEFAULT_TOLERANCES) -> ABReport:
    classical = _classical_bounds(frame, tol)
    a, b = ab_bounds(E)
    w = linalg.eigvalsh(symmetrize(E.entries.conj().T @ E.entries))
    scale = b if b > 0 else 1.0
    # Gershgorin containment holds whether or not a > 0
    checks: Dict[str, Check] = {
        "gershgorin_lower": (max(0.0, a - float(w[0])) / scale, tol.rel_tol),
        "gershgorin_upper": (max(0.0, float(w[-1]) - b) / scale, tol.rel_tol),
    }
    sys = EFrameSystem(frame, E)
    bounds = optimal_frame_bounds(sys, tol)
    optimal = bounds if isinstance(bounds, FrameBounds) and E.invertible else None
    applicable = a > 0
    predicted = None
    if applicable:
        predicted = FrameBounds(lower=a * classical.lower, upper=b * classical.upper, provenance="ab")
        lo, hi = frame_spectrum(sys)
        checks.update(_sandwich_checks(predicted, lo, hi, tol))
    return ABReport(
        inputs_digest=sys.digest(),
        a=a,
        b=b,
        applicable=applicable,
        classical_bounds=classical,
        predicted=predicted,
        optimal=optimal,
        residuals={k: r for k, (r, _) in checks.items()},
        tolerances={k: t for k, (_, t) in checks.items()},
        passed=all(r <= t for r, t in checks.values()),
    )


# ── E-orthonormal bases ──────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class EONB:
    raw: VectorSequence
    E: MatrixMap
    transformed: VectorSequence = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "transformed", self.E.apply(self.raw))

    def residual(self) -> float:
        """max_{n,k} |<h_n, h_k> - delta_{n,k}|."""
        h = self.transformed.vectors
        g = h.conj() @ h.T
        return float(np.max(np.abs(g - np.eye(h.shape[0]))))


def e_onb_from_onb(onb: VectorSequence, E: MatrixMap, tol: Tolerances = DEFAULT_TOLERANCES) -> EONB:
    """E^-1{e_k} is an E-orthonormal basis whenever {e_k} is an orthonormal basis."""
    if onb.n != onb.dim:
        raise NotOrthonormalError(f"an orthonormal basis of C^{onb.dim} has exactly {onb.dim} vectors, got {onb.n}")
    g = gram_matrix(onb)
    if np.max(np.abs(g - np.eye(onb.n))) > tol.orthonorm_tol:
        raise NotOrthonormalError("input vectors are not orthonormal")
    if E.size != onb.n:
        raise DimensionMismatchError(f"E is {E.size}x{E.size} but the basis has {onb.n} vectors")
    return EONB(E.inverse().apply(onb), E)


def e_onb_check(eonb: EONB, tol: Tolerances = DEFAULT_TOLERANCES) -> VerifierReport:
    h = eonb.transformed
    return VerifierReport.from_checks(
        "eonb",
        inputs_digest(eonb.raw.vectors, eonb.E.entries),
        {
            "orthonormality": (eonb.residual(), tol.orthonorm_tol),
            "basis_length": (float(abs(h.n - h.dim)), 0.0),
        },
    )


def expansion_coefficients(eonb: EONB, f: ArrayLike) -> Vector:
    """c_m(f) = <f, (E{g})_m>."""
    v = as_vector(f)
    if v.shape[0] != eonb.transformed.dim:
        raise DimensionMismatchError(f"expected a vector of C^{eonb.transformed.dim}, got length {v.shape[0]}")
    return eonb.transformed.vectors.conj() @ v


def expand(eonb: EONB, c: ArrayLike) -> Vector:
    """sum_m c_m (E{g})_m."""
    coeffs = as_vector(c)
    if coeffs.shape[0] != eonb.transformed.n:
        raise DimensionMismatchError(f"expected {eonb.transformed.n} coefficients, got {coeffs.shape[0]}")
    return eonb.transformed.vectors.T @ coeffs


def eonb_verify(
    onb: VectorSequence,
    E: MatrixMap,
    samples: int = 20,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VerifierReport:
    """Construct E^-1{e_k}, check E-orthonormality, then expansion and Parseval on sampled f."""
    eonb = e_onb_from_onb(onb, E, tol)
    rng = seeded_rng(seed)
    recon = 0.0
    parseval = 0.0
    for _ in range(samples):
        f = random_complex(rng, (onb.dim,))
        c = expansion_coefficients(eonb, f)
        nf = float(np.linalg.norm(f))
        recon = max(recon, float(np.linalg.norm(f - expand(eonb, c))) / nf)
        parseval = max(parseval, abs(float(np.linalg.norm(c)) - nf) / nf)
    base = e_onb_check(eonb, tol)
    checks = {k: (base.residuals[k], base.tolerances[k]) for k in base.residuals}
    checks["reconstruction"] = (recon, tol.rel_tol)
    checks["parseval"] = (parseval, tol.rel_tol)
    return VerifierReport.from_checks(
        "eonb", inputs_digest(onb.vectors, E.entries, samples=samples, seed=seed), checks
    )


# ── Three E-orthonormal bases ────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class DecompositionResult:
    epsilon: float
    T: NDArray
    D: NDArray
    V: NDArray
    W: NDArray
    P: NDArray
    scale: float
    g: EONB
    bases: Tuple[EONB, EONB, EONB]

    @property
    def t_norm(self) -> float:
        return self.scale * (1.0 - self.epsilon)

    def combined(self) -> NDArray:
        """scale * (E{g1} + E{g2} + E{g3}) as an (N, d) array."""
        return self.scale * sum(b.transformed.vectors for b in self.bases)


def three_unitary_decomposition(
    sys: EFrameSystem,
    epsilon: float,
    tol: Tolerances = DEFAULT_TOLERANCES,
    onb: Optional[VectorSequence] = None,
) -> DecompositionResult:
    """E{f} = ||T|| / (1 - eps) * (E{g1} + E{g2} + E{g3}) with three E-orthonormal bases.

    T = T_E phi maps the n-th basis vector u_n to h_n; D = I/2 + (1-eps) T / (2||T||)
    satisfies ||I - D|| <= 1 - eps/2, its polar factors D = V P give the unitary
    W = P + i (I - P^2)^(1/2) with D = V (W + W*) / 2, and
    g1 = {V W g_k}, g2 = {V W* g_k}, g3 = {-g_k}.
    """
    if not 0 < epsilon < 1:
        raise BadEpsilonError(f"epsilon must lie in (0, 1), got {epsilon}")
    if sys.n != sys.dim:
        raise ShapeMismatchError(f"decomposition needs N == d, got N={sys.n}, d={sys.dim}")
    require_frame(sys, tol)
    d = sys.dim
    basis = onb if onb is not None else VectorSequence.standard_basis(d)
    g = e_onb_from_onb(basis, sys.E, tol)

    T = sys.synthesis_matrix @ basis.vectors.conj()
    t_norm = op_norm(T)
    eye = np.eye(d)
    D = 0.5 * eye + (1.0 - epsilon) * T / (2.0 * t_norm)
    V, P = polar_decompose(D, tol)
    Q = hermitian_sqrt(symmetrize(eye - P @ P), tol)
    W = P + 1j * Q

    bases = (
        EONB(g.raw.map_vectors(V @ W), sys.E),
        EONB(g.raw.map_vectors(V @ W.conj().T), sys.E),
        EONB(g.raw.scaled(-1.0), sys.E),
    )
    return DecompositionResult(
        epsilon=epsilon, T=T, D=D, V=V, W=W, P=P, scale=t_norm / (1.0 - epsilon), g=g, bases=bases
    )


def decomposition_check(
    sys: EFrameSystem,
    result: DecompositionResult,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> VerifierReport:
    d = sys.dim
    eye = np.eye(d)
    gap = op_norm(eye - result.D)
    d_norm = op_norm(result.D)
    split = result.V @ (result.W + result.W.conj().T) / 2.0
    h = sys.transformed.vectors
    h_max = float(np.max(np.linalg.norm(h, axis=1)))
    recon = float(np.max(np.linalg.norm(h - result.combined(), axis=1))) / (result.scale * h_max)

    checks: Dict[str, Check] = {
        "identity_gap": (max(0.0, gap - (1.0 - result.epsilon / 2.0)), tol.rel_tol),
        "factorization": (op_norm(result.D - split) / d_norm, tol.rel_tol),
        "unitary_V": (unitarity_residual(result.V), tol.orthonorm_tol),
        "unitary_W": (unitarity_residual(result.W), tol.orthonorm_tol),
        "reconstruction": (recon, tol.rel_tol),
    }
    for i, b in enumerate(result.bases, start=1):
        checks[f"eonb_{i}"] = (b.residual(), tol.orthonorm_tol)
    return VerifierReport.from_checks(
        "decomp",
        inputs_digest(sys.seq.vectors, sys.E.entries, epsilon=result.epsilon),
        checks,
        details={"scale": result.scale, "T_norm": result.t_norm, "epsilon": result.epsilon, "identity_gap_norm": gap},
    )
