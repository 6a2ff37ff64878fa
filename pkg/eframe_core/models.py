from __future__ import annotations
from pydantic import BaseModel, ConfigDict, Field, BeforeValidator, FiniteFloat, computed_field, field_validator, model_validator
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

VerifierName = Literal["thm3", "diag", "gram", "bessel-id", "ab", "eonb", "decomp", "dual"]
VERIFIER_NAMES: Tuple[str, ...] = ("thm3", "diag", "gram", "bessel-id", "ab", "eonb", "decomp", "dual")

Provenance = Literal["optimal", "theorem3", "diagonal", "ab", "lemma1"]
Status = Literal["pass", "fail", "skip"]

U64_MAX = 2**64 - 1


def _coerce_complex(v):
    # [re, im] pair, or a bare real number
    if isinstance(v, bool):
        raise ValueError("complex scalar must be [re, im] or a number")
    if isinstance(v, (int, float)):
        return (float(v), 0.0)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return (v[0], v[1])
    raise ValueError("complex scalar must be [re, im] or a number")


ComplexPair = Annotated[Tuple[FiniteFloat, FiniteFloat], BeforeValidator(_coerce_complex)]


class Tolerances(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    rel_tol: float = 1e-9
    rank_tol: float = 1e-12
    orthonorm_tol: float = 1e-8

    @field_validator("rel_tol", "rank_tol", "orthonorm_tol")
    @classmethod
    def _check_positive(cls, v):
        if not v > 0:
            raise ValueError("tolerance must be > 0")
        return v

    @field_validator("rel_tol")
    @classmethod
    def _check_rel_below_one(cls, v):
        if v >= 1:
            raise ValueError("rel_tol must be < 1")
        return v


class FrameBounds(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lower: Optional[float] = None   # None for upper-only (Bessel) bounds
    upper: float
    provenance: Provenance

    @model_validator(mode="after")
    def _check_order(self):
        if self.upper < 0:
            raise ValueError("upper bound must be >= 0")
        if self.lower is not None:
            if not self.lower > 0:
                raise ValueError("lower bound must be > 0")
            if self.lower > self.upper:
                raise ValueError("lower bound must be <= upper bound")
        return self


# ── Generator specs ──────────────────────────────────────────────────────────

class IdentitySpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["identity"] = "identity"


class DiagonalSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["diagonal"] = "diagonal"
    invertible: bool = True
    entries: Optional[List[ComplexPair]] = None   # None: seeded random nonzero draw
    seed: Optional[int] = Field(default=None, ge=0, le=U64_MAX)

    @field_validator("entries")
    @classmethod
    def _check_entries(cls, v, info):
        if v is None:
            return v
        if not v:
            raise ValueError("entries must not be empty")
        if info.data.get("invertible", True) and any(re == 0 and im == 0 for re, im in v):
            raise ValueError("entries must be nonzero when invertible is requested")
        return v


class GramSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["gram"] = "gram"
    vectors: Optional[List[List[ComplexPair]]] = None   # None: seeded random Riesz basis
    seed: Optional[int] = Field(default=None, ge=0, le=U64_MAX)


class RandomHSSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["randomhs"] = "randomhs"
    rho: float = Field(default=0.5, gt=0, lt=1)
    invertible: bool = True
    seed: Optional[int] = Field(default=None, ge=0, le=U64_MAX)


class DenseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["dense"] = "dense"
    entries: List[List[ComplexPair]]

    @field_validator("entries")
    @classmethod
    def _check_square(cls, v):
        n = len(v)
        if n == 0 or any(len(row) != n for row in v):
            raise ValueError("entries must be a non-empty square matrix (row-major)")
        return v


GenSpec = Annotated[
    Union[IdentitySpec, DiagonalSpec, GramSpec, RandomHSSpec, DenseSpec],
    Field(discriminator="kind"),
]


class RandomFrameSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["random"] = "random"
    jitter: float = Field(default=0.1, ge=0)


class ParsevalFrameSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["parseval"] = "parseval"


class StandardFrameSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["standard"] = "standard"


class ExplicitFrameSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)
    kind: Literal["explicit"] = "explicit"
    vectors: List[List[ComplexPair]]


FrameSpec = Annotated[
    Union[RandomFrameSpec, ParsevalFrameSpec, StandardFrameSpec, ExplicitFrameSpec],
    Field(discriminator="kind"),
]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    dim: int = Field(ge=1)
    len: int = Field(ge=1)
    trials: int = Field(ge=1)
    seed: int = Field(ge=0, le=U64_MAX)
    matrix: GenSpec
    frame: FrameSpec = Field(default_factory=RandomFrameSpec)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    theorems: List[VerifierName] = Field(default_factory=list)

    epsilon: float = Field(default=0.5, gt=0, lt=1)
    samples: int = Field(default=20, ge=1)
    workers: Optional[int] = Field(default=None, ge=1)   # None: EFRAME_WORKERS

    @field_validator("len")
    @classmethod
    def _check_len(cls, v, info):
        dim = info.data.get("dim")
        if dim is not None and v < dim:
            raise ValueError("len must be >= dim")
        return v

    @field_validator("frame")
    @classmethod
    def _check_explicit_shapes(cls, v, info):
        dim, n = info.data.get("dim"), info.data.get("len")
        if isinstance(v, ExplicitFrameSpec) and dim is not None and n is not None:
            if len(v.vectors) != n or any(len(vec) != dim for vec in v.vectors):
                raise ValueError("frame.vectors must hold len vectors of dimension dim")
        return v


class GenJob(BaseModel):
    """Input of the `gen` command: one matrix mapping of size n."""
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)

    n: int = Field(ge=1)
    matrix: GenSpec
    seed: int = Field(default=0, ge=0, le=U64_MAX)


# ── Reports ──────────────────────────────────────────────────────────────────

class VerifierReport(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    verifier: str
    trial: int = 0
    inputs_digest: str
    predicted: Optional[FrameBounds] = None
    optimal: Optional[FrameBounds] = None
    residuals: Dict[str, float] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)
    failed: List[str] = Field(default_factory=list)
    details: Dict[str, float] = Field(default_factory=dict)
    passed: bool = Field(default=False, alias="pass")
    skip_reason: Optional[str] = None

    @computed_field
    @property
    def status(self) -> Status:
        if self.skip_reason is not None:
            return "skip"
        return "pass" if self.passed else "fail"

    @property
    def worst_residual(self) -> Optional[float]:
        return max(self.residuals.values()) if self.residuals else None

    @classmethod
    def from_checks(
        cls,
        verifier: str,
        inputs_digest: str,
        checks: Dict[str, Tuple[float, float]],
        predicted: Optional[FrameBounds] = None,
        optimal: Optional[FrameBounds] = None,
        details: Optional[Dict[str, float]] = None,
    ) -> "VerifierReport":
        """checks maps a residual name to (residual, tolerance); pass iff every residual <= tolerance."""
        residuals = {k: float(r) for k, (r, _) in checks.items()}
        tolerances = {k: float(t) for k, (_, t) in checks.items()}
        failed = [k for k, (r, t) in checks.items() if not r <= t]
        return cls(
            verifier=verifier,
            inputs_digest=inputs_digest,
            predicted=predicted,
            optimal=optimal,
            residuals=residuals,
            tolerances=tolerances,
            failed=failed,
            details={k: float(v) for k, v in (details or {}).items()},
            passed=not failed,
        )

    @classmethod
    def skipped(cls, verifier: str, inputs_digest: str, reason: str, **extra) -> "VerifierReport":
        return cls(verifier=verifier, inputs_digest=inputs_digest, passed=False, skip_reason=reason, **extra)


class CampaignSummary(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    config: dict
    counts: Dict[Status, int]
    worst_residual: Dict[str, float]
    wall_time_ms: int = 0

    @classmethod
    def from_reports(cls, config: dict, reports: List[VerifierReport], wall_time_ms: int = 0) -> "CampaignSummary":
        counts: Dict[Status, int] = {"pass": 0, "fail": 0, "skip": 0}
        worst: Dict[str, float] = {}
        for r in reports:
            counts[r.status] += 1
            w = r.worst_residual
            if w is not None and r.status != "skip":
                worst[r.verifier] = max(worst.get(r.verifier, 0.0), w)
        return cls(config=config, counts=counts, worst_residual=dict(sorted(worst.items())), wall_time_ms=wall_time_ms)
