from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence
import logging
import time

from . import config as cfgmod
from .errors import ConfigValidationError, DegenerateDrawError, EFrameError
from .frames import EFrameSystem, analyze_system, dual_reconstruction_check
from .generators import derive_seed, gen_diagonal_values, gen_frame, gen_matrix, gen_onb, gen_riesz_basis
from .hilbert import MatrixMap, VectorSequence
from .models import VERIFIER_NAMES, CampaignSummary, ExperimentConfig, VerifierReport
from .theorems import (
    ab_theorem_verify,
    bessel_identity_verify,
    decomposition_check,
    diagonal_corollary_verify,
    eonb_verify,
    gram_corollary_verify,
    theorem3_verify,
    three_unitary_decomposition,
)
from .utils import inputs_digest

log = logging.getLogger(__name__)

Progress = Optional[Callable[[dict], None]]


@dataclass(frozen=True, eq=False)
class Trial:
    """Inputs drawn for one trial; every verifier of the trial sees the same frame and E."""
    index: int
    seed: int
    cfg: ExperimentConfig
    frame: Optional[VectorSequence] = None
    E: Optional[MatrixMap] = None
    draw_error: Optional[str] = None

    @property
    def tol(self):
        return self.cfg.tolerances

    @property
    def square(self) -> bool:
        return self.cfg.len == self.cfg.dim

    def salt(self, purpose: str) -> int:
        return derive_seed(self.seed, purpose)

    def system(self) -> EFrameSystem:
        return EFrameSystem(self.frame, self.E)

    def digest(self) -> str:
        if self.frame is None or self.E is None:
            return inputs_digest(seed=self.seed)
        return inputs_digest(self.frame.vectors, self.E.entries)


def draw_trial(cfg: ExperimentConfig, index: int) -> Trial:
    """Frame and matrix mapping for trial `index`, from derive_seed(cfg.seed, index)."""
    seed = derive_seed(cfg.seed, index)
    tol = cfg.tolerances
    try:
        frame = gen_frame(cfg.frame, cfg.dim, cfg.len, derive_seed(seed, "frame"), tol=tol)
        E = gen_matrix(cfg.matrix, cfg.len, derive_seed(seed, "matrix"), tol=tol)
    except DegenerateDrawError as e:
        return Trial(index=index, seed=seed, cfg=cfg, draw_error=str(e))
    return Trial(index=index, seed=seed, cfg=cfg, frame=frame, E=E)


# ── Verifiers: Trial -> VerifierReport ───────────────────────────────────────

def _thm3(t: Trial) -> VerifierReport:
    return theorem3_verify(t.frame, t.E, t.tol).to_report()


def _diag(t: Trial) -> VerifierReport:
    # the trial's E when it is diagonal, otherwise a fresh nonzero diagonal
    if t.E.is_diagonal:
        lambdas = t.E.entries.diagonal()
    else:
        lambdas = gen_diagonal_values(t.cfg.len, t.salt("diag"))
    return diagonal_corollary_verify(lambdas, t.frame, t.tol)


def _gram(t: Trial) -> VerifierReport:
    riesz = t.frame if t.square else gen_riesz_basis(t.cfg.dim, t.salt("riesz"), tol=t.tol)
    return gram_corollary_verify(riesz, t.tol)


def _bessel(t: Trial) -> VerifierReport:
    return bessel_identity_verify(t.frame, t.E, t.cfg.samples, t.salt("bessel"), t.tol)


def _ab(t: Trial) -> VerifierReport:
    return ab_theorem_verify(t.frame, t.E, t.tol).to_report()


def _eonb(t: Trial) -> VerifierReport:
    onb = gen_onb(t.cfg.dim, t.salt("onb"), tol=t.tol)
    return eonb_verify(onb, t.E, t.cfg.samples, t.salt("expand"), t.tol)


def _decomp(t: Trial) -> VerifierReport:
    sys = t.system()
    result = three_unitary_decomposition(sys, t.cfg.epsilon, t.tol)
    return decomposition_check(sys, result, t.tol)


def _dual(t: Trial) -> VerifierReport:
    return dual_reconstruction_check(t.system(), t.cfg.samples, t.salt("dual"), t.tol)


def _optimal(t: Trial) -> VerifierReport:
    return analyze_system(t.system(), t.tol, t.cfg.samples, t.salt("analyze"))


VERIFIERS: Dict[str, Callable[[Trial], VerifierReport]] = {
    "thm3": _thm3,
    "diag": _diag,
    "gram": _gram,
    "bessel-id": _bessel,
    "ab": _ab,
    "eonb": _eonb,
    "decomp": _decomp,
    "dual": _dual,
    "optimal": _optimal,
}

# verifiers defined only for N == d
SQUARE_ONLY = {"eonb", "decomp"}


def resolve_verifiers(names: Sequence[str]) -> List[str]:
    """Validate and de-duplicate verifier names, keeping their given order."""
    out: List[str] = []
    for raw in names:
        name = raw.strip()
        if not name:
            continue
        if name not in VERIFIER_NAMES:
            raise ConfigValidationError("theorems", f"unknown verifier '{name}' (expected one of {', '.join(VERIFIER_NAMES)})")
        if name not in out:
            out.append(name)
    if not out:
        raise ConfigValidationError("theorems", "no verifiers selected")
    return out


def run_verifier(name: str, trial: Trial) -> VerifierReport:
    """One verifier on one trial; precondition errors on the drawn inputs become skips."""
    if trial.draw_error is not None:
        report = VerifierReport.skipped(name, trial.digest(), trial.draw_error)
    elif name in SQUARE_ONLY and not trial.square:
        report = VerifierReport.skipped(name, trial.digest(), "requires len == dim")
    else:
        try:
            report = VERIFIERS[name](trial)
        except EFrameError as e:
            report = VerifierReport.skipped(name, trial.digest(), f"{type(e).__name__}: {e}")
    return report.model_copy(update={"trial": trial.index})


def _run_trial(cfg: ExperimentConfig, index: int, names: Sequence[str], progress: Progress) -> List[VerifierReport]:
    if progress:
        progress({"event": "trial_start", "trial": index})
    trial = draw_trial(cfg, index)
    reports = []
    for name in names:
        r = run_verifier(name, trial)
        reports.append(r)
        if progress:
            progress({"event": "report", "trial": index, "verifier": name, "status": r.status,
                      "failed": list(r.failed), "skip_reason": r.skip_reason})
    if progress:
        progress({"event": "trial_done", "trial": index, "reports": len(reports)})
    return reports


@dataclass(frozen=True)
class CampaignResult:
    reports: List[VerifierReport]
    summary: CampaignSummary

    @property
    def any_failed(self) -> bool:
        return self.summary.counts.get("fail", 0) > 0


def run_campaign(
    cfg: ExperimentConfig,
    names: Sequence[str],
    workers: Optional[int] = None,
    progress: Progress = None,
) -> CampaignResult:
    """Run every named verifier on every trial.

    Trials run on a thread pool; reports come back ordered by trial index and
    then by the order of `names`, whatever the completion order.
    """
    names = list(names)
    unknown = [n for n in names if n not in VERIFIERS]
    if unknown:
        raise ConfigValidationError("theorems", f"unknown verifier '{unknown[0]}'")
    n_workers = workers or cfg.workers or cfgmod.WORKERS
    log.debug("campaign: %d trials x %s on %d worker(s)", cfg.trials, names, n_workers)

    start = time.perf_counter()
    indices = range(cfg.trials)
    if n_workers <= 1:
        per_trial = [_run_trial(cfg, i, names, progress) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            per_trial = list(pool.map(lambda i: _run_trial(cfg, i, names, progress), indices))
    wall_ms = int(round((time.perf_counter() - start) * 1000))

    reports = [r for rs in per_trial for r in rs]
    summary = CampaignSummary.from_reports(cfg.model_dump(mode="json"), reports, wall_time_ms=wall_ms)
    return CampaignResult(reports=reports, summary=summary)
