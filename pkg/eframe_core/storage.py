from __future__ import annotations
import json
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from .hilbert import MatrixMap
from .models import CampaignSummary, ExperimentConfig, VerifierReport
from .utils import encode_complex

BOUNDS_COLUMNS = ["trial", "verifier", "A_pred", "B_pred", "A_opt", "B_opt", "residual", "status"]


def _write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_payload(
    command: str,
    cfg: ExperimentConfig,
    reports: List[VerifierReport],
    summary: CampaignSummary,
) -> Dict[str, Any]:
    return {
        "command": command,
        "config": cfg.model_dump(mode="json"),
        "reports": [r.model_dump(mode="json", by_alias=True) for r in reports],
        "summary": summary.model_dump(mode="json"),
    }


def write_json_report(path: Path, command: str, cfg: ExperimentConfig, reports: List[VerifierReport], summary: CampaignSummary) -> None:
    _write_text(path, dumps(report_payload(command, cfg, reports, summary)))


def bounds_frame(reports: List[VerifierReport]) -> pd.DataFrame:
    """One row per report; missing bounds and residuals stay empty."""
    rows = []
    for r in reports:
        pred, opt = r.predicted, r.optimal
        rows.append({
            "trial": r.trial,
            "verifier": r.verifier,
            "A_pred": pred.lower if pred else None,
            "B_pred": pred.upper if pred else None,
            "A_opt": opt.lower if opt else None,
            "B_opt": opt.upper if opt else None,
            "residual": r.worst_residual,
            "status": r.status,
        })
    return pd.DataFrame(rows, columns=BOUNDS_COLUMNS)


def write_bounds_csv(path: Path, reports: List[VerifierReport]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = bounds_frame(reports)
    df.to_csv(path, index=False)
    return len(df)


def matrix_payload(kind: str, E: MatrixMap) -> Dict[str, Any]:
    s = E.spectral
    return {
        "kind": kind,
        "n": E.size,
        "entries": encode_complex(E.entries),
        "spectral": {"sigma_max": s.sigma_max, "sigma_min": s.sigma_min, "hs_norm": s.hs_norm},
        "invertible": E.invertible,
    }


def write_matrix(path: Path, kind: str, E: MatrixMap) -> None:
    _write_text(path, dumps(matrix_payload(kind, E)))
