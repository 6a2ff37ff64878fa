# eframe_core/config.py
from __future__ import annotations
import json
import os
from pathlib import Path
from typing import Optional, Union

import yaml
from pydantic import ValidationError as PydanticValidationError

from .errors import ConfigParseError, ConfigValidationError
from .models import ExperimentConfig, GenJob, Tolerances

REPO_ROOT = Path(__file__).resolve().parents[1]


def _get_env(key: str, default: str) -> str:
    v = os.getenv(key)
    return v if v not in (None, "") else default


def _env_tolerances() -> Tolerances:
    try:
        return Tolerances(
            rel_tol=float(_get_env("EFRAME_REL_TOL", "1e-9")),
            rank_tol=float(_get_env("EFRAME_RANK_TOL", "1e-12")),
            orthonorm_tol=float(_get_env("EFRAME_ORTHONORM_TOL", "1e-8")),
        )
    except (ValueError, PydanticValidationError):
        return Tolerances()


# Process-wide defaults (env vars override the built-in values)
DEFAULT_TOLERANCES: Tolerances = _env_tolerances()
WORKERS: int = max(1, int(_get_env("EFRAME_WORKERS", "1")))
# Empty EFRAME_RUN_LOG disables the run log
RUN_LOG: Optional[Path] = (
    None if os.getenv("EFRAME_RUN_LOG") == ""
    else Path(_get_env("EFRAME_RUN_LOG", str(REPO_ROOT / "data" / "logs" / "runs.csv")))
)


def _validation_error(e: PydanticValidationError) -> ConfigValidationError:
    err = e.errors()[0]
    loc = tuple(err.get("loc", ()))
    names = [str(p) for p in loc if isinstance(p, str)]
    field = names[-1] if names else "config"
    return ConfigValidationError(field, err.get("msg", "invalid value"), loc=loc)


def parse_config(text: Union[bytes, str]) -> ExperimentConfig:
    """Parse and fully validate an experiment config (UTF-8 JSON)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ConfigParseError(f"config is not UTF-8: {e.reason}", 1, e.start + 1) from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(e.msg, e.lineno, e.colno) from e
    if not isinstance(data, dict):
        raise ConfigParseError("config must be a JSON object", 1, 1)
    # missing tolerances fall back to the env defaults
    data.setdefault("tolerances", DEFAULT_TOLERANCES.model_dump())
    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        raise _validation_error(e) from e


def load_config(path: Path) -> ExperimentConfig:
    return parse_config(Path(path).read_bytes())


def load_gen_job(text: Union[bytes, str]) -> GenJob:
    """Generator job from YAML (JSON is accepted too, being a YAML subset)."""
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else 1
        col = mark.column + 1 if mark is not None else 1
        raise ConfigParseError(str(getattr(e, "problem", e)), line, col) from e
    if not isinstance(data, dict):
        raise ConfigParseError("spec must be a mapping", 1, 1)
    try:
        return GenJob.model_validate(data)
    except PydanticValidationError as e:
        raise _validation_error(e) from e


def with_overrides(cfg: ExperimentConfig, seed: Optional[int] = None, rel_tol: Optional[float] = None) -> ExperimentConfig:
    """Apply the CLI's --seed / --tol overrides, re-validating the result."""
    data = cfg.model_dump(mode="json")
    if seed is not None:
        data["seed"] = seed
    if rel_tol is not None:
        data["tolerances"] = {**data["tolerances"], "rel_tol": rel_tol}
    try:
        return ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        raise _validation_error(e) from e
