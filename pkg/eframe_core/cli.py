"""Command-line front end.

    eframe analyze --config cfg.json --out report.json
    eframe verify  --theorems thm3,ab --config cfg.json --out report.json --csv bounds.csv
    eframe gen     --spec spec.yaml --out matrix.json

Global flags: --seed <u64> overrides the config seed, --tol <real> overrides rel_tol
(analyze and verify only; gen rejects it).
Exit codes: 2 config/usage error, 1 any verifier failed, 0 otherwise.
"""
from __future__ import annotations
import argparse
import logging
from pathlib import Path
from typing import List, Optional, Sequence

from . import config as cfgmod
from .errors import BadSpecError, ConfigError, DegenerateDrawError
from .generators import gen_matrix
from .logger import append_run_log, progress_logger, setup_logging
from .models import U64_MAX, ExperimentConfig
from .runner import resolve_verifiers, run_campaign
from .storage import write_bounds_csv, write_json_report, write_matrix

log = logging.getLogger("eframe_core.cli")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
USAGE_ERRORS = (ConfigError, BadSpecError, DegenerateDrawError, OSError)


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _global_flags(default=argparse.SUPPRESS) -> argparse.ArgumentParser:
    # parents share action objects, so every parser gets its own copy
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=default, help="override the config seed")
    common.add_argument("--tol", type=float, default=default, help="override tolerances.rel_tol")
    common.add_argument("-v", "--verbose", action="store_true",
                        default=False if default is None else default)
    return common


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand; the subcommand's
    # copies are SUPPRESSed so they never overwrite a value given up front
    p = argparse.ArgumentParser(
        prog="eframe",
        description="E-frame analysis and theorem verification",
        parents=[_global_flags(default=None)],
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[_global_flags()], help="optimal bounds and operator identities per trial")
    a.add_argument("--config", required=True, type=Path)
    a.add_argument("--out", required=True, type=Path)

    v = sub.add_parser("verify", parents=[_global_flags()], help="run theorem verifiers over a campaign")
    v.add_argument("--theorems", default=None, help="comma-separated verifier names (default: config.theorems)")
    v.add_argument("--config", required=True, type=Path)
    v.add_argument("--out", required=True, type=Path)
    v.add_argument("--csv", default=None, type=Path)

    g = sub.add_parser("gen", parents=[_global_flags()], help="generate one matrix mapping from a YAML/JSON spec")
    g.add_argument("--spec", required=True, type=Path)
    g.add_argument("--out", required=True, type=Path)
    return p


def _usage_error(command: str, e: Exception) -> int:
    log.error("%s: %s", command, e)
    append_run_log(cfgmod.RUN_LOG, command=command, status="error", message=str(e))
    return EXIT_USAGE


def _load(config_path: Path, seed: Optional[int], tol: Optional[float]) -> ExperimentConfig:
    cfg = cfgmod.load_config(config_path)
    return cfgmod.with_overrides(cfg, seed=seed, rel_tol=tol)


def _campaign(
    command: str,
    cfg: ExperimentConfig,
    names: List[str],
    config_path: Path,
    out_path: Path,
    csv_path: Optional[Path] = None,
) -> int:
    result = run_campaign(cfg, names, progress=progress_logger(log))
    write_json_report(out_path, command, cfg, result.reports, result.summary)
    if csv_path is not None:
        write_bounds_csv(csv_path, result.reports)
    c = result.summary.counts
    log.info("%s: %d pass, %d fail, %d skip -> %s", command, c["pass"], c["fail"], c["skip"], out_path)
    code = EXIT_FAIL if result.any_failed else EXIT_OK
    append_run_log(
        cfgmod.RUN_LOG,
        command=command,
        config=str(config_path),
        seed=cfg.seed,
        trials=cfg.trials,
        verifiers=",".join(names),
        n_pass=c["pass"],
        n_fail=c["fail"],
        n_skip=c["skip"],
        status="fail" if code == EXIT_FAIL else "ok",
        message="",
        out_path=str(out_path),
        wall_time_ms=result.summary.wall_time_ms,
    )
    return code


def run_analyze(config_path: Path, out_path: Path, seed: Optional[int] = None, tol: Optional[float] = None) -> int:
    """Optimal-bounds report for every trial of the config."""
    try:
        cfg = _load(config_path, seed, tol)
        return _campaign("analyze", cfg, ["optimal"], config_path, out_path)
    except USAGE_ERRORS as e:
        return _usage_error("analyze", e)


def run_verify(
    theorem_names: Optional[Sequence[str]],
    config_path: Path,
    out_path: Path,
    csv_path: Optional[Path] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
) -> int:
    """Named verifiers on every trial; None takes the names from config.theorems."""
    try:
        cfg = _load(config_path, seed, tol)
        names = resolve_verifiers(theorem_names if theorem_names is not None else cfg.theorems)
        return _campaign("verify", cfg, names, config_path, out_path, csv_path)
    except USAGE_ERRORS as e:
        return _usage_error("verify", e)


def run_gen(spec_path: Path, out_path: Path, seed: Optional[int] = None) -> int:
    try:
        job = cfgmod.load_gen_job(Path(spec_path).read_bytes())
        seed = seed if seed is not None else job.seed
        E = gen_matrix(job.matrix, job.n, seed, tol=cfgmod.DEFAULT_TOLERANCES)
        write_matrix(out_path, job.matrix.kind, E)
    except USAGE_ERRORS as e:
        return _usage_error("gen", e)
    log.info("gen: %s n=%d invertible=%s -> %s", job.matrix.kind, job.n, E.invertible, out_path)
    append_run_log(
        cfgmod.RUN_LOG, command="gen", config=str(spec_path), seed=seed,
        status="ok", message=job.matrix.kind, out_path=str(out_path),
    )
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return int(e.code or 0)
    setup_logging(args.verbose)

    if args.command == "analyze":
        return run_analyze(args.config, args.out, seed=args.seed, tol=args.tol)
    if args.command == "verify":
        names = args.theorems.split(",") if args.theorems is not None else None
        return run_verify(names, args.config, args.out, csv_path=args.csv, seed=args.seed, tol=args.tol)
    if args.tol is not None:
        return _usage_error("gen", ValueError("--tol does not apply to gen"))
    return run_gen(args.spec, args.out, seed=args.seed)
