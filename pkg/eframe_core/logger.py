from __future__ import annotations
from pathlib import Path
from typing import Callable, Optional
import logging
import sys

import pandas as pd
from datetime import datetime

RUN_LOG_COLUMNS = [
    "run_date", "run_time", "command", "config", "seed", "trials", "verifiers",
    "n_pass", "n_fail", "n_skip", "status", "message", "out_path", "wall_time_ms",
]


def setup_logging(verbose: bool = False) -> None:
    """Diagnostics go to stderr only; stdout stays free for machine output."""
    root = logging.getLogger("eframe_core")
    if not any(getattr(h, "_eframe", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s", "%H:%M:%S"))
        handler._eframe = True
        root.addHandler(handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def progress_logger(logger: logging.Logger) -> Callable[[dict], None]:
    """Runner progress callback that forwards events to `logger`."""
    def _progress(ev: dict) -> None:
        kind = ev.get("event")
        if kind == "report" and ev.get("status") == "fail":
            logger.warning("trial %s %s failed: %s", ev.get("trial"), ev.get("verifier"), ", ".join(ev.get("failed") or []))
        elif kind == "report" and ev.get("status") == "skip":
            logger.debug("trial %s %s skipped: %s", ev.get("trial"), ev.get("verifier"), ev.get("skip_reason"))
        elif kind == "trial_done":
            logger.debug("trial %s done (%s reports)", ev.get("trial"), ev.get("reports"))
    return _progress


def append_run_log(log_csv: Optional[Path], **fields) -> None:
    """Append one row to the run-log CSV; None disables logging."""
    if log_csv is None:
        return
    log_csv = Path(log_csv)
    log_csv.parent.mkdir(parents=True, exist_ok=True)
    now = datetime.now()
    fields.setdefault("run_date", now.strftime("%Y-%m-%d"))
    fields.setdefault("run_time", now.strftime("%H:%M:%S"))

    df = pd.DataFrame([fields])
    cols = [c for c in RUN_LOG_COLUMNS if c in df.columns] + [c for c in df.columns if c not in RUN_LOG_COLUMNS]
    df = df[cols]

    if log_csv.exists():
        try:
            prev = pd.read_csv(log_csv)
        except pd.errors.EmptyDataError:
            # file exists but has no header
            prev = pd.DataFrame(columns=df.columns)
    else:
        prev = pd.DataFrame(columns=df.columns)

    all_df = pd.concat([prev, df], ignore_index=True)
    all_df.to_csv(log_csv, index=False)
