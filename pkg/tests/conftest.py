from __future__ import annotations
import json
from pathlib import Path

import numpy as np
import pytest

from eframe_core import config as cfgmod
from eframe_core.hilbert import MatrixMap, VectorSequence
from eframe_core.models import Tolerances

DATA = Path(__file__).resolve().parents[1] / "data"

UPPER = [[1, 1], [0, 1]]   # E = [[1,1],[0,1]], E*E = [[1,1],[1,2]]


@pytest.fixture(autouse=True)
def run_log(tmp_path, monkeypatch):
    """Keep the run log out of the repo's data/ folder."""
    path = tmp_path / "logs" / "runs.csv"
    monkeypatch.setattr(cfgmod, "RUN_LOG", path)
    return path


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def e2():
    return VectorSequence.standard_basis(2)


@pytest.fixture
def upper():
    return MatrixMap(np.array(UPPER, dtype=complex))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def write_config(tmp_path):
    def _write(data: dict, name: str = "config.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path
    return _write
