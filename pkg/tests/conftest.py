import logging
import textwrap
from pathlib import Path

import numpy as np
import pytest

from maglev.core.plant import MaglevParams
from maglev.core.trace import SimTrace

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(autouse=True)
def isolated_env(tmp_path, monkeypatch):
    """No log file, and error dumps / default outputs inside the test's tmp dir."""
    monkeypatch.setenv("MAGLEV_LOG_FILE", "")
    monkeypatch.setenv("MAGLEV_ERROR_DIR", str(tmp_path / "log_error"))
    monkeypatch.setenv("MAGLEV_OUT_DIR", str(tmp_path / "out"))
    yield
    # CLI runs attach handlers to streams that close with the runner
    logging.getLogger("maglev_sim").handlers.clear()


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "config.yaml") -> Path:
        path = tmp_path / name
        path.write_text(textwrap.dedent(text))
        return path
    return _write


@pytest.fixture
def nominal() -> MaglevParams:
    return MaglevParams.nominal()


@pytest.fixture
def matched() -> MaglevParams:
    return MaglevParams.pole_matched()


@pytest.fixture
def trace_of():
    """SimTrace with r = 1 and e = r - y from sampled times and outputs."""
    def _make(t, y, **aux) -> SimTrace:
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.ones_like(t)
        return SimTrace(t, r, r - y, np.zeros_like(t), y, {k: np.asarray(v, dtype=float) for k, v in aux.items()})
    return _make
