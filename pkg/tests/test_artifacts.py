import numpy as np
import pytest
from filelock import FileLock

from maglev.core import artifacts
from maglev.core.artifacts import (
    format_value,
    member_dir,
    output_lock,
    read_metrics,
    read_trace_csv,
    write_metrics,
    write_table,
    write_trace_csv,
)
from maglev.exceptions import ArtifactLockError, DomainError


@pytest.mark.parametrize("value, text", [
    (0.1, "0.1"), (np.float64(1 / 3), repr(1 / 3)), (True, "true"), (False, "false"),
    (None, "undefined"), (np.int64(3), "3"), ("ok", "ok"),
])
def test_format_value(value, text):
    assert format_value(value) == text


def test_trace_with_aux_channels_reads_back(trace_of, tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    trace = trace_of(t, np.sin(t) / 3.0, ym=np.cos(t) / 7.0, t0=t ** 2)
    path = write_trace_csv(trace, tmp_path / "sub" / "trace.csv")
    assert path.read_text().splitlines()[0] == "t,r,e,u,y,ym,t0"
    back = read_trace_csv(path)
    assert back.channel_names() == trace.channel_names()
    for name in trace.channel_names():
        assert np.array_equal(back.channel(name), trace.channel(name))


def test_trace_header_is_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,y\n0.0,1.0\n")
    with pytest.raises(DomainError):
        read_trace_csv(path)


def test_metrics_file(tmp_path):
    path = write_metrics({"status": "ok", "rise_time": 0.25, "settling_time": None, "zero_final": False},
                         tmp_path / "metrics.txt")
    assert path.read_text() == "status=ok\nrise_time=0.25\nsettling_time=not_settled\nzero_final=false\n"
    assert read_metrics(path)["settling_time"] == "not_settled"


def test_table_files(tmp_path):
    rows = [{"controller": "PID", "status": "ok", "rise_time": 0.5},
            {"controller": "MRAS_long_name", "status": "divergence"}]
    csv_path, txt_path = write_table(rows, ("controller", "status", "rise_time"), tmp_path, "comparison")
    assert csv_path.read_text() == "controller,status,rise_time\nPID,ok,0.5\nMRAS_long_name,divergence,undefined\n"
    lines = txt_path.read_text().splitlines()
    assert lines[0].index("status") == lines[1].index("ok") == lines[2].index("divergence")


def test_table_waits_for_lock(tmp_path, monkeypatch):
    monkeypatch.setattr(artifacts, "LOCK_TIMEOUT", 0.1)
    holder = FileLock(str(output_lock(tmp_path).lock_file))
    with holder:
        with pytest.raises(ArtifactLockError):
            write_table([{"a": 1}], ("a",), tmp_path, "t")
    assert not (tmp_path / "t.csv").exists()


def test_member_dir_names():
    assert member_dir("out", 2, "+10y").name == "02__10y"
    assert member_dir("out", 11, "PID").name == "11_PID"
