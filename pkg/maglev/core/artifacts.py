"""
Files a run leaves behind: trace.csv, metrics.txt and the comparison / drift tables.

Floats are written with repr(), the shortest text that parses back to the same
double, so a trace read back from disk is bit-identical to the one written.
"""
import csv
import logging
import os
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np
from filelock import FileLock, Timeout

from maglev.core.trace import BASE_CHANNELS, SimTrace
from maglev.exceptions import ArtifactLockError, DomainError

logger = logging.getLogger("maglev_sim")

LOCK_NAME = ".maglev.lock"
LOCK_TIMEOUT = 300
NOT_SETTLED = "not_settled"
UNDEFINED = "undefined"

PathLike = Union[str, Path]


def output_lock(out_dir: PathLike) -> FileLock:
    """Lock serializing writes of shared files in one output directory."""
    os.makedirs(out_dir, exist_ok=True)
    return FileLock(str(Path(out_dir) / LOCK_NAME))


def format_value(v) -> str:
    if v is None:
        return UNDEFINED
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_trace_csv(trace: SimTrace, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = trace.channel_names()
    columns = [trace.channel(n) for n in names]
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(names)
        for k in range(len(trace)):
            writer.writerow([repr(float(c[k])) for c in columns])
    logger.debug(f"Wrote {len(trace)} samples to {path}")
    return path


def read_trace_csv(path: PathLike) -> SimTrace:
    path = Path(path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise DomainError(f"{path}: empty trace file")
    header = rows[0]
    if tuple(header[: len(BASE_CHANNELS)]) != BASE_CHANNELS:
        raise DomainError(f"{path}: header must start with {','.join(BASE_CHANNELS)}, got {','.join(header)}")
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float).reshape(-1, len(header))
    except ValueError as e:
        raise DomainError(f"{path}: {e}") from e
    cols = {name: data[:, j].copy() for j, name in enumerate(header)}
    aux = {name: cols[name] for name in header[len(BASE_CHANNELS):]}
    return SimTrace(cols["t"], cols["r"], cols["e"], cols["u"], cols["y"], aux)


def write_metrics(values: Mapping[str, object], path: PathLike) -> Path:
    """key=value lines in insertion order; settling None reads as not_settled."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for key, v in values.items():
        if key == "settling_time" and v is None:
            lines.append(f"{key}={NOT_SETTLED}")
        else:
            lines.append(f"{key}={format_value(v)}")
    path.write_text("\n".join(lines) + "\n")
    return path


def read_metrics(path: PathLike) -> Dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            out[key] = value
    return out


def _cell(key: str, v) -> str:
    if key == "settling_time" and v is None:
        return NOT_SETTLED
    return format_value(v)


def write_table(rows: Sequence[Mapping[str, object]], columns: Sequence[str],
                out_dir: PathLike, stem: str) -> List[Path]:
    """
    Writes <stem>.csv and an aligned <stem>.txt holding the same rows,
    under the output directory's lock.
    """
    out_dir = Path(out_dir)
    cells = [[_cell(c, row.get(c)) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[j]) for r in cells]) for j, c in enumerate(columns)]
    csv_path, txt_path = out_dir / f"{stem}.csv", out_dir / f"{stem}.txt"
    try:
        with output_lock(out_dir).acquire(timeout=LOCK_TIMEOUT):
            with open(csv_path, "w", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(columns)
                writer.writerows(cells)
            lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
            lines += ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
            txt_path.write_text("\n".join(lines) + "\n")
    except Timeout:
        logger.error(f"Output directory {out_dir} is locked by another run.")
        raise ArtifactLockError(f"output directory {out_dir} is locked by another run")
    logger.info(f"Wrote {len(rows)}-row table to {csv_path} and {txt_path}")
    return [csv_path, txt_path]


def write_lines(lines: Iterable[str], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def member_dir(out_dir: PathLike, index: int, label: str) -> Path:
    """Per-member subdirectory, prefixed by position so duplicate labels stay apart."""
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)
    return Path(out_dir) / f"{index:02d}_{safe}"
