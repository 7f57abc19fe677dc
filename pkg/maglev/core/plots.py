"""SVG figures of runs and analyses. Files only, never an interactive window."""
import logging
from pathlib import Path
from typing import Sequence, Tuple, Union

import matplotlib as mpl

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from maglev.core.analysis import RootLocusData  # noqa: E402
from maglev.core.trace import SimTrace  # noqa: E402

logger = logging.getLogger("maglev_sim")

# fixed hash salt and no date stamp keep repeated SVG output byte-identical
mpl.rcParams.update({
    "svg.hashsalt": "maglev",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "legend.fontsize": 8,
    "figure.figsize": (7.0, 4.3),
})

SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.debug(f"Saved figure {path}")
    return path


def plot_response(trace: SimTrace, path, title: str = "") -> Path:
    """y and r on top, u below."""
    fig, (ax_y, ax_u) = plt.subplots(2, 1, sharex=True)
    ax_y.plot(trace.t, trace.r, "k--", lw=0.8, label="r")
    ax_y.plot(trace.t, trace.y, lw=1.2, label="y")
    if "ym" in trace.aux:
        ax_y.plot(trace.t, trace.aux["ym"], lw=0.8, label="ym")
    ax_y.set_ylabel("output")
    ax_y.legend(loc="best")
    if title:
        ax_y.set_title(title)
    ax_u.plot(trace.t, trace.u, lw=1.0, color="tab:red")
    ax_u.set_ylabel("u")
    ax_u.set_xlabel("t [s]")
    return _save(fig, path)


def plot_comparison(traces: Sequence[Tuple[str, SimTrace]], path, title: str = "") -> Path:
    fig, ax = plt.subplots()
    if traces:
        first = traces[0][1]
        ax.plot(first.t, first.r, "k--", lw=0.8, label="reference")
    for label, trace in traces:
        ax.plot(trace.t, trace.y, lw=1.2, label=label)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("y")
    ax.legend(loc="best")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def plot_root_locus(locus: RootLocusData, open_loop_poles: np.ndarray,
                    open_loop_zeros: np.ndarray, path) -> Path:
    fig, ax = plt.subplots()
    for b in range(locus.branch_count):
        branch = locus.branches[:, b]
        ax.plot(branch.real, branch.imag, lw=1.0)
    ax.plot(open_loop_poles.real, open_loop_poles.imag, "kx", ms=8, label="open-loop poles")
    if len(open_loop_zeros):
        ax.plot(open_loop_zeros.real, open_loop_zeros.imag, "ko", mfc="none", ms=8, label="zeros")
    ax.axvline(0.0, color="k", lw=0.6)
    ax.set_xlabel("Re(s)")
    ax.set_ylabel("Im(s)")
    ax.legend(loc="best")
    return _save(fig, path)


def plot_force_current(i: np.ndarray, f: np.ndarray, z_fixed: float, path,
                       equilibrium: Tuple[float, float] = None) -> Path:
    fig, ax = plt.subplots()
    ax.plot(i, f, lw=1.2, label=f"z = {z_fixed:g} m")
    if equilibrium is not None:
        ax.plot([equilibrium[0]], [equilibrium[1]], "ko", label="equilibrium")
    ax.set_xlabel("i [A]")
    ax.set_ylabel("f [N]")
    ax.legend(loc="best")
    return _save(fig, path)
