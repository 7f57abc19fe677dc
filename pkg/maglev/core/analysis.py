"""
Step-response metrics, pole-based stability verdicts, root locus and the
force-current curve of the magnet.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from maglev.core.numcore import TransferFunction, poly_roots, sort_roots
from maglev.core.plant import MaglevParams, magnetic_force
from maglev.core.trace import SimTrace
from maglev.exceptions import DomainError

logger = logging.getLogger("maglev_sim")

STABILITY_MARGIN = 1e-9
ZERO_FINAL_TOL = 1e-12


@dataclass(frozen=True)
class StepMetrics:
    """
    rise_time is None when the high threshold is never reached; settling_time
    is None when the response has not settled by the end of the trace.
    With zero_final set, overshoot and the settling band are measured against
    the peak-to-peak width instead of the final value.
    """

    rise_time: Optional[float]
    settling_time: Optional[float]
    percent_overshoot: float
    steady_state_value: float
    max_overshoot: float
    zero_final: bool = False

    @property
    def settled(self) -> bool:
        return self.settling_time is not None

    def as_dict(self) -> dict:
        return {
            "rise_time": self.rise_time,
            "settling_time": self.settling_time,
            "percent_overshoot": self.percent_overshoot,
            "steady_state_value": self.steady_state_value,
            "max_overshoot": self.max_overshoot,
            "zero_final": self.zero_final,
        }


def _first_crossing(t: np.ndarray, y: np.ndarray, level: float) -> Optional[float]:
    above = np.nonzero(y >= level)[0]
    if len(above) == 0:
        return None
    k = int(above[0])
    if k == 0:
        return float(t[0])
    y0, y1 = y[k - 1], y[k]
    return float(t[k - 1] + (level - y0) / (y1 - y0) * (t[k] - t[k - 1]))


def _settling(t: np.ndarray, dev: np.ndarray, width: float) -> Optional[float]:
    """Time of the last entry into |dev| <= width, measured from t[0]."""
    outside = np.nonzero(dev > width)[0]
    if len(outside) == 0:
        return 0.0
    k = int(outside[-1])
    if k == len(t) - 1:
        return None
    d0, d1 = dev[k], dev[k + 1]
    frac = (d0 - width) / (d0 - d1) if d0 != d1 else 1.0
    return float(t[k] + frac * (t[k + 1] - t[k]) - t[0])


def step_metrics(trace: SimTrace, channel: str = "y", band: float = 0.02,
                 rise_low: float = 0.1, rise_high: float = 0.9,
                 final_window: float = 0.05) -> StepMetrics:
    """
    Step metrics of one channel, baseline 0. Threshold crossings are linearly
    interpolated between samples; the steady-state value is the mean of the
    final `final_window` fraction of the trace.
    """
    if not 0.0 < band < 0.5:
        raise DomainError(f"settling band must be within (0, 50)%, got {band * 100:g}%")
    if not 0.0 <= rise_low < rise_high <= 1.0:
        raise DomainError(f"rise thresholds must satisfy 0 <= low < high <= 1, got ({rise_low}, {rise_high})")
    y = np.asarray(trace.channel(channel), dtype=float)
    t = trace.t
    if len(y) < 2:
        raise DomainError(f"trace too short for step metrics ({len(y)} samples)")

    final = float(np.mean(y[trace.window(final_window)]))
    peak_to_peak = float(np.ptp(y))
    if abs(final) <= ZERO_FINAL_TOL * max(1.0, float(np.max(np.abs(y)))):
        dev = np.abs(y - final)
        width = band * peak_to_peak
        overshoot = float(np.max(dev))
        pct = 100.0 * overshoot / peak_to_peak if peak_to_peak > 0 else 0.0
        settling = _settling(t, dev, width) if peak_to_peak > 0 else 0.0
        return StepMetrics(None, settling, pct, final, overshoot, zero_final=True)

    sign = 1.0 if final > 0 else -1.0
    ys = sign * y
    fs = sign * final
    t_low = _first_crossing(t, ys, rise_low * fs)
    t_high = _first_crossing(t, ys, rise_high * fs)
    rise = None if t_low is None or t_high is None else max(t_high - t_low, 0.0)
    # a trace still rising at the end peaks at its last sample, not above it
    overshoot = max(float(np.max(ys)) - max(fs, float(ys[-1])), 0.0)
    settling = _settling(t, np.abs(ys - fs), band * fs)

    if rise is not None and rise > 0 and t[-1] - t[0] < 10 * rise:
        logger.warning(f"Trace spans {t[-1] - t[0]:.4g} s, less than 10x its rise time {rise:.4g} s; "
                       f"steady-state value may be biased.")
    return StepMetrics(rise, settling, 100.0 * overshoot / fs, final, overshoot)


@dataclass(frozen=True, eq=False)
class StabilityReport:
    stable: bool
    poles: np.ndarray
    unstable_poles: np.ndarray

    @property
    def verdict(self) -> str:
        return "stable" if self.stable else "unstable"


def is_stable(g: TransferFunction) -> StabilityReport:
    """Stable iff every pole has real part below -1e-9 (marginal poles fail)."""
    poles = sort_roots(g.poles())
    offending = poles[poles.real >= -STABILITY_MARGIN]
    return StabilityReport(len(offending) == 0, poles, offending)


@dataclass(frozen=True, eq=False)
class RootLocusData:
    """branches[j, b] is branch b at gains[j]."""

    gains: np.ndarray
    branches: np.ndarray

    @property
    def branch_count(self) -> int:
        return self.branches.shape[1]


def _match(prev: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Greedy nearest-neighbour pairing of `roots` onto the order of `prev`."""
    out = np.empty_like(prev)
    free = list(range(len(roots)))
    # closest pairs first, so an isolated branch is never robbed by a distant one
    pairs = sorted(
        ((abs(prev[i] - roots[j]), i, j) for i in range(len(prev)) for j in range(len(roots))),
        key=lambda p: p[0],
    )
    taken = set()
    for _, i, j in pairs:
        if i in taken or j not in free:
            continue
        out[i] = roots[j]
        taken.add(i)
        free.remove(j)
    return out


def root_locus(g: TransferFunction, gains: Sequence[float]) -> RootLocusData:
    gains = np.asarray(gains, dtype=float)
    if len(gains) == 0 or np.any(gains <= 0) or np.any(np.diff(gains) <= 0):
        raise DomainError("root-locus gains must be strictly positive and ascending")
    n = g.denominator.degree
    rows = []
    prev = None
    for k in gains:
        roots = poly_roots(g.closed_loop_characteristic(float(k))) if n > 0 else np.array([], dtype=complex)
        if len(roots) != n:
            raise DomainError(f"closed-loop degree drops to {len(roots)} at K={k:g}; locus undefined there")
        roots = roots if prev is None else _match(prev, roots)
        rows.append(roots)
        prev = roots
    return RootLocusData(gains, np.array(rows, dtype=complex).reshape(len(gains), n))


def locus_gains(g: TransferFunction, samples: int = 400, decades: float = 6.0) -> np.ndarray:
    """Geometric gain grid scaled to the coefficient magnitudes of g."""
    if g.numerator.is_zero:
        raise DomainError("root locus of a zero-gain plant")
    scale = float(np.max(np.abs(g.denominator.coefficients)) / np.max(np.abs(g.numerator.coefficients)))
    return np.geomspace(scale * 10 ** -decades, scale * 10 ** (decades / 3), samples)


def force_current_curve(p: MaglevParams, z_fixed: float,
                        i_grid: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    i = np.asarray(i_grid, dtype=float)
    f = np.array([magnetic_force(float(x), z_fixed, p) for x in i])
    return i, f
