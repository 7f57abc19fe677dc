"""
PID law with filtered derivative, trapezoidal integral and conditional-integration anti-windup,
plus analytic Ziegler–Nichols ultimate-cycle identification.

    u = sat(Kp e + Ki int(e) + Kd N s/(s + N) e)
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveFloat, model_validator

from maglev.controllers.base import Controller, ControllerSpecBase
from maglev.core.numcore import TransferFunction, poly_roots
from maglev.exceptions import DomainError, NotTunableError

logger = logging.getLogger("maglev_sim")

MARGINAL_TOL = 1e-8


class PidGains(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    Kp: float = 0.0
    Ki: float = 0.0     # 1/s
    Kd: float = 0.0     # s
    N: PositiveFloat = 20.0
    u_min: float = -math.inf
    u_max: float = math.inf

    @model_validator(mode="after")
    def _bounds(self):
        if not self.u_min < self.u_max:
            raise ValueError(f"u_min ({self.u_min}) must be below u_max ({self.u_max})")
        return self


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    derivative: float = 0.0
    prev_error: Optional[float] = None


def pid_step(gains: PidGains, state: PidState, e: float, dt: float) -> Tuple[float, PidState]:
    """
    One controller update. The first call seeds the previous error with e, so a
    constant error integrates exactly and produces no derivative kick.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    prev = e if state.prev_error is None else state.prev_error

    p = gains.Kp * e
    increment = gains.Ki * dt * 0.5 * (e + prev)
    integral = state.integral + increment
    # backward-Euler discretization of Kd N s / (s + N)
    derivative = (state.derivative + gains.Kd * gains.N * (e - prev)) / (1.0 + gains.N * dt)

    raw = p + integral + derivative
    if (raw > gains.u_max and increment > 0) or (raw < gains.u_min and increment < 0):
        integral = state.integral
        raw = p + integral + derivative
    u = min(max(raw, gains.u_min), gains.u_max)
    return u, PidState(integral, derivative, e)


def zn_pid_gains(Ku: float, Tu: float, **extra) -> PidGains:
    """Classic Ziegler–Nichols table for a PID."""
    return PidGains(Kp=0.6 * Ku, Ki=1.2 * Ku / Tu, Kd=0.075 * Ku * Tu, **extra)


def _max_real(g: TransferFunction, k: float) -> float:
    return float(np.max(poly_roots(g.closed_loop_characteristic(k)).real))


def zn_ultimate_gain(g: TransferFunction, k_lo: float = None, k_hi: float = None,
                     samples: int = 600) -> Tuple[float, float]:
    """
    Gain Ku at which den + K num has a conjugate pair on the imaginary axis, and Tu = 2 pi / w.

    Scans K geometrically for a change in the sign of the largest closed-loop
    real part, then bisects. Crossings through the real axis are skipped: they
    do not oscillate.
    """
    if not g.is_strictly_proper:
        raise DomainError(f"ultimate-gain search needs a strictly proper plant, got {g!r}")
    if g.numerator.is_zero:
        raise NotTunableError("plant has zero gain")
    scale = float(np.max(np.abs(g.denominator.coefficients)) / np.max(np.abs(g.numerator.coefficients)))
    k_lo = k_lo if k_lo is not None else scale * 1e-6
    k_hi = k_hi if k_hi is not None else scale * 1e6
    grid = np.geomspace(k_lo, k_hi, samples)
    reals = [_max_real(g, k) for k in grid]

    for j in range(len(grid) - 1):
        a, b = grid[j], grid[j + 1]
        fa, fb = reals[j], reals[j + 1]
        if (fa < 0) == (fb < 0):
            continue
        for _ in range(200):
            mid = 0.5 * (a + b)
            fm = _max_real(g, mid)
            if abs(fm) < MARGINAL_TOL * 1e-2 or b - a <= 1e-15 * b:
                a = b = mid
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        ku = 0.5 * (a + b)
        roots = poly_roots(g.closed_loop_characteristic(ku))
        crossing = roots[np.argmax(roots.real)]
        if abs(crossing.real) < MARGINAL_TOL and abs(crossing.imag) > 1e-6:
            w = abs(crossing.imag)
            logger.info(f"Ultimate gain Ku={ku:.9g}, w={w:.9g} rad/s")
            return ku, 2.0 * math.pi / w
        logger.debug(f"Skipping non-oscillatory crossing near K={ku:.6g}")

    raise NotTunableError(
        f"no marginal-stability crossing with an oscillating pair for K in [{k_lo:.3g}, {k_hi:.3g}]"
    )


class PidControllerSpec(ControllerSpecBase, PidGains):
    kind: Literal["pid"] = "pid"


class PidController(Controller):
    kind = "pid"

    def __init__(self, spec: PidControllerSpec):
        super().__init__(spec)
        self.gains = spec

    def initial_state(self) -> PidState:
        return PidState()

    def law(self, state: PidState, r: float, y: float, dt: float):
        return pid_step(self.gains, state, r - y, dt)
