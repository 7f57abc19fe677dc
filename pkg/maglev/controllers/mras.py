"""
Model-reference adaptive controller with the normalized MIT rule.

Plant model      dy/dt  = -a y + b u
Reference model  dym/dt = -am ym + bm uc
Control law      u = t0 uc - s0 y
Adaptation       dt0/dt = -gamma1 ym e / (alpha1 + ym^2)
                 ds0/dt =  gamma2 yf e / (alpha2 + yf^2),   yf = b/(s + am) y
with e = y - ym. The ideal gains solve bm = b t0 and am = a + b s0.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeFloat, PositiveFloat

from maglev.controllers.base import Controller, ControllerSpecBase
from maglev.core.trace import SimTrace
from maglev.exceptions import DivergenceError, DomainError

logger = logging.getLogger("maglev_sim")


class MrasConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = 0.65
    b: float = 1.0
    am: PositiveFloat = 2.0
    bm: float = 5.0
    gamma1: NonNegativeFloat = 0.5
    gamma2: NonNegativeFloat = 0.5
    alpha1: PositiveFloat = 0.1
    alpha2: PositiveFloat = 0.1
    theta0: Tuple[float, float] = (0.0, 0.0)

    def ideal_gains(self) -> Tuple[float, float]:
        """(t0*, s0*) from the matching conditions."""
        if self.b == 0:
            raise DomainError("plant gain b must be nonzero for model matching")
        return self.bm / self.b, (self.am - self.a) / self.b


@dataclass(frozen=True)
class MrasState:
    t0: float
    s0: float
    ym: float = 0.0
    filt_y: float = 0.0
    step: int = 0

    @classmethod
    def initial(cls, cfg: MrasConfig) -> "MrasState":
        return cls(t0=cfg.theta0[0], s0=cfg.theta0[1])


def mras_rates(cfg: MrasConfig, st: MrasState, e: float) -> Tuple[float, float]:
    """(dt0/dt, ds0/dt) of the normalized MIT rule."""
    dt0 = -cfg.gamma1 * st.ym * e / (cfg.alpha1 + st.ym ** 2)
    ds0 = cfg.gamma2 * st.filt_y * e / (cfg.alpha2 + st.filt_y ** 2)
    return dt0, ds0


def mras_step(cfg: MrasConfig, st: MrasState, uc: float, y: float, dt: float) -> Tuple[float, MrasState]:
    """Control from the current gains, then one explicit-Euler advance of every adaptive signal."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    e = y - st.ym
    u = st.t0 * uc - st.s0 * y
    dt0, ds0 = mras_rates(cfg, st, e)
    nxt = MrasState(
        t0=st.t0 + dt * dt0,
        s0=st.s0 + dt * ds0,
        ym=st.ym + dt * (-cfg.am * st.ym + cfg.bm * uc),
        filt_y=st.filt_y + dt * (-cfg.am * st.filt_y + cfg.b * y),
        step=st.step + 1,
    )
    if not (math.isfinite(u) and math.isfinite(nxt.t0) and math.isfinite(nxt.s0)
            and math.isfinite(nxt.ym) and math.isfinite(nxt.filt_y)):
        raise DivergenceError("adaptive state became non-finite", step=st.step)
    return u, nxt


def mras_tracking_error(trace: SimTrace, fraction: float = 0.2) -> float:
    """RMS of y - ym over the final `fraction` of the horizon."""
    if len(trace) == 0:
        raise DomainError("cannot score an empty trace")
    window = trace.window(fraction)
    diff = trace.y[window] - trace.channel("ym")[window]
    return float(np.sqrt(np.mean(diff ** 2)))


class MrasControllerSpec(ControllerSpecBase, MrasConfig):
    kind: Literal["mras"] = "mras"


class MrasController(Controller):
    kind = "mras"
    aux_channels = ("ym", "t0", "s0")

    def __init__(self, spec: MrasControllerSpec):
        super().__init__(spec)
        self.cfg = spec

    def initial_state(self) -> MrasState:
        return MrasState.initial(self.cfg)

    def law(self, state: MrasState, r: float, y: float, dt: float):
        return mras_step(self.cfg, state, r, y, dt)

    def aux(self, state: MrasState) -> Tuple[float, float, float]:
        return state.ym, state.t0, state.s0
