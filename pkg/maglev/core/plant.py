"""
Nonlinear single-magnet EMS levitation model.

    m z'' = m g - f(i, z),        f(i, z) = C (i / z)**2
    V     = R i + L(z) di/dt (+ dL/dz z' i when motional EMF is enabled)
    L(z)  = L1 + 2 C / z
    Y     = beta z

z is the air gap measured downward from the magnet face, so a larger gap
weakens the attraction and the magnet falls further: the open loop is
unstable for every positive parameter set.
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveFloat

from maglev.core.numcore import Polynomial, StateSpace, TransferFunction, poly_mul
from maglev.exceptions import DomainError, GapCollapseError

logger = logging.getLogger("maglev_sim")

# pole locations targeted by the pole_matched preset: -R/L1 = -29, +-sqrt(Kz/m) = +-56, gain 280
MATCHED_ELECTRICAL_POLE = 29.0
MATCHED_MECHANICAL_POLE = 56.0
MATCHED_GAIN = 280.0


class MaglevParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    m: PositiveFloat = 1.0          # kg
    g: PositiveFloat = 9.81         # m/s^2
    R: PositiveFloat = 29.0         # ohm
    L1: PositiveFloat = 1.0         # H
    C: PositiveFloat = 0.035316     # N m^2 / A^2
    beta: PositiveFloat = 100.0     # V/m
    z0: PositiveFloat = 0.06        # m, present-day gap
    motional_emf: bool = False

    @classmethod
    def nominal(cls, **overrides) -> "MaglevParams":
        return cls(**overrides)

    @classmethod
    def pole_matched(cls, **overrides) -> "MaglevParams":
        """
        The set whose linearization is exactly -280/((s+29)(s+56)(s-56)).

        For this force law Kz/m = 2g/z0, so the +-56 poles pin the gap at
        2g/56^2; C is then chosen for a 1 A equilibrium and beta for the gain.
        """
        m, g = overrides.get("m", 1.0), overrides.get("g", 9.81)
        z0 = 2.0 * g / MATCHED_MECHANICAL_POLE ** 2
        # C = m g z0^2 puts the equilibrium at 1 A, where Ki = 2 m g
        base = dict(
            m=m,
            g=g,
            R=MATCHED_ELECTRICAL_POLE,
            L1=1.0,
            z0=z0,
            C=m * g * z0 ** 2,
            beta=MATCHED_GAIN * m / (2.0 * m * g),
        )
        base.update(overrides)
        return cls(**base)


PRESETS = {
    "nominal": MaglevParams.nominal,
    "pole_matched": MaglevParams.pole_matched,
}

ParamPreset = Literal["nominal", "pole_matched"]


def resolve_params(preset: str = "nominal", **overrides) -> MaglevParams:
    return PRESETS[preset](**overrides)


@dataclass(frozen=True)
class MaglevState:
    z: float      # m
    zdot: float   # m/s
    i: float      # A

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.zdot, self.i])

    @classmethod
    def from_array(cls, x) -> "MaglevState":
        return cls(float(x[0]), float(x[1]), float(x[2]))


@dataclass(frozen=True)
class LinearizedGains:
    Ki: float     # N/A
    Kz: float     # N/m


def _require_gap(z: float) -> None:
    if not z > 0:
        raise GapCollapseError(z)


def inductance(z: float, p: MaglevParams) -> float:
    _require_gap(z)
    return p.L1 + 2.0 * p.C / z


def magnetic_force(i: float, z: float, p: MaglevParams) -> float:
    """Attractive force magnitude C (i/z)^2, in newtons."""
    _require_gap(z)
    return p.C * (i / z) ** 2


def equilibrium_current(p: MaglevParams, z_eq: float) -> float:
    if not z_eq > 0:
        raise DomainError(f"equilibrium gap must be positive, got {z_eq!r}")
    return z_eq * math.sqrt(p.m * p.g / p.C)


def maglev_derivatives(x: MaglevState, V: float, p: MaglevParams) -> MaglevState:
    """Time derivative of (z, zdot, i) under coil voltage V."""
    _require_gap(x.z)
    zddot = p.g - magnetic_force(x.i, x.z, p) / p.m
    coupling = 0.0
    if p.motional_emf:
        coupling = -2.0 * p.C / x.z ** 2 * x.zdot * x.i
    di = (V - p.R * x.i - coupling) / inductance(x.z, p)
    return MaglevState(x.zdot, zddot, di)


def sensor_output(z: float, beta: float) -> float:
    return beta * z


def linearized_gains(p: MaglevParams, z_eq: float) -> LinearizedGains:
    i_eq = equilibrium_current(p, z_eq)
    return LinearizedGains(
        Ki=2.0 * p.C * i_eq / z_eq ** 2,
        Kz=2.0 * p.C * i_eq ** 2 / z_eq ** 3,
    )


def linearize(p: MaglevParams, z_eq: float) -> Tuple[LinearizedGains, TransferFunction]:
    """
    Small-signal model V -> Y at the equilibrium gap z_eq.

    The electrical factor uses the constant inductance L1, matching the
    reference plant; the 2C/z part of L(z) does not enter the small-signal model.
    """
    gains = linearized_gains(p, z_eq)
    den = poly_mul(Polynomial([p.R, p.L1]), Polynomial([-gains.Kz, 0.0, p.m]))
    num = Polynomial([-gains.Ki * p.beta])
    logger.debug(f"Linearized at z={z_eq} m: Ki={gains.Ki:.6g} N/A, Kz={gains.Kz:.6g} N/m")
    return gains, TransferFunction(num, den)


def linearize_statespace(p: MaglevParams, z_eq: float) -> StateSpace:
    """Same model in physical deviation coordinates (dz, dzdot, di), output beta dz."""
    k = linearized_gains(p, z_eq)
    A = np.array([
        [0.0, 1.0, 0.0],
        [k.Kz / p.m, 0.0, -k.Ki / p.m],
        [0.0, 0.0, -p.R / p.L1],
    ])
    B = np.array([[0.0], [0.0], [1.0 / p.L1]])
    C = np.array([[p.beta, 0.0, 0.0]])
    return StateSpace(A, B, C, np.zeros((1, 1)))


def open_loop_unstable_pole(p: MaglevParams, z_eq: float) -> float:
    return math.sqrt(linearized_gains(p, z_eq).Kz / p.m)
