"""
Fixed-step closed-loop simulation.

Per sample k: read y_k from the plant, e_k = r_k - y_k, run the controller,
record, then advance the plant over [t_k, t_k + dt] with u_k held (zero-order hold).
"""
import logging
from typing import Callable, Dict, Tuple

import numpy as np

from maglev.controllers import build_controller
from maglev.core.numcore import StateSpace, TransferFunction, tf_to_statespace
from maglev.core.plant import (
    MaglevParams,
    MaglevState,
    equilibrium_current,
    linearize,
    linearize_statespace,
    maglev_derivatives,
)
from maglev.core.scenario import (
    LinearizedPlantSpec,
    NonlinearPlantSpec,
    Scenario,
    SurrogatePlantSpec,
    TransferFunctionPlantSpec,
    reference_series,
)
from maglev.core.trace import SimTrace
from maglev.exceptions import DivergenceError, DomainError, GapCollapseError, SimulationFailure

logger = logging.getLogger("maglev_sim")


def _check_finite(x, what: str) -> None:
    if not np.all(np.isfinite(np.asarray(x, dtype=float))):
        raise DivergenceError(f"non-finite {what}")


def rk4_step(f: Callable, x, u, dt):
    """Classical Runge–Kutta step of dx/dt = f(x, u) with u held over the step."""
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    k1 = f(x, u)
    _check_finite(k1, "RK4 stage 1")
    k2 = f(x + dt / 2 * k1, u)
    _check_finite(k2, "RK4 stage 2")
    k3 = f(x + dt / 2 * k2, u)
    _check_finite(k3, "RK4 stage 3")
    k4 = f(x + dt * k3, u)
    _check_finite(k4, "RK4 stage 4")
    return x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_propagator(A: np.ndarray, B: np.ndarray, dt: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    rk4_step on dx/dt = A x + B u collapses to x' = Phi x + Gamma u with

        Phi   = I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24
        Gamma = h (I + hA/2 + (hA)^2/6 + (hA)^3/24) B
    """
    n = A.shape[0]
    eye = np.eye(n)
    hA = dt * A
    hA2 = hA @ hA
    hA3 = hA2 @ hA
    phi = eye + hA + hA2 / 2 + hA3 / 6 + hA3 @ hA / 24
    gamma = dt * (eye + hA / 2 + hA2 / 6 + hA3 / 24) @ B
    return phi, gamma


class LinearPlant:
    """LTI plant stepped with the closed-form RK4 propagator."""

    aux_channels: Tuple[str, ...] = ()
    operating_input = 0.0

    def __init__(self, ss: StateSpace, label: str = "linear"):
        self.ss = ss
        self.label = label
        self._propagators: Dict[float, Tuple[np.ndarray, np.ndarray]] = {}
        self.C = ss.C[0]
        self.D = float(ss.D[0, 0])
        self.B = ss.B[:, 0]

    def initial_state(self, override=None) -> np.ndarray:
        x = np.zeros(self.ss.order)
        if override is not None:
            if len(override) != self.ss.order:
                raise DomainError(f"initial_state needs {self.ss.order} values for {self.label}, got {len(override)}")
            x = np.asarray(override, dtype=float)
        return x

    def output(self, x: np.ndarray, u_held: float) -> float:
        return float(self.C @ x) + self.D * u_held

    def advance(self, x: np.ndarray, u: float, dt: float) -> np.ndarray:
        if dt not in self._propagators:
            phi, gamma = rk4_propagator(self.ss.A, self.ss.B, dt)
            self._propagators[dt] = (phi, gamma[:, 0])
        phi, gamma = self._propagators[dt]
        x = phi @ x + gamma * u
        _check_finite(x, f"{self.label} state")
        return x

    def aux(self, x: np.ndarray) -> Tuple[float, ...]:
        return ()

    def band_exceeded(self, x: np.ndarray, band: float) -> bool:
        return False


class NonlinearMaglevPlant:
    """
    Nonlinear maglev in deviation coordinates: input u = V - R i_eq,
    output y = beta (z - z_eq). The state itself stays absolute (z, zdot, i).
    """

    aux_channels = ("z", "i")

    def __init__(self, params: MaglevParams):
        self.p = params
        self.z_eq = params.z0
        self.i_eq = equilibrium_current(params, self.z_eq)
        self.operating_input = params.R * self.i_eq
        self.label = "nonlinear"

    def field(self, x: np.ndarray, u: float) -> np.ndarray:
        d = maglev_derivatives(MaglevState.from_array(x), self.operating_input + u, self.p)
        return d.as_array()

    def initial_state(self, override=None) -> np.ndarray:
        x = np.array([self.z_eq, 0.0, self.i_eq])
        if override is not None:
            if len(override) != 3:
                raise DomainError(f"initial_state for the nonlinear plant is (dz, dzdot, di), got {len(override)} values")
            x = x + np.asarray(override, dtype=float)
        return x

    def output(self, x: np.ndarray, u_held: float) -> float:
        return self.p.beta * (float(x[0]) - self.z_eq)

    def advance(self, x: np.ndarray, u: float, dt: float) -> np.ndarray:
        return rk4_step(self.field, x, u, dt)

    def aux(self, x: np.ndarray) -> Tuple[float, ...]:
        return float(x[0]), float(x[2])

    def band_exceeded(self, x: np.ndarray, band: float) -> bool:
        return abs(float(x[0]) - self.z_eq) > band * self.z_eq


def surrogate_statespace(a: float, b: float) -> StateSpace:
    return StateSpace(np.array([[-a]]), np.array([[b]]), np.array([[1.0]]), np.zeros((1, 1)))


def build_plant(spec):
    if isinstance(spec, NonlinearPlantSpec):
        return NonlinearMaglevPlant(spec.resolve())
    if isinstance(spec, LinearizedPlantSpec):
        p = spec.resolve()
        return LinearPlant(linearize_statespace(p, p.z0), label="linearized")
    if isinstance(spec, TransferFunctionPlantSpec):
        return LinearPlant(tf_to_statespace(spec.transfer_function()), label="transfer_function")
    if isinstance(spec, SurrogatePlantSpec):
        return LinearPlant(surrogate_statespace(spec.a, spec.b), label="surrogate")
    raise TypeError(f"unsupported plant spec {type(spec).__name__}")


def plant_transfer_function(spec) -> TransferFunction:
    """Small-signal G(s) of any plant spec (the nonlinear one is linearized at z0)."""
    if isinstance(spec, (NonlinearPlantSpec, LinearizedPlantSpec)):
        p = spec.resolve()
        return linearize(p, p.z0)[1]
    if isinstance(spec, TransferFunctionPlantSpec):
        return spec.transfer_function()
    if isinstance(spec, SurrogatePlantSpec):
        return surrogate_statespace(spec.a, spec.b).to_transfer_function()
    raise TypeError(f"unsupported plant spec {type(spec).__name__}")


def simulate(scenario: Scenario) -> SimTrace:
    """
    Run one scenario. Raises SimulationFailure (carrying the partial trace and
    failure time) on gap collapse, divergence or gap-band exit.
    """
    plant = build_plant(scenario.plant)
    controller = build_controller(scenario.controller, operating_input=plant.operating_input)
    if controller.kind == "mras" and not isinstance(scenario.plant, SurrogatePlantSpec):
        logger.warning(f"Adaptive controller is designed for the first-order surrogate; "
                       f"running it on the {plant.label} plant is an extrapolation.")
    if scenario.gap_band is not None and not isinstance(plant, NonlinearMaglevPlant):
        logger.warning("gap_band only applies to the nonlinear plant; ignoring it.")

    dt = scenario.dt
    n = scenario.samples
    t = np.arange(n) * dt
    r = reference_series(scenario.reference, t)
    y = np.empty(n)
    e = np.empty(n)
    u = np.empty(n)
    aux_names = plant.aux_channels + controller.aux_channels
    aux = np.empty((len(aux_names), n))

    x = plant.initial_state(scenario.initial_state)
    cstate = controller.initial_state()
    u_held = 0.0
    logger.info(f"Simulating {controller.label} on {plant.label} plant: {n} samples, dt={dt}")

    def partial(k: int) -> SimTrace:
        full = SimTrace(t, r, e, u, y, {name: aux[j] for j, name in enumerate(aux_names)}, dt)
        return full.truncated(k)

    for k in range(n):
        rk = float(r[k])
        yk = plant.output(x, u_held)
        ek = rk - yk
        aux_k = plant.aux(x) + controller.aux(cstate)
        try:
            uk, cstate = controller.step(cstate, rk, yk, dt)
        except DivergenceError as err:
            raise SimulationFailure(err.kind, err.detail, float(t[k]), partial(k)) from err
        y[k], e[k], u[k] = yk, ek, uk
        aux[:, k] = aux_k
        u_held = uk
        if k + 1 == n:
            break
        t_next = float(t[k + 1])
        try:
            x = plant.advance(x, uk, dt)
        except (GapCollapseError, DivergenceError) as err:
            logger.error(f"Run failed at t={t_next:.6g} s: {err.detail}")
            raise SimulationFailure(err.kind, err.detail, t_next, partial(k + 1)) from err
        if scenario.gap_band is not None and plant.band_exceeded(x, scenario.gap_band):
            detail = f"gap left the +-{scenario.gap_band:.3g} band around z_eq={plant.z_eq:.6g} m"
            logger.error(f"Run failed at t={t_next:.6g} s: {detail}")
            raise SimulationFailure("gap_band_exit", detail, t_next, partial(k + 1))

    return partial(n)
