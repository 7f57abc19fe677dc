"""Declarative description of one closed-loop run (plant, controller, reference, timing)."""
from typing import Annotated, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator

from maglev.controllers import ControllerSpec
from maglev.core.numcore import TransferFunction
from maglev.core.plant import MaglevParams, ParamPreset, resolve_params

_FROZEN = ConfigDict(frozen=True, extra="forbid")


class _PhysicalPlantSpec(BaseModel):
    model_config = _FROZEN

    preset: ParamPreset = "nominal"
    params: Dict[str, float] = Field(default_factory=dict)
    motional_emf: bool = False

    @model_validator(mode="after")
    def _params_resolve(self):
        self.resolve()
        return self

    def resolve(self) -> MaglevParams:
        return resolve_params(self.preset, motional_emf=self.motional_emf, **self.params)

    def with_overrides(self, overrides: Dict[str, float]):
        return type(self).model_validate({**self.model_dump(), "params": {**self.params, **overrides}})


class NonlinearPlantSpec(_PhysicalPlantSpec):
    """Full nonlinear model, driven and observed in deviations from its equilibrium at z0."""
    kind: Literal["nonlinear"] = "nonlinear"


class LinearizedPlantSpec(_PhysicalPlantSpec):
    """Small-signal model at z0, states (dz, dzdot, di)."""
    kind: Literal["linearized"] = "linearized"


class TransferFunctionPlantSpec(BaseModel):
    """Explicit G(s); coefficient lists are in descending powers of s."""
    model_config = _FROZEN

    kind: Literal["transfer_function"] = "transfer_function"
    num: List[float]
    den: List[float]

    @model_validator(mode="after")
    def _proper(self):
        g = self.transfer_function()
        if not g.is_proper:
            raise ValueError("transfer function must be proper (deg num <= deg den)")
        return self

    def transfer_function(self) -> TransferFunction:
        return TransferFunction.from_descending(self.num, self.den)


class SurrogatePlantSpec(BaseModel):
    """First-order design plant b/(s + a) of the adaptive controller."""
    model_config = _FROZEN

    kind: Literal["surrogate"] = "surrogate"
    a: float = 0.65
    b: float = 1.0


PlantSpec = Annotated[
    Union[NonlinearPlantSpec, LinearizedPlantSpec, TransferFunctionPlantSpec, SurrogatePlantSpec],
    Field(discriminator="kind"),
]


class StepReference(BaseModel):
    model_config = _FROZEN

    kind: Literal["step"] = "step"
    amplitude: float = 1.0
    time: float = 0.0


class SquareReference(BaseModel):
    """Starts at +amplitude and flips every half period."""
    model_config = _FROZEN

    kind: Literal["square"] = "square"
    amplitude: float = 1.0
    period: PositiveFloat = 20.0
    offset: float = 0.0


class ConstantReference(BaseModel):
    model_config = _FROZEN

    kind: Literal["constant"] = "constant"
    value: float = 0.0


ReferenceSpec = Annotated[
    Union[StepReference, SquareReference, ConstantReference],
    Field(discriminator="kind"),
]


def reference_series(spec, t: np.ndarray) -> np.ndarray:
    if isinstance(spec, StepReference):
        return np.where(t >= spec.time, spec.amplitude, 0.0)
    if isinstance(spec, SquareReference):
        half = np.floor(t / (0.5 * spec.period)).astype(np.int64)
        return spec.offset + np.where(half % 2 == 0, spec.amplitude, -spec.amplitude)
    return np.full_like(t, spec.value, dtype=float)


class Scenario(BaseModel):
    model_config = _FROZEN

    plant: PlantSpec
    controller: ControllerSpec
    reference: ReferenceSpec = Field(default_factory=StepReference)
    dt: PositiveFloat = 1e-3
    horizon: PositiveFloat = 10.0
    initial_state: Optional[List[float]] = None
    gap_band: Optional[PositiveFloat] = None

    @model_validator(mode="after")
    def _timing(self):
        if self.horizon < self.dt:
            raise ValueError(f"horizon ({self.horizon}) must be at least dt ({self.dt})")
        return self

    @property
    def samples(self) -> int:
        return int(round(self.horizon / self.dt)) + 1
