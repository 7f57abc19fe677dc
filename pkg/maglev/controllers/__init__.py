from typing import Annotated, Union

from pydantic import Field

from maglev.controllers.base import Controller, OpenLoopController, OpenLoopSpec
from maglev.controllers.fuzzy import FuzzyController, FuzzyControllerSpec
from maglev.controllers.mras import MrasController, MrasControllerSpec
from maglev.controllers.pid import PidController, PidControllerSpec

ControllerSpec = Annotated[
    Union[PidControllerSpec, FuzzyControllerSpec, MrasControllerSpec, OpenLoopSpec],
    Field(discriminator="kind"),
]


def build_controller(spec, operating_input: float = 0.0) -> Controller:
    if isinstance(spec, OpenLoopSpec):
        return OpenLoopController(spec, operating_input)
    if isinstance(spec, PidControllerSpec):
        return PidController(spec)
    if isinstance(spec, FuzzyControllerSpec):
        return FuzzyController(spec)
    if isinstance(spec, MrasControllerSpec):
        return MrasController(spec)
    raise TypeError(f"unsupported controller spec {type(spec).__name__}")
