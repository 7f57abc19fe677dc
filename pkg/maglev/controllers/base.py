from abc import ABC, abstractmethod
from typing import Any, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict


class ControllerSpecBase(BaseModel):
    """
    Fields every controller entry in a config shares.

    output_sign multiplies the control law's output. The maglev plant has a
    negative DC gain, so laws written for positive-gain plants need -1 there.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: Optional[str] = None
    output_sign: Literal[1, -1] = 1


class Controller(ABC):
    """Step-wise control law. State is an explicit value, never kept on the instance."""

    kind = "controller"
    aux_channels: Tuple[str, ...] = ()

    def __init__(self, spec: ControllerSpecBase):
        self.spec = spec
        self.sign = float(spec.output_sign)

    @property
    def label(self) -> str:
        return self.spec.name or self.kind

    @abstractmethod
    def initial_state(self) -> Any:
        ...

    @abstractmethod
    def law(self, state: Any, r: float, y: float, dt: float) -> Tuple[float, Any]:
        ...

    def step(self, state: Any, r: float, y: float, dt: float) -> Tuple[float, Any]:
        u, state = self.law(state, r, y, dt)
        return self.sign * u, state

    def aux(self, state: Any) -> Tuple[float, ...]:
        return ()


class OpenLoopSpec(ControllerSpecBase):
    """Controller-absent run: u is held at `u` plus a fraction of the plant's operating input."""
    kind: Literal["open_loop"] = "open_loop"
    u: float = 0.0
    perturbation: float = 0.0


class OpenLoopController(Controller):
    kind = "open_loop"

    def __init__(self, spec: OpenLoopSpec, operating_input: float = 0.0):
        super().__init__(spec)
        self.value = spec.u + spec.perturbation * operating_input

    def initial_state(self) -> None:
        return None

    def law(self, state, r, y, dt):
        return self.value, state
