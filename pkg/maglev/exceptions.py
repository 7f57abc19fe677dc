from typing import Optional


class MaglevError(Exception):
    """Base error. `kind` is machine-readable, `exit_code` is what the CLI exits with."""

    kind = "error"
    exit_code = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class DomainError(MaglevError, ValueError):
    """A precondition of a pure operation does not hold."""

    kind = "domain_error"


class GapCollapseError(DomainError):
    kind = "gap_collapse"

    def __init__(self, z: float):
        super().__init__(f"air gap collapsed (z={z!r} m)")
        self.z = z


class DivergenceError(MaglevError):
    kind = "divergence"

    def __init__(self, detail: str, step: Optional[int] = None):
        if step is not None:
            detail = f"{detail} at step {step}"
        super().__init__(detail)
        self.step = step


class NotTunableError(MaglevError):
    kind = "not_tunable"


class ConfigError(MaglevError):
    kind = "config_error"
    exit_code = 2


class SimulationFailure(MaglevError):
    """A run stopped early. Carries what was recorded up to the failure."""

    exit_code = 3

    def __init__(self, reason: str, detail: str, time: float, trace=None):
        super().__init__(detail)
        self.kind = reason
        self.time = time
        self.trace = trace


class ArtifactLockError(MaglevError):
    """Another process held the output directory's lock for too long."""

    kind = "lock_timeout"
