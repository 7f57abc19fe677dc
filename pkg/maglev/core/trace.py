from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from maglev.exceptions import DomainError

BASE_CHANNELS = ("t", "r", "e", "u", "y")
SPACING_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Uniformly sampled closed-loop time series. `aux` keeps insertion order."""

    t: np.ndarray
    r: np.ndarray
    e: np.ndarray
    u: np.ndarray
    y: np.ndarray
    aux: Dict[str, np.ndarray] = field(default_factory=dict)
    dt: Optional[float] = None

    def __post_init__(self):
        n = len(self.t)
        for name in self.channel_names():
            if len(self.channel(name)) != n:
                raise DomainError(f"channel '{name}' has {len(self.channel(name))} samples, expected {n}")
        if n > 1:
            steps = np.diff(self.t)
            if np.any(steps <= 0):
                raise DomainError("trace time samples must be strictly increasing")
            if self.dt is None:
                object.__setattr__(self, "dt", float(steps[0]))
            if not np.allclose(steps, self.dt, rtol=SPACING_RTOL, atol=0.0):
                worst = float(steps[np.argmax(np.abs(steps - self.dt))])
                raise DomainError(f"trace time samples must be uniformly spaced at dt={self.dt:g} s, found a step of {worst:g} s")

    def __len__(self) -> int:
        return len(self.t)

    def channel_names(self) -> List[str]:
        return list(BASE_CHANNELS) + list(self.aux)

    def channel(self, name: str) -> np.ndarray:
        if name in BASE_CHANNELS:
            return getattr(self, name)
        if name in self.aux:
            return self.aux[name]
        raise DomainError(f"trace has no channel '{name}' (available: {', '.join(self.channel_names())})")

    def truncated(self, n: int) -> "SimTrace":
        return SimTrace(
            self.t[:n], self.r[:n], self.e[:n], self.u[:n], self.y[:n],
            {k: v[:n] for k, v in self.aux.items()}, self.dt,
        )

    def window(self, fraction: float) -> slice:
        """Slice over the final `fraction` of the samples (at least one)."""
        n = len(self)
        if n == 0:
            raise DomainError("empty trace")
        k = max(1, int(round(n * fraction)))
        return slice(n - k, n)
