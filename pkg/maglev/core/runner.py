"""
Member runs for run / compare / drift-sweep.

A member is one Scenario plus the metric conventions to score it with. Members
are independent, so a batch can fan out over a process pool; results come back
in submission order.
"""
import logging
import multiprocessing
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from maglev.controllers.mras import mras_tracking_error
from maglev.core.analysis import StepMetrics, step_metrics
from maglev.core.scenario import Scenario
from maglev.core.sim import simulate
from maglev.core.trace import SimTrace
from maglev.exceptions import DomainError, SimulationFailure

logger = logging.getLogger("maglev_sim")

STATUS_OK = "ok"
TRACKING_WINDOW = 0.2


@dataclass(frozen=True)
class MemberTask:
    label: str
    scenario: Scenario
    metric_kwargs: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class MemberResult:
    label: str
    status: str
    trace: Optional[SimTrace]
    metrics: Optional[StepMetrics] = None
    failure_time: Optional[float] = None
    detail: Optional[str] = None
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def failure(self) -> SimulationFailure:
        return SimulationFailure(self.status, self.detail or self.status, self.failure_time, self.trace)

    def summary(self, **leading) -> Dict[str, Any]:
        """Flat key=value view for metrics.txt."""
        out: Dict[str, Any] = dict(leading)
        out["status"] = self.status
        out["samples"] = len(self.trace) if self.trace is not None else 0
        if self.metrics is not None:
            out.update(self.metrics.as_dict())
        if not self.ok:
            out["failure_reason"] = self.status
            out["failure_time"] = self.failure_time
            out["detail"] = self.detail
        out.update(self.extras)
        return out


def _extras(trace: SimTrace) -> Dict[str, float]:
    if "ym" not in trace.aux or len(trace) == 0:
        return {}
    return {
        "tracking_rms": mras_tracking_error(trace, TRACKING_WINDOW),
        "t0": float(trace.aux["t0"][-1]),
        "s0": float(trace.aux["s0"][-1]),
    }


def run_member(task: MemberTask) -> MemberResult:
    """Simulate and score one member. Run failures become a failed result, never an exception."""
    try:
        trace = simulate(task.scenario)
    except SimulationFailure as e:
        logger.warning(f"Member '{task.label}' failed ({e.kind}) at t={e.time:.6g} s: {e.detail}")
        return MemberResult(task.label, e.kind, e.trace, failure_time=e.time, detail=e.detail)
    try:
        metrics = step_metrics(trace, **task.metric_kwargs)
    except DomainError as e:
        logger.warning(f"Member '{task.label}' has no step metrics: {e.detail}")
        return MemberResult(task.label, "metrics_error", trace, detail=e.detail)
    return MemberResult(task.label, STATUS_OK, trace, metrics, extras=_extras(trace))


def run_members(tasks: Sequence[MemberTask], jobs: int = 1) -> List[MemberResult]:
    if jobs <= 1 or len(tasks) <= 1:
        return [run_member(t) for t in tasks]
    workers = min(jobs, len(tasks))
    logger.info(f"Running {len(tasks)} members on {workers} worker processes")
    with multiprocessing.Pool(workers) as pool:
        return pool.map(run_member, tasks)
