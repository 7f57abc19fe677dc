"""
Run configuration: one YAML file validated by pydantic.

    plant:        {kind: nonlinear | linearized | transfer_function | surrogate, ...}
    controller:   one controller (run, drift-sweep)
    controllers:  list of controllers (compare)
    reference:    {kind: step | square | constant, ...}
    sim:          {dt, horizon, initial_state, gap_band}
    outputs:      {directory, plots}
    metrics:      {channel, band_pct, rise_low_pct, rise_high_pct, final_window_pct}
    drift:        {periods: [{label, overrides: {field: value}}]}
    analysis:     {z_fixed, i_max, points, locus_samples}
    seed:         reserved
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, ValidationError, field_validator, model_validator

from maglev.controllers import ControllerSpec
from maglev.controllers.fuzzy import load_rules_file
from maglev.core.plant import MaglevParams
from maglev.core.scenario import (
    LinearizedPlantSpec,
    NonlinearPlantSpec,
    PlantSpec,
    ReferenceSpec,
    Scenario,
    StepReference,
)
from maglev.core.sim import build_plant
from maglev.exceptions import ConfigError, DomainError

logger = logging.getLogger("maglev_sim")

_STRICT = ConfigDict(frozen=True, extra="forbid")
DRIFTABLE_FIELDS = tuple(n for n, f in MaglevParams.model_fields.items() if f.annotation is not bool)


class SimSection(BaseModel):
    model_config = _STRICT

    dt: PositiveFloat = 1e-3
    horizon: PositiveFloat = 10.0
    initial_state: Optional[List[float]] = None
    gap_band: Optional[PositiveFloat] = None   # fraction of z_eq


class OutputSection(BaseModel):
    model_config = _STRICT

    directory: Optional[str] = None
    plots: bool = False


class MetricConventions(BaseModel):
    model_config = _STRICT

    channel: str = "y"
    band_pct: float = 2.0
    rise_low_pct: float = 10.0
    rise_high_pct: float = 90.0
    final_window_pct: float = 5.0

    @model_validator(mode="after")
    def _ranges(self):
        if not 0.0 < self.band_pct < 50.0:
            raise ValueError(f"band_pct must be within (0, 50), got {self.band_pct}")
        if not 0.0 <= self.rise_low_pct < self.rise_high_pct <= 100.0:
            raise ValueError("rise thresholds must satisfy 0 <= rise_low_pct < rise_high_pct <= 100")
        if not 0.0 < self.final_window_pct <= 100.0:
            raise ValueError(f"final_window_pct must be within (0, 100], got {self.final_window_pct}")
        return self

    def kwargs(self) -> Dict[str, Any]:
        return dict(
            channel=self.channel,
            band=self.band_pct / 100.0,
            rise_low=self.rise_low_pct / 100.0,
            rise_high=self.rise_high_pct / 100.0,
            final_window=self.final_window_pct / 100.0,
        )


class DriftPeriod(BaseModel):
    model_config = _STRICT

    label: str
    overrides: Dict[str, float] = Field(default_factory=dict)

    @field_validator("overrides")
    @classmethod
    def _known_fields(cls, v: Dict[str, float]) -> Dict[str, float]:
        unknown = sorted(set(v) - set(DRIFTABLE_FIELDS))
        if unknown:
            raise ValueError(f"unknown parameter(s) {', '.join(unknown)}; valid: {', '.join(DRIFTABLE_FIELDS)}")
        return v


class DriftSpec(BaseModel):
    model_config = _STRICT

    periods: List[DriftPeriod] = Field(min_length=1)


class AnalysisSection(BaseModel):
    model_config = _STRICT

    z_fixed: Optional[PositiveFloat] = None    # defaults to the plant's z0
    i_max: PositiveFloat = 2.0
    points: PositiveInt = 201
    locus_samples: PositiveInt = 400


class RunConfig(BaseModel):
    model_config = _STRICT

    plant: PlantSpec
    controller: Optional[ControllerSpec] = None
    controllers: Optional[List[ControllerSpec]] = None
    reference: ReferenceSpec = Field(default_factory=StepReference)
    sim: SimSection = Field(default_factory=SimSection)
    outputs: OutputSection = Field(default_factory=OutputSection)
    metrics: MetricConventions = Field(default_factory=MetricConventions)
    drift: Optional[DriftSpec] = None
    analysis: AnalysisSection = Field(default_factory=AnalysisSection)
    seed: int = 0

    @model_validator(mode="after")
    def _members(self):
        if self.controller is not None and self.controllers is not None:
            raise ValueError("give either 'controller' or 'controllers', not both")
        if self.drift is not None and not isinstance(self.plant, (NonlinearPlantSpec, LinearizedPlantSpec)):
            raise ValueError("drift periods override physical parameters; use a nonlinear or linearized plant")
        for spec in self.members():
            self.scenario(spec)
        for period in (self.drift.periods if self.drift else []):
            self.plant.with_overrides(period.overrides)
        if self.sim.initial_state is not None:
            try:
                build_plant(self.plant).initial_state(self.sim.initial_state)
            except DomainError as e:
                raise ValueError(e.detail) from e
        return self

    def members(self) -> List:
        if self.controllers is not None:
            return list(self.controllers)
        return [self.controller] if self.controller is not None else []

    def scenario(self, controller, plant=None) -> Scenario:
        return Scenario(
            plant=plant if plant is not None else self.plant,
            controller=controller,
            reference=self.reference,
            dt=self.sim.dt,
            horizon=self.sim.horizon,
            initial_state=self.sim.initial_state,
            gap_band=self.sim.gap_band,
        )


def _yaml_line(root: Optional[yaml.Node], loc) -> Optional[int]:
    """Line of the deepest YAML node matching a pydantic error location."""
    node, line = root, None
    for part in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(part)), None)
            if match is None:
                continue   # discriminator tags and model names are not keys
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
        else:
            continue
        line = node.start_mark.line + 1
    return line


def _format_validation(e: ValidationError, root: Optional[yaml.Node], source: str) -> str:
    parts = []
    for err in e.errors():
        path = ".".join(str(p) for p in err["loc"]) or "<root>"
        line = _yaml_line(root, err["loc"])
        where = f"{source}:{line}" if line else source
        parts.append(f"{where}: {path}: {err['msg']}")
    return "; ".join(parts)


def _attach_rules(raw: Dict[str, Any], base_dir: Path) -> None:
    """Load every fuzzy `rules_file`, relative paths resolving against the config's directory."""
    members = []
    if isinstance(raw.get("controller"), dict):
        members.append(raw["controller"])
    if isinstance(raw.get("controllers"), list):
        members.extend(m for m in raw["controllers"] if isinstance(m, dict))
    for spec in members:
        if spec.get("kind") != "fuzzy" or not spec.get("rules_file"):
            continue
        path = Path(spec["rules_file"])
        if not path.is_absolute():
            path = base_dir / path
        rules = load_rules_file(path)
        rule_base = dict(spec.get("rule_base") or {})
        rule_base["rules"] = [r.model_dump() for r in rules]
        spec["rule_base"] = rule_base
        spec["rules_file"] = str(path)


def parse_config(text: str, source: str = "<config>", base_dir: Union[str, Path] = ".") -> RunConfig:
    try:
        root = yaml.compose(text)
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigError(f"{where}: {problem}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    _attach_rules(raw, Path(base_dir))
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(_format_validation(e, root, source)) from e


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    config = parse_config(text, source=str(path), base_dir=path.parent)
    logger.info(f"Loaded config {path} ({len(config.members())} controller(s), plant={config.plant.kind})")
    return config
