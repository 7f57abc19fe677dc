"""
Mamdani fuzzy controller on (error, change of error).

AND = min, implication = min (clip), aggregation = max, centroid over a
uniform discretization of the output universe. When no rule fires the
output is 0.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from maglev.controllers.base import Controller, ControllerSpecBase
from maglev.exceptions import ConfigError

logger = logging.getLogger("maglev_sim")

INPUT_VARIABLES = ("error", "derror")


class MembershipFunction(BaseModel):
    """Triangle (left foot, peak, right foot). A foot equal to the peak makes a shoulder."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    left: float
    peak: float
    right: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.left <= self.peak <= self.right:
            raise ValueError(f"need left <= peak <= right, got ({self.left}, {self.peak}, {self.right})")
        if self.left == self.right:
            raise ValueError("membership function has empty support")
        return self

    @classmethod
    def tri(cls, left: float, peak: float, right: float) -> "MembershipFunction":
        return cls(left=left, peak=peak, right=right)

    def degree(self, x):
        x = np.asarray(x, dtype=float)
        mu = np.zeros_like(x)
        if self.peak > self.left:
            rising = (x >= self.left) & (x <= self.peak)
            mu = np.where(rising, (x - self.left) / (self.peak - self.left), mu)
        if self.right > self.peak:
            falling = (x > self.peak) & (x <= self.right)
            mu = np.where(falling, (self.right - x) / (self.right - self.peak), mu)
        mu = np.where(x == self.peak, 1.0, mu)
        return mu


def fuzzify(x: float, mf: MembershipFunction) -> float:
    return float(mf.degree(x))


class LinguisticVariable(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    universe: Tuple[float, float] = (-1.0, 1.0)
    terms: Dict[str, MembershipFunction]

    @model_validator(mode="after")
    def _universe(self):
        lo, hi = self.universe
        if not lo < hi:
            raise ValueError(f"universe bounds must be increasing, got {self.universe}")
        if not self.terms:
            raise ValueError("a linguistic variable needs at least one term")
        return self

    def clamp(self, x: float) -> float:
        lo, hi = self.universe
        return min(max(x, lo), hi)


class FuzzyRule(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    antecedents: List[Tuple[str, str]]   # (variable, term), joined by AND
    consequent: str
    weight: float = 1.0

    @field_validator("weight")
    @classmethod
    def _weight(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"rule weight must be in (0, 1], got {v}")
        return v

    def __str__(self) -> str:
        cond = " AND ".join(f"{var} IS {term}" for var, term in self.antecedents)
        return f"IF {cond} THEN output IS {self.consequent} ({self.weight:g})"


def _tri(left, peak, right) -> MembershipFunction:
    return MembershipFunction.tri(left, peak, right)


def default_error_variable() -> LinguisticVariable:
    return LinguisticVariable(terms={
        "low": _tri(-1.0, -1.0, 0.0),
        "okay": _tri(-0.5, 0.0, 0.5),
        "high": _tri(0.0, 1.0, 1.0),
    })


def default_derror_variable() -> LinguisticVariable:
    return LinguisticVariable(terms={
        "negative": _tri(-1.0, -1.0, 0.0),
        "zero": _tri(-0.5, 0.0, 0.5),
        "positive": _tri(0.0, 1.0, 1.0),
    })


def default_output_variable() -> LinguisticVariable:
    return LinguisticVariable(terms={
        "NL": _tri(-1.0, -1.0, -0.5),
        "NS": _tri(-1.0, -0.5, 0.0),
        "Zero": _tri(-0.5, 0.0, 0.5),
        "PS": _tri(0.0, 0.5, 1.0),
        "PL": _tri(0.5, 1.0, 1.0),
    })


def default_rules() -> List[FuzzyRule]:
    return [
        FuzzyRule(antecedents=[("error", "okay")], consequent="Zero"),
        FuzzyRule(antecedents=[("error", "low")], consequent="PL"),
        FuzzyRule(antecedents=[("error", "high")], consequent="NL"),
        FuzzyRule(antecedents=[("error", "okay"), ("derror", "positive")], consequent="NS"),
    ]


class FuzzyRuleBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    error: LinguisticVariable = Field(default_factory=default_error_variable)
    derror: LinguisticVariable = Field(default_factory=default_derror_variable)
    output: LinguisticVariable = Field(default_factory=default_output_variable)
    rules: List[FuzzyRule] = Field(default_factory=default_rules)
    resolution: int = Field(default=201, ge=3)

    @model_validator(mode="after")
    def _rules_reference_terms(self):
        for n, rule in enumerate(self.rules, start=1):
            for var, term in rule.antecedents:
                if var not in INPUT_VARIABLES:
                    raise ValueError(f"rule {n}: unknown input variable '{var}'")
                if term not in self.variable(var).terms:
                    raise ValueError(f"rule {n}: '{var}' has no term '{term}'")
            if rule.consequent not in self.output.terms:
                raise ValueError(f"rule {n}: output has no term '{rule.consequent}'")
        return self

    def variable(self, name: str) -> LinguisticVariable:
        return {"error": self.error, "derror": self.derror}[name]

    def output_grid(self, points: Optional[int] = None) -> np.ndarray:
        lo, hi = self.output.universe
        return np.linspace(lo, hi, points or self.resolution)


def firing_strengths(rb: FuzzyRuleBase, e: float, de: float) -> List[float]:
    inputs = {"error": rb.error.clamp(e), "derror": rb.derror.clamp(de)}
    strengths = []
    for rule in rb.rules:
        mu = min(fuzzify(inputs[var], rb.variable(var).terms[term]) for var, term in rule.antecedents)
        strengths.append(mu * rule.weight)
    return strengths


def aggregate(rb: FuzzyRuleBase, strengths: List[float], grid: np.ndarray) -> np.ndarray:
    agg = np.zeros_like(grid)
    for rule, w in zip(rb.rules, strengths):
        if w > 0.0:
            agg = np.maximum(agg, np.minimum(w, rb.output.terms[rule.consequent].degree(grid)))
    return agg


def centroid(grid: np.ndarray, mu: np.ndarray) -> float:
    area = float(np.sum(mu))
    if area <= 0.0:
        return 0.0
    return float(np.sum(grid * mu) / area)


def fuzzy_infer(rb: FuzzyRuleBase, e: float, de: float, points: Optional[int] = None) -> float:
    """Crisp normalized output for normalized inputs (clamped to their universes)."""
    grid = rb.output_grid(points)
    return centroid(grid, aggregate(rb, firing_strengths(rb, e, de), grid))


_RULE_LINE = re.compile(
    r"^IF\s+(?P<cond>.+?)\s+THEN\s+output\s+IS\s+(?P<out>\w+)\s*(?:\((?P<w>[0-9.eE+-]+)\))?$",
    re.IGNORECASE,
)
_CLAUSE = re.compile(r"^(?P<var>\w+)\s+IS\s+(?P<term>\w+)$", re.IGNORECASE)


def parse_rules(text: str, source: str = "<rules>") -> List[FuzzyRule]:
    """
    One rule per line: `IF error IS okay AND derror IS positive THEN output IS NS (1)`.
    Blank lines and lines starting with '#' are skipped; the trailing weight is optional.
    """
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        match = _RULE_LINE.match(line)
        if not match:
            raise ConfigError(f"{source}:{lineno}: cannot parse rule '{line}'")
        antecedents = []
        for clause in re.split(r"\s+AND\s+", match.group("cond"), flags=re.IGNORECASE):
            c = _CLAUSE.match(clause.strip())
            if not c:
                raise ConfigError(f"{source}:{lineno}: cannot parse condition '{clause}'")
            antecedents.append((c.group("var").lower(), c.group("term")))
        weight = float(match.group("w")) if match.group("w") else 1.0
        try:
            rules.append(FuzzyRule(antecedents=antecedents, consequent=match.group("out"), weight=weight))
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: {e}") from e
    if not rules:
        raise ConfigError(f"{source}: no rules found")
    return rules


def load_rules_file(path: Union[str, Path]) -> List[FuzzyRule]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read rules file {path}: {e}") from e
    rules = parse_rules(text, source=str(path))
    logger.info(f"Loaded {len(rules)} fuzzy rules from {path}.")
    return rules


@dataclass(frozen=True)
class FuzzyState:
    prev_error: Optional[float] = None
    accumulated: float = 0.0


class FuzzyControllerSpec(ControllerSpecBase):
    kind: Literal["fuzzy"] = "fuzzy"
    ke: float = 1.0      # error -> normalized error
    kde: float = 0.1     # de/dt -> normalized change of error
    ku: float = 1.0      # normalized output -> actuator units
    mode: Literal["positional", "incremental"] = "positional"
    rule_base: FuzzyRuleBase = Field(default_factory=FuzzyRuleBase)
    rules_file: Optional[str] = None


class FuzzyController(Controller):
    kind = "fuzzy"

    def __init__(self, spec: FuzzyControllerSpec):
        super().__init__(spec)
        self.rb = spec.rule_base
        self.grid = self.rb.output_grid()

    def initial_state(self) -> FuzzyState:
        return FuzzyState()

    def law(self, state: FuzzyState, r: float, y: float, dt: float):
        spec = self.spec
        e = r - y
        de = 0.0 if state.prev_error is None else (e - state.prev_error) / dt
        strengths = firing_strengths(self.rb, spec.ke * e, spec.kde * de)
        out = spec.ku * centroid(self.grid, aggregate(self.rb, strengths, self.grid))
        if spec.mode == "incremental":
            acc = state.accumulated + out * dt
            return acc, FuzzyState(e, acc)
        return out, FuzzyState(e, state.accumulated)
