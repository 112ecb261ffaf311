"""
Scenario files: TOML text validated into pydantic models.

A scenario names a run mode, the model with its parameters, and the initial
data. Every validation problem is collected before a ScenarioError is raised.
"""

from __future__ import annotations

import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10 backport with the same API
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from hamflow.tools import em_field, potentials
from hamflow.tools.errors import ScenarioError
from hamflow.tools.hamiltonians import (
    MODEL_CATALOG,
    ChargedCanonical,
    FreeNonRelativistic,
    HamiltonianModel,
    OpticsRay,
    Relativistic,
)

Vector3 = tuple[float, float, float]


class ScenarioMode(str, Enum):
    CANONICAL_4D = "canonical4d"
    GAUGE_4D = "gauge4d"
    REFERENCE_3D = "reference3d"
    COMPARE = "compare"
    QUANTUM = "quantum"


TRAJECTORY_MODES = (ScenarioMode.CANONICAL_4D, ScenarioMode.GAUGE_4D, ScenarioMode.REFERENCE_3D)
KINETIC_MODELS = ("free_nonrel", "relativistic")


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class UniformPotentialSpec(_Spec):
    kind: Literal["uniform"]
    value: float = 0.0

    def build(self) -> potentials.ScalarField:
        return potentials.UniformPotential(self.value)


class LinearPotentialSpec(_Spec):
    kind: Literal["linear"]
    gradient: Vector3

    def build(self):
        return potentials.LinearPotential(self.gradient)


class HarmonicPotentialSpec(_Spec):
    kind: Literal["harmonic"]
    stiffness: float = 1.0
    center: Vector3 = (0.0, 0.0, 0.0)

    def build(self):
        return potentials.HarmonicPotential(self.stiffness, self.center)


class RampPotentialSpec(_Spec):
    kind: Literal["ramp"]
    gradient: Vector3

    def build(self):
        return potentials.RampPotential(self.gradient)


class SinePotentialSpec(_Spec):
    kind: Literal["sine"]
    gradient: Vector3
    omega: float = 1.0

    def build(self):
        return potentials.SinePotential(self.gradient, self.omega)


PotentialSpec = Annotated[
    Union[UniformPotentialSpec, LinearPotentialSpec, HarmonicPotentialSpec, RampPotentialSpec, SinePotentialSpec],
    Field(discriminator="kind"),
]


class UniformIndexSpec(_Spec):
    kind: Literal["uniform"]
    n0: float = Field(1.0, gt=0.0)

    def build(self) -> potentials.IndexField:
        return potentials.UniformIndex(self.n0)


class LinearGradientIndexSpec(_Spec):
    kind: Literal["linear_gradient"]
    n0: float = Field(1.0, gt=0.0)
    alpha: float = 0.0
    direction: Vector3 = (1.0, 0.0, 0.0)

    def build(self):
        return potentials.LinearGradientIndex(self.n0, self.alpha, self.direction)


IndexSpec = Annotated[Union[UniformIndexSpec, LinearGradientIndexSpec], Field(discriminator="kind")]


class UniformElectricSpec(_Spec):
    kind: Literal["uniform_E"]
    E: Vector3

    def build(self) -> em_field.FieldConfig:
        return em_field.UniformElectric(self.E)


class UniformMagneticSpec(_Spec):
    kind: Literal["uniform_B"]
    B: Vector3

    def build(self):
        return em_field.UniformMagnetic(self.B)


class CrossedFieldsSpec(_Spec):
    kind: Literal["crossed"]
    E: Vector3
    B: Vector3

    def build(self):
        return em_field.CrossedFields(self.E, self.B)


class RampElectricSpec(_Spec):
    kind: Literal["ramp_E"]
    E0: Vector3

    def build(self):
        return em_field.RampElectric(self.E0)


FieldSpec = Annotated[
    Union[UniformElectricSpec, UniformMagneticSpec, CrossedFieldsSpec, RampElectricSpec],
    Field(discriminator="kind"),
]


class ModelSpec(_Spec):
    """Built-in model name with its physical parameters."""

    name: str = "free_nonrel"
    mass: float = Field(1.0, ge=0.0)
    charge: float = 1.0
    c: float = Field(1.0, gt=0.0)
    hbar: float = Field(1.0, gt=0.0)
    potential: Optional[Union[PotentialSpec, list[PotentialSpec]]] = None
    index: Optional[IndexSpec] = None

    @field_validator("name")
    @classmethod
    def _known_model(cls, name: str) -> str:
        if name not in MODEL_CATALOG:
            raise ValueError(f"unknown model '{name}', expected one of {sorted(MODEL_CATALOG)}")
        return name

    def build_potential(self) -> potentials.ScalarField:
        if self.potential is None:
            return potentials.ZERO_POTENTIAL
        if isinstance(self.potential, list):
            terms = tuple(spec.build() for spec in self.potential)
            return terms[0] if len(terms) == 1 else potentials.SumPotential(terms)
        return self.potential.build()

    def build(self, field: em_field.FieldConfig | None = None) -> HamiltonianModel:
        """Instantiate the model; ``field`` supplies potentials for charged_canonical."""
        if self.name == "free_nonrel":
            return FreeNonRelativistic(self.mass, self.build_potential())
        if self.name == "relativistic":
            return Relativistic(self.mass, self.c, self.build_potential())
        if self.name == "charged_canonical":
            return ChargedCanonical(
                self.mass, self.charge, self.c, field.scalar_potential(), field.vector_potential()
            )
        return OpticsRay(self.index.build(), self.c)

    def constants(self) -> dict:
        return {"c": self.c, "hbar": self.hbar, "mass": self.mass, "charge": self.charge}


class InitialSpec(_Spec):
    t0: float = 0.0
    position: Vector3 = (0.0, 0.0, 0.0)
    momentum: Vector3 = (0.0, 0.0, 0.0)


class PacketSpec(_Spec):
    x0: float = 0.0
    k0: float = 0.0
    sigma: float = Field(1.0, gt=0.0)


class GridSpec(_Spec):
    n_points: int = Field(2048, ge=16)
    x_min: float = -40.0
    x_max: float = 40.0
    record_every: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _ordered_bounds(self) -> GridSpec:
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must be greater than x_min ({self.x_min})")
        return self


class ChecksSpec(_Spec):
    """Optional thresholds; exceeding one fails the run."""

    max_constraint: Optional[float] = Field(None, gt=0.0)
    max_deviation: Optional[float] = Field(None, gt=0.0)
    max_ehrenfest: Optional[float] = Field(None, gt=0.0)


class Scenario(_Spec):
    mode: ScenarioMode
    dt: float
    n_steps: int = Field(ge=1)
    output: str = "output.csv"
    route: Literal["reference3d", "gauge"] = "reference3d"
    model: ModelSpec = ModelSpec()
    field: Optional[FieldSpec] = None
    initial: Optional[InitialSpec] = None
    packet: Optional[PacketSpec] = None
    grid: GridSpec = GridSpec()
    checks: ChecksSpec = ChecksSpec()

    @field_validator("dt")
    @classmethod
    def _positive_dt(cls, dt: float) -> float:
        if not (math.isfinite(dt) and dt > 0.0):
            raise ValueError("dt must be positive")
        return dt

    def build_field(self) -> em_field.FieldConfig | None:
        return None if self.field is None else self.field.build()


def _mode_errors(data: dict) -> list[str]:
    """Requirements that depend on the combination of mode and model."""
    errors = []
    mode = data.get("mode")
    model = data.get("model") if isinstance(data.get("model"), dict) else {}
    name = model.get("name", "free_nonrel")

    def require(key: str, reason: str):
        if key not in data:
            errors.append(f"{key}: required for {reason}")

    if mode in ("canonical4d", "gauge4d", "reference3d", "compare"):
        require("initial", f"mode {mode}")
    if mode == "gauge4d":
        require("field", "mode gauge4d")
        if name not in KINETIC_MODELS:
            errors.append(f"model.name: mode gauge4d needs a kinetic model {KINETIC_MODELS}, got '{name}'")
    if mode == "compare" and data.get("route") == "gauge":
        require("field", "compare route gauge")
        if name != "relativistic":
            errors.append(f"model.name: compare route gauge needs model 'relativistic', got '{name}'")
    if mode == "quantum":
        require("packet", "mode quantum")
        if name != "free_nonrel":
            errors.append(f"model.name: mode quantum needs model 'free_nonrel', got '{name}'")
    if name == "charged_canonical":
        require("field", "model charged_canonical")
    if name == "optics_ray" and "index" not in model:
        errors.append("model.index: required for model optics_ray")
    if name == "free_nonrel" and model.get("mass", 1.0) == 0:
        errors.append("model.mass: free_nonrel needs a positive mass")
    return errors


def _format_error(error: dict) -> str:
    location = ".".join(str(part) for part in error["loc"]) or "scenario"
    if error["type"] == "value_error":
        message = str(error["ctx"]["error"])
    else:
        message = error["msg"]
    return f"{location}: {message}"


def parse_scenario(text: bytes | str) -> Scenario:
    """
    Parse and validate scenario text.

    :raises ScenarioError: With every problem found, syntax errors carrying
        their line and column.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as err:
            raise ScenarioError([f"encoding error: {err}"]) from err
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as err:
        raise ScenarioError([f"syntax error: {err}"]) from err

    errors = _mode_errors(data)
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as err:
        errors = [_format_error(error) for error in err.errors()] + errors
        raise ScenarioError(errors) from err
    if errors:
        raise ScenarioError(errors)
    return scenario


def load_scenario(path) -> Scenario:
    """Read and parse a scenario file. OSError propagates unchanged."""
    return parse_scenario(Path(path).read_bytes())
