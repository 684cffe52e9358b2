"""Enums and pydantic models shared by the library and the verifier CLI."""

from __future__ import annotations

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from cgmlab.config import (
    CLOSED_FORM_TOL,
    CURVATURE_TOL,
    DEFAULT_FD_STEP,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    FLAT_TOL,
    NUMERIC_TOL,
    ORDER_SLACK,
    R_SWEEP_TOL,
    RICHARDSON,
    SANITY_TOL,
)


# -------- Enums --------

class SpaceKind(str, Enum):
    sphere2 = "Sphere2"
    sphere3 = "Sphere3"
    hyperbolic_plane = "HyperbolicPlane"
    anti_de_sitter3 = "AntiDeSitter3"


class GroupKind(str, Enum):
    su2 = "SU2"
    su11 = "SU11"


class RotationKind(str, Enum):
    so3 = "SO3"
    so12plus = "SO12plus"


class FiberSign(str, Enum):
    definite = "Definite"
    indefinite = "Indefinite"


class PlaneKind(str, Enum):
    hh = "HH"        # e^h ^ f^h
    hv_e = "HV_e"    # e^h ^ f^v
    hv_f = "HV_f"    # f^h ^ f^v


class LiftCase(str, Enum):
    hh = "hh"
    hv = "hv"
    vh = "vh"
    vv = "vv"


class ChartKind(str, Enum):
    ambient = "ambient"
    bundle = "bundle"


class ScenarioName(str, Enum):
    sphere_isometry = "sphere-isometry"
    berger_isometry = "berger-isometry"
    hyperbolic_immersion = "hyperbolic-immersion"
    curvature_closed_vs_oracle = "curvature-closed-vs-oracle"
    constant_curvature_t1 = "constant-curvature-T1"
    positivity_sample = "positivity-sample"
    oracle_sanity = "oracle-sanity"


# Threshold a scenario uses when --tol is omitted, per check family
DEFAULT_THRESHOLDS: Dict[str, float] = {
    "closed": CLOSED_FORM_TOL,
    "numeric": NUMERIC_TOL,
    "curvature": CURVATURE_TOL,
    "sanity": SANITY_TOL,
    "flat": FLAT_TOL,
    "order": ORDER_SLACK,
    "sweep": R_SWEEP_TOL,
}


# -------- Finite differences --------

class FDConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    step: float = Field(default=DEFAULT_FD_STEP, gt=0, lt=0.1)
    richardson: bool = RICHARDSON


# -------- Verifier input --------

class ScenarioConfig(BaseModel):
    scenario: ScenarioName
    c: float = Field(gt=0, le=1e6)
    m: Optional[float] = Field(default=None, ge=-64, le=64)
    r: float = Field(default=0.0, ge=0, le=1e6)
    epsilon: Optional[float] = Field(default=None, gt=0, le=1e3)
    samples: Optional[int] = Field(default=None, ge=1, le=1_000_000)
    # points for the finite-difference curvature oracle checks; defaults to samples
    oracle_samples: Optional[int] = Field(default=None, ge=1, le=1_000_000)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    tol: Optional[float] = Field(default=None, gt=0, allow_inf_nan=False)
    fd_step: float = Field(default=DEFAULT_FD_STEP, gt=0, lt=0.1)

    @model_validator(mode="after")
    def check_scenario_fields(self) -> "ScenarioConfig":
        if self.scenario == ScenarioName.berger_isometry:
            if self.epsilon is None:
                raise ValueError("berger-isometry requires epsilon")
            if self.c != 4.0:
                raise ValueError("berger-isometry is stated for c = 4")
            if self.m is None:
                self.m = math.log2(self.epsilon ** 2) + 2.0
        elif self.m is None:
            self.m = math.log2(self.c)

        if self.samples is None:
            self.samples = DEFAULT_SAMPLES[self.scenario.value]
        if self.oracle_samples is None:
            self.oracle_samples = self.samples
        return self

    @property
    def fd(self) -> FDConfig:
        return FDConfig(step=self.fd_step)

    def threshold(self, family: str) -> float:
        """--tol overrides every check; otherwise the family default applies."""
        if self.tol is not None:
            return self.tol
        return DEFAULT_THRESHOLDS[family]

    def echo(self) -> Dict[str, Any]:
        return {
            "c": self.c,
            "m": self.m,
            "r": self.r,
            "epsilon": self.epsilon,
            "samples": self.samples,
            "oracle_samples": self.oracle_samples,
            "seed": self.seed,
            "tol": self.tol,
            "fd_step": self.fd_step,
        }


class TableConfig(BaseModel):
    c_list: List[float] = Field(min_length=1)
    m_list: List[float] = Field(min_length=1)
    r_list: List[float] = Field(min_length=1)
    planes: List[PlaneKind] = Field(default_factory=lambda: list(PlaneKind))
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    fd_step: float = Field(default=DEFAULT_FD_STEP, gt=0, lt=0.1)

    @model_validator(mode="after")
    def check_grid(self) -> "TableConfig":
        if any(not (c > 0) for c in self.c_list):
            raise ValueError("every c must be positive")
        if any(not (r >= 0) for r in self.r_list):
            raise ValueError("every r must be non-negative")
        if not self.planes:
            raise ValueError("plane set must not be empty")
        return self


# -------- Verifier output --------

class CheckResult(BaseModel):
    name: str
    max_abs_error: float
    threshold: float = Field(gt=0)
    passed: bool
    samples_used: int = Field(ge=0)

    @model_validator(mode="after")
    def check_passed_flag(self) -> "CheckResult":
        if self.passed != bool(self.max_abs_error <= self.threshold):
            raise ValueError("passed must equal max_abs_error <= threshold")
        return self

    @field_serializer("max_abs_error", when_used="json")
    def serialize_error(self, value: float) -> Optional[float]:
        """Non-finite errors (aborted checks) are written to JSON as null."""
        return value if math.isfinite(value) else None

    @classmethod
    def evaluate(cls, name: str, max_abs_error: float, threshold: float, samples_used: int) -> "CheckResult":
        err = float(max_abs_error)
        if math.isnan(err):
            err = math.inf
        return cls(
            name=name,
            max_abs_error=err,
            threshold=threshold,
            passed=err <= threshold,
            samples_used=samples_used,
        )


class Report(BaseModel):
    scenario: ScenarioName
    params: Dict[str, Any]
    checks: List[CheckResult]
    passed: bool
    wall_ms: float = Field(ge=0)

    @model_validator(mode="after")
    def check_overall(self) -> "Report":
        if self.passed != all(ch.passed for ch in self.checks):
            raise ValueError("passed must equal the conjunction of check results")
        return self


class TableRow(BaseModel):
    c: float
    m: float
    r: float
    plane: PlaneKind
    closed_form: float
    oracle: float
    delta: float

    def as_csv_row(self) -> List[str]:
        return [
            repr(self.c),
            repr(self.m),
            repr(self.r),
            self.plane.value,
            repr(self.closed_form),
            repr(self.oracle),
            repr(self.delta),
        ]
