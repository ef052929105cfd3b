"""Pydantic schemas for run configuration, comparison reports and command results."""
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_serializer, model_validator

from src.settings import settings

CHECK_KINDS = (
    "isoperimetric",
    "theorem1",
    "theorem2",
    "faber_krahn",
    "min_comparison",
    "hardy_littlewood",
)


class Check(BaseModel):
    """One-sided inequality lhs >= rhs - margin."""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    lhs: float
    rhs: float
    margin: float = Field(..., ge=0.0, description="Discretization slack from a coarse/fine pair")
    passed: bool = Field(..., alias="pass")
    detail: Optional[str] = Field(None, description="Error text when the check could not be evaluated")

    @classmethod
    def of(cls, name: str, lhs: float, rhs: float, margin: float = 0.0) -> "Check":
        margin = float(margin) if math.isfinite(margin) else math.inf
        passed = bool(lhs >= rhs - margin) if math.isfinite(lhs) and math.isfinite(rhs) else False
        return cls(name=name, lhs=float(lhs), rhs=float(rhs), margin=margin, passed=passed)

    @model_serializer(mode="wrap")
    def _drop_empty_detail(self, handler):
        data = handler(self)
        if data.get("detail") is None:
            data.pop("detail", None)
        return data

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs + self.margin


class ReportConstants(BaseModel):
    area_l: float = Field(..., description="Weighted measure |Omega|_l")
    r_sharp: float = Field(..., description="Radius of the symmetrized disk")
    C_l: float = Field(..., description="2 pi (l + 2)")


class ComparisonReport(BaseModel):
    """Outcome of one verification pipeline on one (domain, l, beta, h)."""

    report: str
    domain: str
    l: float
    beta: float
    h: float
    checks: List[Check] = Field(default_factory=list)
    constants: ReportConstants
    data: Dict[str, float] = Field(default_factory=dict, description="Observed values, reported not asserted")

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "report": "faber_krahn",
                "domain": "square",
                "l": 0.0,
                "beta": 1.0,
                "h": 0.05,
                "checks": [{"name": "faber_krahn", "lhs": 1.41, "rhs": 1.36, "margin": 0.002, "pass": True}],
                "constants": {"area_l": 4.0, "r_sharp": 1.128379, "C_l": 12.566371},
            }
        }
    )

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]


class SuiteDocument(BaseModel):
    reports: List[ComparisonReport] = Field(default_factory=list)
    passed: bool = True
    failed_checks: List[str] = Field(default_factory=list)

    @classmethod
    def from_reports(cls, reports: List[ComparisonReport]) -> "SuiteDocument":
        failed = [
            f"{r.report}:{name}[{r.domain},l={r.l:g},beta={r.beta:g}]"
            for r in reports
            for name in r.failed_checks
        ]
        return cls(reports=reports, passed=not failed, failed_checks=failed)


class MeasureReport(BaseModel):
    domain: str
    l: float
    beta: float
    area_l: float
    perimeter: float
    r_sharp: float
    isoperimetric_ratio: float
    isoperimetric_deficit: float
    C_l: float


class RadialSummary(BaseModel):
    R: float
    l: float
    beta: float
    v0: float
    vR: float
    lam: Optional[float] = Field(None, alias="lambda")

    model_config = ConfigDict(populate_by_name=True)


class SolveSummary(BaseModel):
    domain: str
    l: float
    beta: float
    h: float
    source: str
    n_nodes: int
    n_triangles: int
    min: float
    max: float
    L1: float
    L2: float


class EigenSummary(BaseModel):
    domain: str
    l: float
    beta: float
    h: float
    lambda_domain: float
    lambda_disk: float
    ratio: float
    residual: float
    iterations: int
    radial: RadialSummary


class CsvTable(BaseModel):
    """A CSV file to be written under the output directory."""

    name: str = Field(..., description="File name, e.g. 'solution.csv'")
    header: List[str]
    rows: List[List[Any]] = Field(default_factory=list)


class CommandResult(BaseModel):
    command: str
    ok: bool
    payload: Dict[str, Any] = Field(default_factory=dict)
    tables: List[CsvTable] = Field(default_factory=list)
    failed_checks: List[str] = Field(default_factory=list)


class RunConfig(BaseModel):
    """Validated parameters for one command invocation."""

    shape: str = Field("square", description="Gallery shape, e.g. 'square', 'ngon:64:1', 'lshape'")
    vertices: Optional[Path] = Field(None, description="Plain-text vertex file; overrides shape")
    l_values: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    beta_values: List[float] = Field(default_factory=lambda: [1.0], min_length=1)
    source: str = Field("one", description="Source tag: one, zero, nonradial, radial or const:c")
    h: float = Field(default_factory=lambda: settings.LAB_DEFAULT_H, gt=0.0)
    n_levels: int = Field(default_factory=lambda: settings.LAB_N_LEVELS, ge=2)
    n_grid: int = Field(default_factory=lambda: settings.LAB_RADIAL_GRID, ge=64)
    eigen_grid: int = Field(default_factory=lambda: settings.LAB_EIGEN_GRID, ge=64)
    n_radii: int = Field(default_factory=lambda: settings.LAB_N_RADII, ge=2)
    n_subsets: int = Field(default_factory=lambda: settings.LAB_HL_SUBSETS, ge=0)
    refinements: int = Field(default_factory=lambda: settings.LAB_CONVERGENCE_LEVELS, ge=1, le=6)
    seed: int = Field(default_factory=lambda: settings.LAB_SEED)
    checks: Optional[List[str]] = None
    out: Path = Field(default_factory=lambda: Path(settings.LAB_OUTPUT_DIR))
    mesh_dump: bool = False

    @field_validator("l_values")
    @classmethod
    def _exponents_in_range(cls, values: List[float]) -> List[float]:
        for l in values:
            if not (-2.0 < l <= 0.0):
                raise ValueError(f"l must lie in (-2, 0], got {l}")
        return values

    @field_validator("beta_values")
    @classmethod
    def _beta_positive(cls, values: List[float]) -> List[float]:
        for beta in values:
            if not (beta > 0.0) or not math.isfinite(beta):
                raise ValueError(f"beta must be positive, got {beta}")
        return values

    @field_validator("checks")
    @classmethod
    def _known_checks(cls, values: Optional[List[str]]) -> Optional[List[str]]:
        if values is None:
            return values
        unknown = sorted(set(values) - set(CHECK_KINDS))
        if unknown:
            raise ValueError(f"unknown checks {unknown}; choose from {list(CHECK_KINDS)}")
        return values

    @model_validator(mode="after")
    def _output_directory_usable(self) -> "RunConfig":
        if self.out.exists() and not self.out.is_dir():
            raise ValueError(f"output path {self.out} exists and is not a directory")
        return self

    @property
    def l(self) -> float:
        return self.l_values[0]

    @property
    def beta(self) -> float:
        return self.beta_values[0]
