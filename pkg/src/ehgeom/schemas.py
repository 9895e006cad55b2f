"""Request and response models shared by the HTTP service and the CLI."""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class CurveSpec(BaseModel):
    family: Literal["circle", "line", "samples"] = "circle"
    r0: float = 1.0
    eps: Literal[-1, 1] = 1
    angle: float = 0.0
    origin: tuple[float, float] = (0.0, 0.0)
    points: Optional[list[tuple[float, float]]] = None
    closed: Optional[bool] = None

    @model_validator(mode="after")
    def _check_family(self):
        if self.family == "circle" and self.r0 <= 0:
            raise ValueError("circle radius r0 must be positive")
        if self.family == "samples" and (not self.points or len(self.points) < 4):
            raise ValueError("a sampled curve needs at least 4 points")
        return self

    def as_dict(self):
        return self.model_dump(exclude_none=True)


class RangeSpec(BaseModel):
    start: float
    stop: float
    count: int = Field(1, ge=1)

    def values(self):
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + k * step for k in range(self.count)]


class GridSpec(BaseModel):
    s: RangeSpec = RangeSpec(start=0.0, stop=0.0, count=1)
    rho: RangeSpec = RangeSpec(start=0.5, stop=2.0, count=4)
    phi: RangeSpec = RangeSpec(start=0.0, stop=0.0, count=1)

    @field_validator("rho")
    @classmethod
    def _positive_rho(cls, v):
        if min(v.start, v.stop) <= 0:
            raise ValueError("rho range must be positive")
        return v


class GeodesicSpec(BaseModel):
    kind: Literal["free", "radial", "closed"] = "free"
    s: float = 0.0
    rho: float = Field(1.0, gt=0)
    phi: float = 0.0
    sdot: float = 0.0
    rhodot: float = 0.0
    phidot: float = 0.5
    tau_end: float = Field(10.0, gt=0)
    n_out: int = Field(201, ge=2)
    n: int = 1
    m: int = 0


class SpinorSpec(BaseModel):
    C1: tuple[float, float] = (1.0, 0.0)
    C2: tuple[float, float] = (0.0, 1.0)
    betas: list[int] = [-1, -2]
    holonomy: bool = True

    @field_validator("betas")
    @classmethod
    def _negative(cls, v):
        if any(b >= 0 for b in v):
            raise ValueError("betas must be negative integers")
        return v


class SpectralSpec(BaseModel):
    eps_list: list[float] = [0.3, 0.2, 0.1]
    laplace_eps: Optional[float] = None
    n_s: int = Field(32, ge=2)


class RunConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    curve: CurveSpec = CurveSpec()
    t: float = Field(1.0, ge=0)
    eps: float = Field(0.5, gt=0)
    lam: float = Field(1.0, alias="lambda")
    a: Optional[float] = Field(None, gt=0)
    tol: float = Field(1e-10, gt=0)
    grid: GridSpec = GridSpec()
    geodesic: GeodesicSpec = GeodesicSpec()
    spinor: SpinorSpec = SpinorSpec()
    spectral: SpectralSpec = SpectralSpec()


class Table(BaseModel):
    """Column-oriented numeric table; every row has one value per column."""

    columns: list[str]
    rows: list[list[float]]


class GeodesicReport(BaseModel):
    kind: str
    status: str
    table: Table
    summary: dict[str, float]


class BoundConstantsModel(BaseModel):
    Pa: float
    mu: float
    M: float
    N: float
    Q: float


class DiracRayleighModel(BaseModel):
    eps: float
    t: float
    norm_sq: float
    dirac_norm_sq: float
    quotient: float
    analytic_bound: Optional[float]
    constants: Optional[BoundConstantsModel]


class LaplaceRayleighModel(BaseModel):
    eps: float
    t: float
    numerator: float
    denominator: float
    quotient: float
    bound: float


class SpectralReport(BaseModel):
    dirac: list[DiracRayleighModel]
    dirac_decreasing: bool
    laplace: LaplaceRayleighModel
    ricci_lower: Optional[float]
    mu0_upper: Optional[float]


class CheckResult(BaseModel):
    name: str
    value: float
    threshold: float
    passed: bool


class VerifyReport(BaseModel):
    checks: list[CheckResult]

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)
