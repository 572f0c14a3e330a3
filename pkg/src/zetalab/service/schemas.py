"""Request and response bodies for the evaluation service.

Complex numbers travel as {"re": ..., "im": ...} pairs. Catalogs travel
either as a source descriptor (rebuilt server side, deterministic) or as
raw catalog CSV text; exactly one of the two must be set. Field names
match the CLI flags one to one so any result header can be reconstructed
from the request that produced it.
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

from ..zeta import EvalPolicy
from ..zeros import Rectangle


class ComplexValue(BaseModel):
    re: float = 0.0
    im: float = 0.0

    @classmethod
    def wrap(cls, z):
        z = complex(z)
        return cls(re=z.real, im=z.imag)

    def unwrap(self):
        return complex(self.re, self.im)


class PolicyParams(BaseModel):
    m_max: int = 32
    k_cutoff: int = 64
    pressure_estimate: Optional[float] = None

    def to_policy(self):
        return EvalPolicy(
            m_max=self.m_max,
            k_cutoff=self.k_cutoff,
            pressure_estimate=self.pressure_estimate,
        )


class CatalogSource(BaseModel):
    descriptor: Optional[dict] = None
    catalog_csv: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.descriptor is None) == (self.catalog_csv is None):
            raise ValueError("set exactly one of descriptor, catalog_csv")
        return self


class RectangleParams(BaseModel):
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def unwrap(self):
        return Rectangle(self.re_min, self.re_max, self.im_min, self.im_max)


class OrbitsRequest(BaseModel):
    descriptor: dict


class OrbitsResponse(BaseModel):
    catalog_csv: str
    d: int
    orbit_count: int
    max_period: float


class ZetaEvalRequest(BaseModel):
    source: CatalogSource
    kind: Literal["smale", "gv", "gv-exponent"] = "gv"
    s: ComplexValue = ComplexValue()
    policy: PolicyParams = PolicyParams()


class ValueResponse(BaseModel):
    value: ComplexValue
    truncation_bound: float


class ZetaScanRequest(BaseModel):
    source: CatalogSource
    kind: Literal["smale", "gv", "gv-exponent"] = "gv"
    re_min: float
    re_max: float
    re_points: int = Field(default=1, ge=1)
    im_min: float = 0.0
    im_max: float = 0.0
    im_points: int = Field(default=1, ge=1)
    policy: PolicyParams = PolicyParams()


class ScanRow(BaseModel):
    re_s: float
    im_s: float
    re_value: float
    im_value: float
    truncation_bound: float


class ZetaScanResponse(BaseModel):
    rows: list[ScanRow]


class DetRequest(BaseModel):
    source: CatalogSource
    k: int = 0
    ell: Optional[int] = None
    s: ComplexValue = ComplexValue()
    policy: PolicyParams = PolicyParams()


class ZerosRequest(BaseModel):
    source: CatalogSource
    rect: RectangleParams
    tol: float = 1e-10
    n_boundary: int = 64
    policy: PolicyParams = PolicyParams()


class ZeroEntry(BaseModel):
    re: float
    im: float
    multiplicity: int
    residual: float
    method: str


class ClusterEntry(BaseModel):
    rect: RectangleParams
    count: int
    residual: float


class ZerosResponse(BaseModel):
    zeros: list[ZeroEntry]
    clusters: list[ClusterEntry]
    total_count: int
    degraded: bool
    method: str


class MomentsRequest(BaseModel):
    source: CatalogSource
    s0: ComplexValue
    n_min: int = 1
    n_max: int = 25
    count: int = Field(default=1, ge=1, le=4)
    policy: PolicyParams = PolicyParams()


class MomentsResponse(BaseModel):
    moments: list[ComplexValue]
    resonances: list[ZeroEntry]
    degraded: bool


class WeylRequest(BaseModel):
    source: CatalogSource
    rect: RectangleParams
    strip_re: tuple[float, float]
    windows: list[tuple[float, float]]
    tol: float = 1e-10
    n_boundary: int = 64
    policy: PolicyParams = PolicyParams()


class WeylResponse(BaseModel):
    counts: list[int]
    zeros: list[ZeroEntry]
    total_count: int


class CheckEntry(BaseModel):
    """One verification line; serialized with the literal key "pass"."""

    check_name: str
    measured: float
    tolerance: float
    passed: bool = Field(alias="pass")

    model_config = {"populate_by_name": True}


class VerifyResponse(BaseModel):
    checks: list[CheckEntry]
    failures: int


class GridParams(BaseModel):
    dimension: int = 1
    half_width: float = 8.0
    points_per_axis: int = 32


class SpectrumRequest(BaseModel):
    operator: Literal["middle", "lift", "t0", "split"] = "middle"
    grid: GridParams = GridParams()
    # middle-factor and split coefficients
    a: float = 2.0
    a_hat: Optional[float] = None
    lam: float = 1.0
    t: float = 0.0
    support_radius: float = 2.0
    # affine-lift map
    hbar: float = 1.0
    linear_part: Optional[list[list[float]]] = None
    translation: Optional[list[float]] = None
    # split estimator
    weight_r: float = 8.0
    weight_sigma: int = 0
    band_fraction: float = 0.9
    svtol: float = 1e-8
    refine: bool = False
    # output shaping
    top: int = Field(default=8, ge=1)
    include_matrix: bool = False


class SpectrumResponse(BaseModel):
    operator: str
    shape: tuple[int, int]
    eigenvalues: list[ComplexValue]
    singular_values: list[float]
    dilation: Optional[float] = None
    split: Optional[dict] = None
    matrix_csv: Optional[str] = None


class IdentityCheckRequest(BaseModel):
    source: CatalogSource
    s_values: list[ComplexValue]
    ell_range: Optional[int] = None
    tol: float = 1e-10
    policy: PolicyParams = PolicyParams()


class IdentityCheckResponse(BaseModel):
    d: int
    ell_range: int
    samples: int
    checks: list[CheckEntry]
