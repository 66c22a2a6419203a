"""
Schema definitions for galband
Pydantic models for every value that crosses a module boundary
"""
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import ellipk

from config import Config

BLOCH_BASES = (
    "cn+i*sn",
    "cn-i*sn",
    "dn+i*sqrt(m)*sn",
    "dn-i*sqrt(m)*sn",
    "dn+sqrt(m)*cn",
    "dn-sqrt(m)*cn",
)

PERIOD_CLASSES = ("2iK'", "4iK'", "2K+2iK'", "4K-type", "bloch")


def _format_coefficient(value: float) -> str:
    return f"{value:g}"


class EllipticTriple(BaseModel):
    """sn, cn, dn at one complex point for a given modulus"""

    model_config = ConfigDict(frozen=True)

    z: complex = Field(..., description="Complex argument")
    m: float = Field(..., ge=0.0, le=1.0, description="Modulus parameter (square of the modulus)")
    sn: complex
    cn: complex
    dn: complex

    def identity_residuals(self) -> Tuple[float, float]:
        """|sn^2 + cn^2 - 1| and |dn^2 + m sn^2 - 1|"""
        return (
            abs(self.sn**2 + self.cn**2 - 1.0),
            abs(self.dn**2 + self.m * self.sn**2 - 1.0),
        )


class GALSpec(BaseModel):
    """One PT-symmetric GAL potential: parameters a, b, f, g, modulus m and line offset beta"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    a: float = Field(0.0, description="Coefficient parameter of the m sn^2 term")
    b: float = Field(0.0, description="Coefficient parameter of the m cd^2 term")
    f: float = Field(0.0, description="Coefficient parameter of the dc^2 term")
    g: float = Field(0.0, description="Coefficient parameter of the ns^2 term")
    m: float = Field(..., gt=0.0, lt=1.0, description="Modulus parameter")
    beta: Optional[float] = Field(None, description="Real offset of the line y = ix + beta; default K(m)/2")

    @model_validator(mode="before")
    @classmethod
    def _default_beta(cls, data):
        if isinstance(data, dict) and data.get("beta") is None:
            m = data.get("m")
            if isinstance(m, (int, float)) and 0.0 < m < 1.0:
                data = {**data, "beta": float(ellipk(m)) / 2.0}
        return data

    @model_validator(mode="after")
    def _check_line(self):
        quarter = float(ellipk(self.m))
        offset = np.mod(self.beta, quarter)
        if min(offset, quarter - offset) / quarter < Config.EPS_POLE:
            raise ValueError(
                f"beta={self.beta} lies on a singular line (beta mod K(m) = 0); choose e.g. K(m)/2"
            )
        return self

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        """(A, B, F, G) = (a(a+1), b(b+1), f(f+1), g(g+1))"""
        return tuple(p * (p + 1.0) for p in (self.a, self.b, self.f, self.g))

    @property
    def bracket(self) -> str:
        return "[" + ",".join(_format_coefficient(c) for c in self.coefficients) + "]"

    @property
    def parameters(self) -> Tuple[float, float, float, float]:
        return (self.a, self.b, self.f, self.g)

    @property
    def quarter_period(self) -> float:
        return float(ellipk(self.m))

    @property
    def complementary_quarter_period(self) -> float:
        return float(ellipk(1.0 - self.m))

    @property
    def period(self) -> float:
        """Real period 2K'(m) of the potential in x"""
        return 2.0 * self.complementary_quarter_period

    def with_parameters(self, a: float, b: float, f: float, g: float) -> "GALSpec":
        return GALSpec(a=a, b=b, f=f, g=g, m=self.m, beta=self.beta)

    def as_record(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "f": self.f, "g": self.g, "m": self.m, "beta": self.beta}


class EnergyMap(BaseModel):
    """Affine energy map E -> sigma * E + offset"""

    model_config = ConfigDict(frozen=True)

    sigma: Literal[1, -1] = 1
    offset: float = 0.0

    def apply(self, energy):
        return self.sigma * energy + self.offset

    def compose(self, other: "EnergyMap") -> "EnergyMap":
        """self after other"""
        return EnergyMap(sigma=self.sigma * other.sigma, offset=self.sigma * other.offset + self.offset)

    @property
    def is_identity(self) -> bool:
        return self.sigma == 1 and abs(self.offset) < Config.TOL_ID


class TransformResult(BaseModel):
    """Spec produced by a symmetry or duality transform"""

    model_config = ConfigDict(frozen=True)

    op: str
    new_spec: GALSpec
    energy_map: EnergyMap
    argument_map: str = Field(..., description="y-substitution relating the eigenfunctions")


class DeltaSet(BaseModel):
    """The eleven table radicals; complex when the radicand is negative"""

    delta1: complex
    delta2: complex
    delta3: complex
    delta4: complex
    delta5: complex
    delta6: complex
    delta7: complex
    delta8: complex
    delta9: complex
    delta10: complex
    delta11: complex
    radicands: Dict[str, float] = Field(default_factory=dict)

    def __getitem__(self, index: int) -> complex:
        return getattr(self, f"delta{index}")

    @property
    def complex_flags(self) -> Dict[str, bool]:
        return {name: value < 0.0 for name, value in self.radicands.items()}


class QESState(BaseModel):
    """One exact eigenstate in factored form"""

    energy: complex
    prefactor_exponents: Tuple[float, float, float] = Field(..., description="Exponents of (sn, cn, dn)")
    extra_factor: Tuple[str, ...] = Field(default_factory=tuple, description="Factors whose exponent is reflected")
    bloch_base: Optional[str] = None
    bloch_exponent: Optional[float] = None
    primary_factor: Tuple[int, int, int] = (0, 0, 0)
    companion_factor: Tuple[int, int, int] = (0, 0, 0)
    poly_A: List[complex] = Field(default_factory=lambda: [1.0 + 0j])
    poly_B: List[complex] = Field(default_factory=list)
    period_class: str = ""
    provenance: str = ""
    realization: Optional[Tuple[float, float, float, float]] = None
    broken_pt: bool = False
    fit_quality: Optional[float] = None

    @field_validator("bloch_base")
    @classmethod
    def _known_base(cls, value):
        if value is not None and value not in BLOCH_BASES:
            raise ValueError(f"unknown Bloch base {value!r}")
        return value

    @property
    def bloch_factor(self) -> Optional[Tuple[str, float]]:
        if self.bloch_base is None:
            return None
        return (self.bloch_base, self.bloch_exponent)

    def as_record(self) -> Dict[str, object]:
        return {
            "energy_re": self.energy.real,
            "energy_im": self.energy.imag,
            "rho_sn": self.prefactor_exponents[0],
            "rho_cn": self.prefactor_exponents[1],
            "rho_dn": self.prefactor_exponents[2],
            "extra_factor": "*".join(self.extra_factor),
            "bloch_base": self.bloch_base or "",
            "t": self.bloch_exponent if self.bloch_exponent is not None else np.nan,
            "poly_A": " ".join(f"{c.real:.15g}{c.imag:+.15g}j" for c in self.poly_A),
            "poly_B": " ".join(f"{c.real:.15g}{c.imag:+.15g}j" for c in self.poly_B),
            "period_class": self.period_class,
            "provenance": self.provenance,
        }


class DiscriminantSample(BaseModel):
    """Floquet discriminant at one trial energy"""

    E: float
    delta: complex

    @property
    def is_edge_like(self) -> bool:
        return abs(abs(self.delta.real) - 2.0) < Config.TOL_DISC

    @property
    def broken_pt(self) -> bool:
        return abs(self.delta.imag) > Config.TOL_DISC


class BandStructure(BaseModel):
    """Band edges and band/gap intervals over a scanned energy window"""

    e_min: float
    e_max: float
    edges: List[float] = Field(default_factory=list)
    tangencies: List[float] = Field(default_factory=list, description="Closed gaps (double edges)")
    bands: List[Tuple[float, float]] = Field(default_factory=list)
    gaps: List[Tuple[float, float]] = Field(default_factory=list)
    gap_count: int = 0
    broken_pt: bool = False


class HeunParameters(BaseModel):
    """Canonical Heun parameters (alpha, beta, gamma, delta, epsilon, q, c)"""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex
    epsilon: complex
    q: complex
    c: float
    complex_exponents: bool = False

    @property
    def constraint_residual(self) -> float:
        """|gamma + delta + epsilon - (alpha + beta + 1)|"""
        return abs(self.gamma + self.delta + self.epsilon - self.alpha - self.beta - 1.0)

    def as_record(self) -> Dict[str, float]:
        record: Dict[str, float] = {}
        for name in ("alpha", "beta", "gamma", "delta", "epsilon", "q"):
            value = complex(getattr(self, name))
            record[f"{name}_re"] = value.real
            record[f"{name}_im"] = value.imag
        record["c"] = self.c
        return record


class PartnerProfile(BaseModel):
    """SUSY partner potential V+ = W^2 + W' sampled over one period"""

    grid: List[float]
    values: List[complex]
    superpotential: List[complex]
    superpotential_prime: List[complex]
    factorization_energy: complex
    period: float
    m: float
    beta: float
    constant_offset_convention: str = (
        "V+ = W^2 + W' with W = -psi'/psi; V- = W^2 - W' = V - E, so V+ + E is on the original energy scale"
    )


class IsospectralityReport(BaseModel):
    """Numerical comparison of two band-edge sets"""

    label_a: str
    label_b: str
    edges_a: List[float]
    edges_b: List[float]
    max_discrepancy: float
    tolerance: float
    agree: bool
    note: str = ""


class RunConfig(BaseModel):
    """Validated CLI configuration (JSON file plus flags)"""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    subcommand: Literal["eval", "bands", "catalog", "susy", "heun", "verify"]
    a: float = 0.0
    b: float = 0.0
    f: float = 0.0
    g: float = 0.0
    m: float = Field(0.5, gt=0.0, lt=1.0)
    beta: Optional[float] = None
    emin: Optional[float] = None
    emax: Optional[float] = None
    scan_points: Optional[int] = Field(None, ge=Config.SCAN_POINTS_MIN)
    grid: int = Field(Config.POTENTIAL_GRID, ge=8)
    rtol: float = Field(Config.ODE_RTOL, gt=0.0)
    atol: float = Field(Config.ODE_ATOL, gt=0.0)
    edge_tol: float = Field(Config.EDGE_TOL, gt=0.0)
    residual_tol: float = Field(1e-8, gt=0.0)
    state: Optional[int] = Field(None, ge=0, description="Index of the catalog state used by susy/heun")
    midband_case: Optional[Literal["b_half", "f_half", "g_half"]] = None
    t: float = 1.3
    n: int = Field(0, ge=0)
    split: int = Field(0, ge=0)
    level: float = 0.5
    suite: str = "all"
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    @field_validator("level")
    @classmethod
    def _level(cls, value):
        if value not in (0.5, 1.5):
            raise ValueError("level must be 0.5 or 1.5")
        return value

    @model_validator(mode="after")
    def _energy_window(self):
        if self.emin is not None and self.emax is not None and not self.emin < self.emax:
            raise ValueError("emin must be smaller than emax")
        if self.split > self.n:
            raise ValueError("split must not exceed n")
        return self

    def spec(self) -> GALSpec:
        return GALSpec(a=self.a, b=self.b, f=self.f, g=self.g, m=self.m, beta=self.beta)


class CriterionResult(BaseModel):
    """One row of the verification table"""

    id: int
    name: str
    passed: bool
    metric: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""
    elapsed: float = 0.0
