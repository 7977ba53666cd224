"""
Pydantic Models for Domain Types, API Requests and Responses
"""
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SymbolKind(str, Enum):
    """Lattice symbol family"""
    T_N = "T_N"
    T_INF = "T_inf"
    T_INF_OVER_2 = "T_inf_over_2"
    DIRAC_COMB = "DiracComb"
    DIRAC_COMB_FULL = "DiracCombFull"


class PairingRoute(str, Enum):
    """Route used to evaluate an Eisenstein pairing"""
    DEF31 = "def31"
    KERNEL320 = "kernel320"
    MELLIN910 = "mellin910"


class TestFamily(str, Enum):
    """Canonical test-function family"""
    __test__ = False

    PLAIN_BUMP = "plain_bump"
    FLATTENED_BUMP = "flattened_bump"


class Parity(str, Enum):
    """Declared parity of a test function"""
    EVEN = "even"
    NONE = "none"


class OutputFormat(str, Enum):
    """Report serialization format"""
    JSON = "json"
    CSV = "csv"


class CheckStatus(str, Enum):
    """Outcome of one check"""
    PASS = "pass"
    FAIL = "fail"
    REPORT = "report"


# ---------------------------------------------------------------------------
# Numerical values
# ---------------------------------------------------------------------------

class Estimate(BaseModel):
    """Complex value with an absolute error bound"""
    model_config = ConfigDict(frozen=True)

    re: float = Field(..., description="Real part")
    im: float = Field(default=0.0, description="Imaginary part")
    err: float = Field(default=0.0, ge=0.0, description="Absolute error bound")

    @classmethod
    def of(cls, value: complex, err: float = 0.0) -> "Estimate":
        value = complex(value)
        return cls(re=value.real, im=value.imag, err=float(err))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def abs(self) -> float:
        return math.hypot(self.re, self.im)

    def as_pair(self) -> List[float]:
        return [self.re, self.im]

    def conj(self) -> "Estimate":
        return Estimate(re=self.re, im=-self.im, err=self.err)

    def scaled(self, factor: complex, err: float = 0.0) -> "Estimate":
        """Multiply by an (approximately) known factor"""
        factor = complex(factor)
        return Estimate.of(self.value * factor, self.err * abs(factor) + err * self.abs())

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate.of(self.value + other.value, self.err + other.err)

    def __sub__(self, other: "Estimate") -> "Estimate":
        return Estimate.of(self.value - other.value, self.err + other.err)

    def __mul__(self, other: "Estimate") -> "Estimate":
        return Estimate.of(
            self.value * other.value,
            self.err * other.abs() + other.err * self.abs() + self.err * other.err,
        )

    def agrees_with(self, other: "Estimate", rel_tol: float = 0.0, abs_tol: float = 0.0) -> bool:
        """True when the two values differ by less than the combined bounds"""
        gap = abs(self.value - other.value)
        scale = max(self.abs(), other.abs())
        return gap <= self.err + other.err + abs_tol + rel_tol * scale


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

class FactoredInt(BaseModel):
    """Positive integer with its canonical factorization"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="The integer")
    factors: Tuple[Tuple[int, int], ...] = Field(
        default=(), description="(prime, exponent) pairs in increasing prime order"
    )

    @model_validator(mode="after")
    def _check_product(self) -> "FactoredInt":
        product = 1
        previous = 1
        for p, e in self.factors:
            if p <= previous or e < 1:
                raise ValueError(f"factors of {self.n} not canonical: {self.factors}")
            previous = p
            product *= p ** e
        if product != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")
        return self

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def is_odd(self) -> bool:
        return self.n % 2 == 1

    def __int__(self) -> int:
        return self.n


class ResidueClass(BaseModel):
    """Residue class value mod modulus"""
    model_config = ConfigDict(frozen=True)

    modulus: int = Field(..., ge=1, description="Modulus")
    value: int = Field(..., description="Representative in [0, modulus)")

    @model_validator(mode="after")
    def _check_range(self) -> "ResidueClass":
        if not 0 <= self.value < self.modulus:
            raise ValueError(f"{self.value} not reduced mod {self.modulus}")
        return self

    @classmethod
    def reduce(cls, value: int, modulus: int) -> "ResidueClass":
        return cls(modulus=modulus, value=value % modulus)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

class PanelRule(BaseModel):
    """Composite Gauss-Legendre rule settings"""
    model_config = ConfigDict(frozen=True)

    order: int = Field(default=32, ge=8, le=64, description="Nodes per panel")
    rel_tol: float = Field(default=1e-10, gt=0.0, description="Relative tolerance")
    abs_tol: float = Field(default=1e-15, gt=0.0, description="Absolute tolerance")
    max_panels: int = Field(default=20_000, ge=1, description="Panel cap")


class Contour(BaseModel):
    """Symmetric vertical segment Re = real_part, |Im| <= height"""
    model_config = ConfigDict(frozen=True)

    real_part: float = Field(..., description="Abscissa of the line")
    height: float = Field(..., gt=0.0, description="Half height T")
    panel_width: float = Field(default=4.0, gt=0.0, description="Initial panel width")


# ---------------------------------------------------------------------------
# Hermitian forms
# ---------------------------------------------------------------------------

class LatticeSymbolSpec(BaseModel):
    """Coefficient rule (j, k) -> b(j, k) of a lattice-supported symbol"""
    model_config = ConfigDict(frozen=True)

    kind: SymbolKind = Field(..., description="Symbol family")
    N: Optional[FactoredInt] = Field(default=None, description="Level, for T_N only")
    include_origin: bool = Field(default=True, description="Keep the (0,0) coefficient")

    @model_validator(mode="after")
    def _check_level(self) -> "LatticeSymbolSpec":
        if self.kind == SymbolKind.T_N and self.N is None:
            raise ValueError("T_N requires N")
        if self.kind == SymbolKind.T_N and not self.N.is_squarefree:
            raise ValueError(f"T_N requires squarefree N, got {self.N.n}")
        return self


class FormConfig(BaseModel):
    """Parameters of one hermitian-form evaluation"""
    model_config = ConfigDict(frozen=True)

    R: FactoredInt
    Q: FactoredInt
    beta: float = Field(default=(1.0 + 2.0 ** 1.5) / 2.0, gt=0.0)
    eps: float = Field(default=0.0, ge=0.0)
    tol: float = Field(default=1e-8, gt=0.0)
    k_cap: int = Field(default=2 ** 20, ge=1)

    @property
    def N(self) -> int:
        return self.R.n * self.Q.n


class CoeffTable(BaseModel):
    """Sparse integer table c_{R,Q}(m, n) over (Z/2N^2)^2"""
    R: int
    Q: int
    N: int
    entries: Dict[Tuple[int, int], int] = Field(
        default_factory=dict, description="Nonzero entries keyed by (m, n)"
    )

    @property
    def modulus(self) -> int:
        return 2 * self.N * self.N

    def get(self, m: int, n: int) -> int:
        M = self.modulus
        return self.entries.get((m % M, n % M), 0)

    def rows(self) -> List[Tuple[int, int, int]]:
        return [(m, n, c) for (m, n), c in sorted(self.entries.items())]


class ThetaVector(BaseModel):
    """Periodization of a line function onto Z/2N^2"""
    N: int
    values: Dict[int, float] = Field(default_factory=dict, description="Nonzero values by n mod 2N^2")

    @property
    def period(self) -> int:
        return 2 * self.N * self.N

    def __getitem__(self, n: int) -> float:
        return self.values.get(n % self.period, 0.0)


class HomogComponent(BaseModel):
    """u^mu(y) = c(mu) |y|^(-mu-1/2)"""
    model_config = ConfigDict(frozen=True)

    mu_re: float
    mu_im: float = 0.0
    c: Estimate

    @property
    def mu(self) -> complex:
        return complex(self.mu_re, self.mu_im)

    def __call__(self, y: float) -> complex:
        return self.c.value * abs(y) ** (-self.mu - 0.5)


class Comparison(BaseModel):
    """Two independently computed sides of an identity"""
    model_config = ConfigDict(frozen=True)

    left: Estimate
    right: Estimate

    @property
    def residual(self) -> float:
        return abs(self.left.value - self.right.value)

    @property
    def relative(self) -> float:
        """Residual over max(1, |left|, |right|)"""
        return self.residual / max(1.0, self.left.abs(), self.right.abs())

    @property
    def err(self) -> float:
        return self.left.err + self.right.err


class PairingResult(BaseModel):
    """Value of <E_{-nu}, Wig(v, u)> along one route"""
    nu: Tuple[float, float]
    value: Estimate
    route: PairingRoute


class GrowthFit(BaseModel):
    """Least-squares exponent of |value| against Q"""
    exponent: float = Field(..., description="Slope of log|value| against log Q")
    intercept: float = Field(..., description="log of the fitted constant")
    stderr: float = Field(..., ge=0.0, description="Standard error of the slope")
    r_squared: float = Field(..., description="Coefficient of determination")
    points: int = Field(..., ge=0, description="Nonzero values used")
    zeros_excluded: int = Field(default=0, ge=0, description="Zero values dropped before the fit")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class CheckResult(BaseModel):
    """Outcome of a single identity check"""
    name: str
    status: CheckStatus
    residual: Optional[float] = None
    tolerance: Optional[float] = None
    detail: Dict[str, Any] = Field(default_factory=dict)


class RunReport(BaseModel):
    """Machine-readable record of one run"""
    command: str = Field(..., description="Subcommand, e.g. 'verify thm72'")
    parameters: Dict[str, Any] = Field(default_factory=dict)
    values: Dict[str, List[float]] = Field(default_factory=dict, description="Complex values as [re, im]")
    errors: Dict[str, float] = Field(default_factory=dict, description="Absolute error bounds")
    checks: List[CheckResult] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict, description="Effective settings")
    seed: int = 0
    wall_time_s: Optional[float] = Field(default=None, description="Omitted from deterministic output")

    @property
    def passed(self) -> bool:
        return all(c.status != CheckStatus.FAIL for c in self.checks)

    def add_value(self, name: str, estimate: Estimate) -> None:
        self.values[name] = estimate.as_pair()
        self.errors[name] = estimate.err


# ---------------------------------------------------------------------------
# API
# ---------------------------------------------------------------------------

class VerifyRequest(BaseModel):
    """Body of verify, report and compute calls"""
    params: Dict[str, Any] = Field(default_factory=dict, description="Check parameters, e.g. {'R': 5, 'Q': 3}")
    overrides: Dict[str, Any] = Field(default_factory=dict, description="Settings overrides, e.g. {'tol': 1e-6}")
    flattened: bool = Field(default=False, description="Use the flattened test-function pair")


class ComputeRequest(VerifyRequest):
    """Compute request"""


class HealthResponse(BaseModel):
    """Health check response"""
    status: str
    services: Dict[str, bool]
    version: str
