"""
Test Functions
Canonical compactly supported bumps, their affine images and derived
forms, closed-form derivatives and Mellin data
"""
import math
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.models import Estimate, HomogComponent, Parity, TestFamily
from core.config import settings
from core.exceptions import PreconditionError, SupportClassError
from core.logging_config import get_logger
from core.quad import integrate_compact, integrate_vertical, panel_nodes

logger = get_logger(__name__)

SQRT8 = 2.0 ** 1.5
# exp(-700) is the smallest factor kept before a value is treated as zero
UNDERFLOW = -700.0
MAX_ORDER = 4
# Plain functions nonzero at 0: the Mellin integral stops here and adds
# the constant-term correction below it
MELLIN_CUTOFF = 1e-12
MELLIN_CHUNK = 256
NODE_BLOCK = 8192


class TestFunction(BaseModel):
    """
    f(x) = A * x^power * (d/dx)^derivative B(scale * (x - shift))

    B is exp(-1/((z - lo)(hi - z))) on (lo, hi), multiplied by
    exp(-delta^2/(z - p)^2) for each flat point p of the flattened family.
    """
    __test__ = False
    model_config = ConfigDict(frozen=True)

    name: str = Field(default="f", description="Label used in reports")
    family: TestFamily = TestFamily.PLAIN_BUMP
    base_support: Tuple[float, float] = Field(..., description="(lo, hi) of the base bump")
    base_flat_points: Tuple[float, ...] = Field(default=(), description="Flat points of the base bump")
    flat_width: float = Field(default=1.0, gt=0.0, description="delta of the flatness factor")
    parity: Parity = Parity.NONE
    scale: float = 1.0
    shift: float = 0.0
    amplitude: Tuple[float, float] = (1.0, 0.0)
    derivative: int = Field(default=0, ge=0, le=2)
    power: int = 0

    @property
    def amp(self) -> complex:
        return complex(*self.amplitude)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == (0.0, 0.0)

    @property
    def is_real(self) -> bool:
        return self.amplitude[1] == 0.0

    @property
    def support(self) -> Tuple[float, float]:
        lo, hi = self.base_support
        ends = sorted((self.shift + lo / self.scale, self.shift + hi / self.scale))
        return ends[0], ends[1]

    @property
    def flat_points(self) -> Tuple[float, ...]:
        return tuple(sorted(self.shift + p / self.scale for p in self.base_flat_points))

    def _to_base(self, x: np.ndarray) -> np.ndarray:
        return self.scale * (x - self.shift)

    def __call__(self, x) -> np.ndarray:
        return eval_deriv(self, x, 0)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def canonical_v(flattened: bool = False, flat_width: Optional[float] = None) -> TestFunction:
    """Bump on (1, 2^(3/2)); the flattened family is also flat at x = 2"""
    if flat_width is None:
        flat_width = settings.FLAT_WIDTH
    return TestFunction(
        name="v",
        family=TestFamily.FLATTENED_BUMP if flattened else TestFamily.PLAIN_BUMP,
        base_support=(1.0, SQRT8),
        base_flat_points=(2.0,) if flattened else (),
        flat_width=flat_width,
    )


def canonical_u(flattened: bool = False, flat_width: Optional[float] = None) -> TestFunction:
    """Even bump on (-1, 1); the flattened family is also flat at y = 0"""
    if flat_width is None:
        flat_width = settings.FLAT_WIDTH
    return TestFunction(
        name="u",
        family=TestFamily.FLATTENED_BUMP if flattened else TestFamily.PLAIN_BUMP,
        base_support=(-1.0, 1.0),
        base_flat_points=(0.0,) if flattened else (),
        flat_width=flat_width,
        parity=Parity.EVEN,
    )


def zero_like(f: TestFunction) -> TestFunction:
    return f.model_copy(update={"amplitude": (0.0, 0.0)})


def scaled(f: TestFunction, alpha: complex) -> TestFunction:
    """alpha * f"""
    a = f.amp * complex(alpha)
    return f.model_copy(update={"amplitude": (a.real, a.imag)})


def translate(f: TestFunction, h: float) -> TestFunction:
    """x -> f(x - h)"""
    return f.model_copy(update={"shift": f.shift + h, "parity": Parity.NONE if h else f.parity})


def dilate(f: TestFunction, factor: float) -> TestFunction:
    """x -> f(factor * x); factor may be negative"""
    if factor == 0:
        raise PreconditionError("dilation factor must be nonzero")
    if f.power or f.derivative:
        raise PreconditionError("only plain bumps can be dilated")
    return f.model_copy(update={"scale": f.scale * factor, "shift": f.shift / factor})


def rescale_uQ(u: TestFunction, Q: float, eps: float) -> TestFunction:
    """u_Q(y) = Q^(eps/2) u(Q^eps y)"""
    if Q < 1:
        raise PreconditionError(f"need Q >= 1, got {Q}")
    if eps < 0:
        raise PreconditionError(f"need eps >= 0, got {eps}")
    if eps == 0:
        return u
    factor = float(Q) ** eps
    return scaled(dilate(u, factor), math.sqrt(factor))


def reflected(u: TestFunction) -> TestFunction:
    """y -> u(-y)"""
    return dilate(u, -1.0)


def differentiate(f: TestFunction, order: int = 1) -> TestFunction:
    """f' (or f'') of a function without a power factor"""
    if f.power:
        raise PreconditionError("differentiate a function before multiplying by x")
    if f.derivative + order > 2:
        raise PreconditionError(f"derivative order {f.derivative + order} unsupported")
    return f.model_copy(update={"derivative": f.derivative + order, "parity": Parity.NONE})


def times_power(f: TestFunction, power: int) -> TestFunction:
    """x -> x^power f(x)"""
    return f.model_copy(update={"power": f.power + power, "parity": Parity.NONE})


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _safe_point(lo: float, hi: float, flats: Tuple[float, ...]) -> float:
    for fraction in (0.381966, 0.618034, 0.291, 0.7):
        z = lo + fraction * (hi - lo)
        if all(z != p for p in flats):
            return z
    return 0.5 * (lo + hi)


def _phase_derivs(z: np.ndarray, lo: float, hi: float, flats, delta: float, upto: int) -> List[np.ndarray]:
    """Derivatives 0..upto of log B by partial fractions"""
    length = hi - lo
    d2 = delta * delta
    out = []
    for n in range(upto + 1):
        sign = -1.0 if n % 2 else 1.0
        term = -(math.factorial(n) / length) * (sign * (z - lo) ** (-n - 1) + (hi - z) ** (-n - 1))
        for p in flats:
            term = term - d2 * sign * math.factorial(n + 1) * (z - p) ** (-n - 2)
        out.append(term)
    return out


def base_derivs(f: TestFunction, z: np.ndarray, upto: int) -> List[np.ndarray]:
    """B, B', ..., B^(upto) at base coordinates z, exactly 0 off the support"""
    if upto > MAX_ORDER:
        raise PreconditionError(f"derivatives beyond order {MAX_ORDER} unsupported")
    lo, hi = f.base_support
    flats = f.base_flat_points
    z = np.asarray(z, dtype=np.float64)
    inside = (z > lo) & (z < hi)
    for p in flats:
        inside &= z != p
    safe = _safe_point(lo, hi, flats)
    zz = np.where(inside, z, safe)
    phase0 = _phase_derivs(zz, lo, hi, flats, f.flat_width, 0)[0]
    alive = inside & (phase0 > UNDERFLOW)
    zz = np.where(alive, z, safe)

    ph = _phase_derivs(zz, lo, hi, flats, f.flat_width, upto)
    F = np.where(alive, np.exp(ph[0]), 0.0)
    out = [F]
    if upto >= 1:
        p1 = ph[1]
        out.append(p1 * F)
    if upto >= 2:
        p2 = ph[2]
        out.append((p2 + p1 * p1) * F)
    if upto >= 3:
        p3 = ph[3]
        out.append((p3 + 3 * p1 * p2 + p1 ** 3) * F)
    if upto >= 4:
        p4 = ph[4]
        out.append((p4 + 4 * p1 * p3 + 3 * p2 * p2 + 6 * p1 * p1 * p2 + p1 ** 4) * F)
    return out


def eval_deriv(f: TestFunction, x, k: int = 0) -> np.ndarray:
    """
    k-th derivative of f at x (k <= 2), closed form

    Args:
        f: Test function
        x: Scalar or array
        k: Derivative order

    Returns:
        Real array, or complex when the amplitude is complex
    """
    if k not in (0, 1, 2):
        raise PreconditionError(f"derivative order {k} unsupported")
    x = np.asarray(x, dtype=np.float64)
    d = f.derivative
    a = f.scale
    B = base_derivs(f, f._to_base(x), d + k)
    total = np.zeros_like(x)
    P = f.power
    for i in range(k + 1):
        falling = 1.0
        for j in range(i):
            falling *= P - j
        if falling == 0.0:
            continue
        term = math.comb(k, i) * falling * a ** (d + k - i) * B[d + k - i]
        if P == i:
            total = total + term
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            product = term * np.power(x, float(P - i))
        total = total + np.where(term != 0.0, product, 0.0)
    if f.is_real:
        return f.amplitude[0] * total
    return f.amp * total


def inner(v: TestFunction, u: TestFunction) -> Estimate:
    """(v | u), the integral of conj(v) u"""
    lo = max(v.support[0], u.support[0])
    hi = min(v.support[1], u.support[1])
    if hi <= lo:
        return Estimate.of(0.0)
    return integrate_compact(lambda x: np.conj(v(x)) * u(x), (lo, hi), panels=8)


def require_support_class(v: TestFunction, u: TestFunction) -> None:
    """
    Reject pairs unless x > 0 and 0 <= x^2 - y^2 <= 8 on supp v x supp u

    Supports are open, so the closed bounds give the strict inequalities
    on the set where conj(v)(x) u(y) can be nonzero.

    Raises:
        SupportClassError: with the violated bound
    """
    (a, b), (c, d) = v.support, u.support
    y_max = max(c * c, d * d)
    y_min = 0.0 if c < 0.0 < d else min(c * c, d * d)
    if a < 0.0:
        raise SupportClassError(f"supp {v.name} = ({a}, {b}) reaches x <= 0")
    if a * a - y_max < -1e-12:
        raise SupportClassError(f"x^2 - y^2 < 0 on supp {v.name} x supp {u.name}")
    if b * b - y_min > 8.0 + 1e-12:
        raise SupportClassError(f"x^2 - y^2 > 8 on supp {v.name} x supp {u.name}")


def check_flatness(f: TestFunction) -> float:
    """Largest |f^(k)| (k <= 2) at the declared flat points and the support ends"""
    points = list(f.flat_points) + list(f.support)
    worst = 0.0
    for x0 in points:
        for k in (0, 1, 2):
            worst = max(worst, float(np.abs(eval_deriv(f, x0, k))))
    return worst


# ---------------------------------------------------------------------------
# Mellin data
# ---------------------------------------------------------------------------

def _mellin_window(u: TestFunction) -> Optional[Tuple[float, float, bool]]:
    """(r_lo, r_hi, needs_origin_term) for the positive part of supp u"""
    lo, hi = u.support
    if hi <= 0.0:
        return None
    if lo > 0.0:
        return lo, hi, False
    if 0.0 in u.flat_points:
        flat_gap = u.flat_width / (math.sqrt(-UNDERFLOW) * abs(u.scale))
        return flat_gap, hi, False
    if u.power < 0:
        raise PreconditionError("Mellin data of x^p u with p < 0 needs u flat at 0")
    return MELLIN_CUTOFF, hi, True


def mellin_c_values(u: TestFunction, mu) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized c(mu) = (1/2pi) * integral over r > 0 of r^(mu - 1/2) u(r) dr

    The integral runs in w = -log r on fixed panels sized by the chunk's
    largest |Im mu|; the order p and p/2 rules give the error.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.complex128))
    values = np.zeros(mu.shape, dtype=np.complex128)
    errs = np.zeros(mu.shape, dtype=np.float64)
    window = _mellin_window(u)
    if window is None or u.is_zero:
        return values, errs
    r_lo, r_hi, origin_term = window
    w_lo, w_hi = -math.log(r_hi), -math.log(r_lo)
    span = w_hi - w_lo
    order = settings.GL_ORDER

    heights = np.abs(mu.imag)
    sort = np.argsort(heights, kind="stable")
    for start in range(0, mu.size, MELLIN_CHUNK):
        idx = sort[start:start + MELLIN_CHUNK]
        panels = 8 + math.ceil(2.0 * span) + math.ceil(heights[idx].max() * span / (2 * math.pi))
        edges = np.linspace(w_lo, w_hi, panels + 1)
        chunk = mu[idx]
        estimates = []
        for n in (order, order // 2):
            w, weights = panel_nodes(edges[:-1], edges[1:], n)
            w, weights = w.ravel(), weights.ravel()
            g = u(np.exp(-w)) * weights
            acc = np.zeros(chunk.shape, dtype=np.complex128)
            for lo in range(0, w.size, NODE_BLOCK):
                block = slice(lo, lo + NODE_BLOCK)
                acc += np.exp(-np.outer(chunk + 0.5, w[block])) @ g[block]
            estimates.append(acc)
        values[idx] = estimates[0] / (2 * math.pi)
        errs[idx] = np.abs(estimates[0] - estimates[1]) / (2 * math.pi)

    if origin_term:
        u0 = complex(np.asarray(u(np.array([0.0])))[0])
        values += u0 * r_lo ** (mu + 0.5) / (mu + 0.5) / (2 * math.pi)
        errs += r_lo ** 2.5
    return values, errs + 1e-16 * np.abs(values)


def mellin_c(u: TestFunction, mu: complex) -> Estimate:
    """c(mu) for a single mu"""
    values, errs = mellin_c_values(u, [mu])
    return Estimate.of(values[0], errs[0])


def homog_component(u: TestFunction, mu: complex) -> HomogComponent:
    mu = complex(mu)
    return HomogComponent(mu_re=mu.real, mu_im=mu.imag, c=mellin_c(u, mu))


def mellin_reconstruct(
    u: TestFunction,
    y: float,
    T: Optional[float] = None,
    extend_to: Optional[float] = None,
    tol: Optional[float] = None,
) -> Estimate:
    """
    Integral of c(i lam) |y|^(-i lam - 1/2) over |lam| <= T

    This is (1/i) times the line integral of u^mu over Re mu = 0 and tends
    to u(|y|) as T grows.
    """
    if y == 0:
        raise PreconditionError("reconstruction at y = 0 is undefined")
    log_y = math.log(abs(y))

    def integrand(mu: np.ndarray) -> np.ndarray:
        c, _ = mellin_c_values(u, mu)
        return c * np.exp(-(mu + 0.5) * log_y)

    return integrate_vertical(integrand, 0.0, T, tol=tol, extend_to=extend_to)
