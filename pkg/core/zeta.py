"""
Zeta and Gamma
Euler-Maclaurin zeta, Lanczos gamma, local factors and the kernel f(theta)
"""
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import bernoulli

from app.models import Estimate, FactoredInt
from core.arith import as_factored, mobius, squarefree_divisors, squarefree_odd_array
from core.config import settings
from core.exceptions import ConsistencyError, PoleError, PreconditionError
from core.logging_config import get_logger
from core.quad import richardson_limit

logger = get_logger(__name__)

EPS = np.finfo(float).eps
MIN_TERMS = 30
CHUNK = 64

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Residue constant printed for the kernel f; reported next to the derived one
PRINTED_RESIDUE = 12.0 / math.pi ** 2


@lru_cache(maxsize=4)
def _bernoulli_coeffs(terms: int) -> np.ndarray:
    """B_{2k} / (2k)! for k = 1..terms"""
    b = bernoulli(2 * terms)
    return np.array([b[2 * k] / math.factorial(2 * k) for k in range(1, terms + 1)])


def _zeta_chunk(s: np.ndarray, N: int, terms: int) -> Tuple[np.ndarray, np.ndarray]:
    n = np.arange(1, N, dtype=np.float64)
    powers = np.exp(-np.outer(np.log(n), s))
    head = powers.sum(axis=0)
    magnitude = np.abs(powers).sum(axis=0)

    logN = math.log(N)
    NS = np.exp(-s * logN)
    value = head + N * NS / (s - 1.0) + 0.5 * NS

    coeffs = _bernoulli_coeffs(terms)
    rising = s.copy()
    power = NS / N
    term = np.zeros_like(s)
    for k in range(1, terms + 1):
        term = coeffs[k - 1] * rising * power
        value = value + term
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        power = power / (N * N)
    err = np.abs(term) + 8 * EPS * (magnitude + np.abs(N * NS / (s - 1.0)))
    return value, err


def zeta_values(s) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized Euler-Maclaurin zeta

    Args:
        s: Array of complex arguments, none equal to 1

    Returns:
        (values, error bounds)
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    terms = settings.ZETA_BERNOULLI_TERMS
    heights = np.abs(s.imag)
    sizes = np.maximum(MIN_TERMS, np.ceil(np.maximum(heights, 0.5 * np.abs(s)))).astype(np.int64)
    order = np.argsort(sizes, kind="stable")
    values = np.empty_like(s)
    errs = np.empty(s.shape, dtype=np.float64)
    for start in range(0, s.size, CHUNK):
        idx = order[start:start + CHUNK]
        N = int(sizes[idx].max())
        values[idx], errs[idx] = _zeta_chunk(s[idx], N, terms)

    outside = heights > settings.ZETA_HEIGHT_ENVELOPE
    if outside.any():
        logger.warning(
            "zeta evaluated outside accuracy envelope",
            extra={"max_height": float(heights.max()), "envelope": settings.ZETA_HEIGHT_ENVELOPE},
        )
        errs[outside] = errs[outside] * 1e4 + 1e-8 * np.abs(values[outside])
    return values, errs


def zeta_complex(s: complex) -> Estimate:
    """Riemann zeta at a single point"""
    values, errs = zeta_values([s])
    return Estimate.of(values[0], errs[0])


def gamma_values(s) -> np.ndarray:
    """Vectorized Lanczos gamma with reflection for Re s < 1/2"""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    poles = (s.imag == 0) & (s.real <= 0) & (s.real == np.round(s.real))
    if poles.any():
        raise PoleError(f"gamma has poles at {s[poles].real.tolist()}")
    reflect = s.real < 0.5
    z = np.where(reflect, 1.0 - s, s) - 1.0
    x = np.full_like(z, LANCZOS_COEFFS[0])
    for i, c in enumerate(LANCZOS_COEFFS[1:], start=1):
        x = x + c / (z + i)
    t = z + LANCZOS_G + 0.5
    values = np.exp(0.5 * math.log(2 * math.pi) + (z + 0.5) * np.log(t) - t) * x
    return np.where(reflect, np.pi / (np.sin(np.pi * s) * values), values)


def gamma_complex(s: complex) -> Estimate:
    value = complex(gamma_values([s])[0])
    return Estimate.of(value, 1e-13 * abs(value))


def zeta_star(s) -> np.ndarray:
    """pi^(-s/2) Gamma(s/2) zeta(s)"""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    values, _ = zeta_values(s)
    return np.exp(-0.5 * s * math.log(math.pi)) * gamma_values(0.5 * s) * values


def zeta_star_residual(s: complex) -> float:
    """|zeta*(s) - zeta*(1 - s)|"""
    both = zeta_star([s, 1.0 - complex(s)])
    return float(abs(both[0] - both[1]))


# ---------------------------------------------------------------------------
# Local factors
# ---------------------------------------------------------------------------

def zeta_N_inverse_values(s, N) -> np.ndarray:
    """
    Vectorized 1/zeta_N(s), the product of (1 - p^(-s)) over p | N

    The Moebius-sum form is computed alongside; disagreement raises.
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    f = as_factored(N)
    product = np.ones_like(s)
    for p, _ in f.factors:
        product = product * (1.0 - np.exp(-s * math.log(p)))
    total = np.zeros_like(s)
    scale = np.zeros(s.shape, dtype=np.float64)
    for T in squarefree_divisors(f):
        term = mobius(T) * np.exp(-s * math.log(T))
        total = total + term
        scale = scale + np.abs(term)
    gap = np.abs(product - total)
    if np.any(gap > 1e-13 * np.maximum(scale, 1.0)):
        raise ConsistencyError(f"product and Moebius forms of 1/zeta_{f.n} disagree by {gap.max():.3e}")
    return product


def zeta_N_inverse(s: complex, N) -> Estimate:
    """1/zeta_N(s) as a finite Euler product"""
    f: FactoredInt = as_factored(N)
    value = complex(zeta_N_inverse_values([s], f)[0])
    return Estimate.of(value, 4 * EPS * 2 ** len(f.factors) * max(1.0, abs(value)))


# ---------------------------------------------------------------------------
# The kernel f(theta)
# ---------------------------------------------------------------------------

def _two_factor(theta: np.ndarray, variant: str) -> np.ndarray:
    if variant == "plus":
        return 1.0 / (1.0 + np.exp(-theta * math.log(2)))
    if variant == "minus":
        return 1.0 / (1.0 - np.exp(-theta * math.log(2)))
    raise PreconditionError(f"unknown kernel variant {variant!r}")


def f_kernel_values(theta, variant: str = "plus") -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized (1 + 2^-theta)^-1 zeta(theta) / zeta(2 theta)

    The "minus" variant uses (1 - 2^-theta)^-1.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=np.complex128))
    if np.any(theta == 1.0) or np.any(theta == 0.5):
        raise PoleError("f has poles at theta = 1 and theta = 1/2")
    num, num_err = zeta_values(theta)
    den, den_err = zeta_values(2.0 * theta)
    factor = _two_factor(theta, variant)
    values = factor * num / den
    rel = num_err / np.maximum(np.abs(num), EPS) + den_err / np.maximum(np.abs(den), EPS)
    return values, np.abs(values) * rel


def f_kernel(theta: complex, variant: str = "plus") -> Estimate:
    values, errs = f_kernel_values([theta], variant)
    return Estimate.of(values[0], errs[0])


def f_residue_at_1(variant: str = "plus") -> Estimate:
    """lim (theta - 1) f(theta) as theta -> 1, by extrapolation in theta - 1"""
    steps = [0.1 / 2 ** k for k in range(5)]
    values, _ = f_kernel_values([1.0 + h for h in steps], variant)
    samples = [h * v for h, v in zip(steps, values)]
    return richardson_limit(steps, samples)


def sqfree_odd_dirichlet(theta: complex, X: int) -> Estimate:
    """
    Partial sum of Q^-theta over squarefree odd Q <= X

    The tail bound X^(1 - Re theta) / (Re theta - 1) is folded into err.
    """
    theta = complex(theta)
    if theta.real <= 1:
        raise PreconditionError(f"need Re theta > 1, got {theta}")
    if X < 1:
        raise PreconditionError(f"need X >= 1, got {X}")
    q = squarefree_odd_array(int(X)).astype(np.float64)
    terms = np.exp(-theta * np.log(q))
    value = complex(terms.sum())
    sigma = theta.real
    tail = float(X) ** (1.0 - sigma) / (sigma - 1.0)
    return Estimate.of(value, tail + 4 * EPS * q.size)
