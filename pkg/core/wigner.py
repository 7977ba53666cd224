"""
Wigner Transforms
Wig(v, u)(x, xi) = integral of conj(v)(x + t) u(x - t) exp(2i pi xi t) dt
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.models import Estimate, PanelRule
from core.config import settings
from core.logging_config import get_logger
from core.quad import composite_nodes, integrate_compact
from core.testfn import TestFunction, differentiate, reflected, times_power

logger = get_logger(__name__)

# Fixed-rule panels for finite differences of W
FD_PANELS = 32
# Coarse grid for the symplectic Fourier check
SYMP_ORDER = 12
SYMP_HEIGHT = 12.0


class WignerEvaluator:
    """Wigner transform of a fixed pair (v, u)"""

    def __init__(self, v: TestFunction, u: TestFunction, rule: Optional[PanelRule] = None):
        self.v = v
        self.u = u
        self.rule = rule

    @property
    def x_window(self) -> Tuple[float, float]:
        """W(x, .) vanishes outside this interval"""
        (lo_v, hi_v), (lo_u, hi_u) = self.v.support, self.u.support
        return 0.5 * (lo_v + lo_u), 0.5 * (hi_v + hi_u)

    def t_window(self, x: float) -> Tuple[float, float]:
        """t-interval where conj(v)(x + t) u(x - t) can be nonzero"""
        (lo_v, hi_v), (lo_u, hi_u) = self.v.support, self.u.support
        return max(lo_v - x, x - hi_u), min(hi_v - x, x - lo_u)

    def integrand(self, x, t: np.ndarray) -> np.ndarray:
        return np.conj(self.v(x + t)) * self.u(x - t)

    def wig(self, x: float, xi: float) -> Estimate:
        """Adaptive evaluation at one point"""
        lo, hi = self.t_window(x)
        if hi <= lo or self.v.is_zero or self.u.is_zero:
            return Estimate.of(0.0)
        panels = 4 + math.ceil(2.0 * (hi - lo) * abs(xi))
        phase = 2j * math.pi * xi
        return integrate_compact(
            lambda t: self.integrand(x, t) * np.exp(phase * t), (lo, hi), self.rule, panels
        )

    def wig_fixed(self, x: float, xi: float, panels: int = FD_PANELS) -> complex:
        """Fixed composite rule; smooth in (x, xi) for finite differences"""
        lo, hi = self.t_window(x)
        if hi <= lo:
            return 0j
        t, w = composite_nodes(lo, hi, panels + math.ceil(2.0 * (hi - lo) * abs(xi)))
        return complex(np.sum(self.integrand(x, t) * np.exp(2j * math.pi * xi * t) * w))

    def row(self, x: float, xis: np.ndarray, order: int = 0) -> np.ndarray:
        """W(x, xi) for an array of xi on one shared t-grid"""
        xis = np.asarray(xis, dtype=np.float64)
        lo, hi = self.t_window(x)
        if hi <= lo or xis.size == 0:
            return np.zeros(xis.shape, dtype=np.complex128)
        panels = 8 + math.ceil(2.0 * (hi - lo) * float(np.max(np.abs(xis))))
        t, w = composite_nodes(lo, hi, panels, order or settings.GL_ORDER)
        g = self.integrand(x, t) * w
        out = np.empty(xis.shape, dtype=np.complex128)
        block = max(1, 4_000_000 // t.size)
        for start in range(0, xis.size, block):
            part = xis[start:start + block]
            out[start:start + block] = np.exp(2j * math.pi * np.outer(part, t)) @ g
        return out


def wig(v: TestFunction, u: TestFunction, x: float, xi: float) -> Estimate:
    """Wig(v, u)(x, xi)"""
    return WignerEvaluator(v, u).wig(x, xi)


def wig_marginal_check(
    v: TestFunction,
    u: TestFunction,
    x: float,
    tol: Optional[float] = None,
    start: float = 8.0,
    max_cut: float = 1024.0,
) -> Estimate:
    """
    Integrate W(x, .) over [-Xi, Xi], doubling Xi until the last doubling
    changes the result by less than tol/4, and compare with conj(v)(x) u(x)

    Returns:
        Estimate whose value is the residual and whose err is the last change
    """
    if tol is None:
        tol = settings.TOL
    ev = WignerEvaluator(v, u)
    target = complex(np.conj(v(x)) * u(x))
    lo, hi = ev.t_window(x)
    if hi <= lo:
        return Estimate.of(-target)

    def band(a: float, b: float) -> complex:
        panels = 8 + math.ceil((b - a) * (hi - lo))
        xi, w = composite_nodes(a, b, panels)
        both = ev.row(x, np.concatenate([xi, -xi]))
        return complex(np.sum((both[: xi.size] + both[xi.size:]) * w))

    cut = start
    total = band(0.0, cut)
    change = math.inf
    while change >= tol / 4 and cut < max_cut:
        piece = band(cut, 2 * cut)
        total += piece
        change = abs(piece)
        cut *= 2
    logger.debug("marginal cut", extra={"x": x, "cut": cut, "last_change": change})
    return Estimate.of(total - target, change)


def euler_apply_check(v: TestFunction, u: TestFunction, x: float, xi: float, h: float = 1e-3) -> float:
    """
    |(1 + x d/dx + xi d/dxi) W(v, u) - W(v', x u) - W(x v, u')| at (x, xi)

    The left side uses fourth-order central differences with step h.
    """
    ev = WignerEvaluator(v, u)
    W = ev.wig_fixed

    def d4(f, a: float) -> complex:
        return (-f(a + 2 * h) + 8 * f(a + h) - 8 * f(a - h) + f(a - 2 * h)) / (12 * h)

    dx = d4(lambda s: W(s, xi), x)
    dxi = d4(lambda s: W(x, s), xi)
    left = W(x, xi) + x * dx + xi * dxi

    first = WignerEvaluator(differentiate(v), times_power(u, 1)).wig_fixed(x, xi)
    second = WignerEvaluator(times_power(v, 1), differentiate(u)).wig_fixed(x, xi)
    return abs(left - (first + second))


def euler_apply_convergence(
    v: TestFunction, u: TestFunction, x: float, xi: float, h: float = 1e-2
) -> Tuple[List[float], float]:
    """Residuals at steps h and h/2 and the observed order log2 of their ratio"""
    residuals = [euler_apply_check(v, u, x, xi, h), euler_apply_check(v, u, x, xi, h / 2)]
    if residuals[1] == 0.0:
        return residuals, math.inf
    return residuals, math.log2(residuals[0] / residuals[1])


def symp_fourier_check(
    v: TestFunction,
    u: TestFunction,
    points: Sequence[Tuple[float, float]],
    height: float = SYMP_HEIGHT,
) -> float:
    """
    Largest |F_symp W(v, u)(x, xi) - W(v, u_check)(-x, -xi)| over the points

    F_symp S(x, xi) is the integral of S(y, eta) exp(2i pi (x eta - y xi));
    the 2D integral runs on a coarse grid with |eta| <= height. The
    reflected argument on the right is the pointwise form of the pairing
    identity <F_symp S, W(v, u)> = <S, W(v, u_check)>.
    """
    if v.is_zero or u.is_zero:
        return 0.0
    ev = WignerEvaluator(v, u)
    y_lo, y_hi = ev.x_window
    y, wy = composite_nodes(y_lo, y_hi, 8, SYMP_ORDER)
    reach = max(abs(x) for x, _ in points) + 0.5 * (y_hi - y_lo)
    eta, weta = composite_nodes(-height, height, 8 + math.ceil(2 * height * reach), SYMP_ORDER)

    grid = np.stack([ev.row(float(yk), eta, SYMP_ORDER) for yk in y])
    checker = WignerEvaluator(v, reflected(u))
    worst = 0.0
    for x, xi in points:
        phase = np.exp(2j * math.pi * (x * eta[None, :] - y[:, None] * xi))
        value = complex(np.sum(grid * phase * wy[:, None] * weta[None, :]))
        worst = max(worst, abs(value - checker.wig_fixed(-x, -xi)))
    return worst
