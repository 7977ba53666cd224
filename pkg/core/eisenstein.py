"""
Eisenstein Pairings
<E_{-nu}, Wig(v, u)> by the defining lattice sum, by the one-dimensional
kernel over t + 1/t and through the Mellin components of u, with the
decomposition checks built on them
"""
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.models import Comparison, Estimate, LatticeSymbolSpec, PairingResult, PairingRoute, SymbolKind
from core.arith import as_factored
from core.config import settings
from core.exceptions import PreconditionError
from core.forms import lattice_form, t_n
from core.logging_config import get_logger
from core.quad import (
    ROUNDOFF,
    circle_mean,
    graded_edges,
    integrate_vertical,
    panel_nodes,
    richardson_limit,
    transform_panels,
)
from core.testfn import (
    TestFunction,
    differentiate,
    inner,
    mellin_c_values,
    require_support_class,
    scaled,
    times_power,
)
from core.wigner import WignerEvaluator
from core.zeta import zeta_N_inverse_values, zeta_values

logger = get_logger(__name__)

# Uniform panels added to every graded |x| or xi grid
GRID_PANELS = 16
GRADING_LEVELS = 30
# Largest w = -log|t - 1| kept near the singular point of the Phi integral
PHI_W_MAX = 400.0
PHI_PROBE = 4097


# ---------------------------------------------------------------------------
# Kernel route
# ---------------------------------------------------------------------------

def kernel_window(v: TestFunction, u: TestFunction) -> List[Tuple[float, float]]:
    """
    s-intervals (t = e^s) where 2cosh s lies in supp v and 2sinh s in supp u
    """
    (lo_v, hi_v), (lo_u, hi_u) = v.support, u.support
    if hi_v <= 2.0:
        return []
    a = math.acosh(max(lo_v, 2.0) / 2.0)
    b = math.acosh(hi_v / 2.0)
    band = [(-b, -a), (a, b)] if a > 0.0 else [(-b, b)]
    s_lo, s_hi = math.asinh(lo_u / 2.0), math.asinh(hi_u / 2.0)
    out = []
    for lo, hi in band:
        lo, hi = max(lo, s_lo), min(hi, s_hi)
        if hi > lo:
            out.append((lo, hi))
    return out


def kernel320_values(v: TestFunction, u: TestFunction, nu) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized integral of conj(v)(t + 1/t) t^(nu - 1) u(t - 1/t) over t > 0

    Computed as the integral of conj(v)(2cosh s) e^(nu s) u(2sinh s) over the
    compact s-window, so the value is entire in nu.

    Raises:
        SupportClassError: the pair is outside the class where this kernel
            equals the Eisenstein pairing
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=np.complex128))
    values = np.zeros(nu.shape, dtype=np.complex128)
    errs = np.zeros(nu.shape, dtype=np.float64)
    if v.is_zero or u.is_zero:
        return values, errs
    require_support_class(v, u)

    def amplitude(s: np.ndarray) -> np.ndarray:
        return np.conj(v(2.0 * np.cosh(s))) * u(2.0 * np.sinh(s))

    flat = nu.ravel()
    for lo, hi in kernel_window(v, u):
        part, part_err = transform_panels(amplitude, lambda s: s, lo, hi, flat, rates=[1.0])
        values += part.reshape(nu.shape)
        errs += part_err.reshape(nu.shape)
    return values, errs


def pairing_kernel320(v: TestFunction, u: TestFunction, nu: complex) -> Estimate:
    """(v | Psi(E_{-nu}) u) for a pair in the support class"""
    values, errs = kernel320_values(v, u, [complex(nu)])
    return Estimate.of(values[0], errs[0])


def kernel_circle_residual(
    v: TestFunction, u: TestFunction, nu: complex, radius: float = 0.1, nodes: int = 64
) -> float:
    """|K(nu) - mean of K over the circle |z - nu| = radius| for the kernel route"""
    center = pairing_kernel320(v, u, nu).value
    mean = circle_mean(lambda z: kernel320_values(v, u, z)[0], complex(nu), radius, nodes)
    return abs(center - mean)


# ---------------------------------------------------------------------------
# Defining lattice sum
# ---------------------------------------------------------------------------

def _support_reach(v: TestFunction, u: TestFunction) -> float:
    """Largest |t| with conj(v)(x + t) u(x - t) nonzero for some x"""
    (lo_v, hi_v), (lo_u, hi_u) = v.support, u.support
    return 0.5 * max(abs(hi_v - lo_u), abs(lo_v - hi_u))


def _abs_nodes(a: float, b: float, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes on [a, b]; graded toward 0 when a = 0"""
    edges = np.linspace(a, b, panels + 1)
    if a == 0.0:
        edges = np.union1d(edges, graded_edges(0.0, b, 0.0, levels=GRADING_LEVELS))
    x, w = panel_nodes(edges[:-1], edges[1:], order)
    return x.ravel(), w.ravel()


def _dirichlet_row(ev: WignerEvaluator, x: float, j: int, cuts: Sequence[float], order: int) -> np.ndarray:
    """
    Sum over |k| <= K of W(x, k|x|/j) for K = floor(cut * j / |x|), one value per cut

    The k-sum is the integral of g_x(t) D_K(t|x|/j) with the closed
    Dirichlet kernel D_K(theta) = sin((2K+1) pi theta) / sin(pi theta).
    """
    lo, hi = ev.t_window(x)
    out = np.zeros(len(cuts), dtype=np.complex128)
    if hi <= lo:
        return out
    ax = abs(x)
    panels = GRID_PANELS + math.ceil(2.0 * (hi - lo) * max(cuts))
    edges = np.linspace(lo, hi, panels + 1)
    t, w = panel_nodes(edges[:-1], edges[1:], order)
    t, w = t.ravel(), w.ravel()
    g = ev.integrand(x, t) * w
    theta = t * ax / j
    frac = theta - np.rint(theta)
    den = np.sin(np.pi * frac)
    safe = np.where(den == 0.0, 1.0, den)
    for i, cut in enumerate(cuts):
        width = 2 * math.floor(cut * j / ax) + 1
        kernel = np.where(den == 0.0, float(width), np.sin(width * np.pi * frac) / safe)
        out[i] = np.sum(g * kernel)
    return out


def _lattice_rows(
    ev: WignerEvaluator, nu: np.ndarray, rows: int, cuts: Sequence[float], order: int
) -> np.ndarray:
    """
    Rows 1 <= |j| <= rows of the defining sum, shape (len(cuts), len(nu))

    Row j is |j|^(-nu-1) times the integral of |x|^nu sum_k W(x, k|x|/|j|)
    over x of the sign of j.
    """
    x_lo, x_hi = ev.x_window
    total = np.zeros((len(cuts), nu.size), dtype=np.complex128)
    for side in (1.0, -1.0):
        a, b = (max(x_lo, 0.0), x_hi) if side > 0 else (max(-x_hi, 0.0), -x_lo)
        if b <= a:
            continue
        r, w = _abs_nodes(a, b, GRID_PANELS, order)
        powers = np.exp(np.outer(nu, np.log(r)))
        for j in range(1, rows + 1):
            sums = np.stack([_dirichlet_row(ev, side * ri, j, cuts, order) for ri in r], axis=1)
            if not np.any(sums):
                continue
            scale = np.exp(-(nu + 1.0) * math.log(j))
            total += scale[None, :] * ((sums * w[None, :]) @ powers.T)
    return total


def _diagonal_moment(v: TestFunction, u: TestFunction, nu: np.ndarray, order: int) -> np.ndarray:
    """Integral of |x|^(nu - 1) conj(v)(x) u(x) over x != 0"""
    lo = max(v.support[0], u.support[0])
    hi = min(v.support[1], u.support[1])
    total = np.zeros(nu.shape, dtype=np.complex128)
    if hi <= lo:
        return total
    for side in (1.0, -1.0):
        a, b = (max(lo, 0.0), hi) if side > 0 else (max(-hi, 0.0), -lo)
        if b <= a:
            continue
        r, w = _abs_nodes(a, b, GRID_PANELS, order)
        g = np.conj(v(side * r)) * u(side * r) * w
        total += np.exp(np.outer(nu - 1.0, np.log(r))) @ g
    return total


def _zero_row(ev: WignerEvaluator, nu: np.ndarray, cuts: Sequence[float], order: int) -> np.ndarray:
    """
    Sum over k != 0 of the ray integrals along (0, k t): zeta(nu + 1) times
    the integral of xi^nu (W(0, xi) + W(0, -xi)) over 0 < xi < cut
    """
    out = np.zeros((len(cuts), nu.size), dtype=np.complex128)
    lo, hi = ev.t_window(0.0)
    if hi <= lo:
        return out
    z, _ = zeta_values(nu + 1.0)
    for i, cut in enumerate(cuts):
        xi, w = _abs_nodes(0.0, cut, GRID_PANELS + math.ceil(2.0 * cut * (hi - lo)), order)
        both = ev.row(0.0, np.concatenate([xi, -xi]), order)
        g = (both[: xi.size] + both[xi.size:]) * w
        out[i] = z * (np.exp(np.outer(nu, np.log(xi))) @ g)
    return out


def pairing_def31_values(
    v: TestFunction,
    u: TestFunction,
    nu,
    j_cap: Optional[int] = None,
    xi_cut: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized defining sum over (j, k) != 0 of the integral of t^nu W(jt, kt) over t > 0

    Rows up to the support reach are summed exactly in k through a Dirichlet
    kernel cut at |xi| = xi_cut. Beyond the reach a row only keeps its
    diagonal term |j|^(-nu) times the integral of |x|^(nu - 1) conj(v) u,
    and those rows sum with zeta(nu). The error is the change when xi_cut
    is halved.

    Args:
        nu: Points with Re nu > 1
        j_cap: Explicit rows to sum (raised to the support reach)
        xi_cut: Frequency cutoff (default settings.XI_CUT)

    Raises:
        PreconditionError: some Re nu <= 1
    """
    if xi_cut is None:
        xi_cut = settings.XI_CUT
    nu = np.atleast_1d(np.asarray(nu, dtype=np.complex128)).ravel()
    if np.any(nu.real <= 1.0):
        raise PreconditionError("the defining sum needs Re nu > 1")
    values = np.zeros(nu.shape, dtype=np.complex128)
    errs = np.zeros(nu.shape, dtype=np.float64)
    if v.is_zero or u.is_zero:
        return values, errs

    order = settings.GL_ORDER
    ev = WignerEvaluator(v, u)
    x_lo, x_hi = ev.x_window
    rows = max(1, math.ceil(max(abs(x_lo), abs(x_hi)) * _support_reach(v, u)))
    if j_cap is not None:
        rows = max(rows, int(j_cap))
    cuts = (xi_cut, 0.5 * xi_cut)

    both = _lattice_rows(ev, nu, rows, cuts, order) + _zero_row(ev, nu, cuts, order)
    z, z_err = zeta_values(nu)
    head = sum(np.exp(-nu * math.log(j)) for j in range(1, rows + 1))
    moment = _diagonal_moment(v, u, nu, order)
    tail = (z - head) * moment
    logger.debug("defining sum rows", extra={"rows": rows, "xi_cut": xi_cut, "points": int(nu.size)})

    values = both[0] + tail
    errs = np.abs(both[0] - both[1]) + z_err * np.abs(moment) + ROUNDOFF * np.abs(values)
    return values, errs


def pairing_def31(
    v: TestFunction,
    u: TestFunction,
    nu: complex,
    j_cap: Optional[int] = None,
    xi_cut: Optional[float] = None,
) -> Estimate:
    """<E_{-nu}, Wig(v, u)> from the defining lattice sum, Re nu > 1"""
    values, errs = pairing_def31_values(v, u, [complex(nu)], j_cap, xi_cut)
    return Estimate.of(values[0], errs[0])


# ---------------------------------------------------------------------------
# Mellin route
# ---------------------------------------------------------------------------

def _phi_sides(v: TestFunction) -> List[Tuple[float, float, float]]:
    """
    (sign, w_far, w_near) with t = 1 + sign * e^(-w) sweeping the part of
    supp v(t + 1/t) on that side of t = 1; w_near is inf at t = 1
    """
    lo_v, hi_v = v.support
    if hi_v <= 2.0:
        return []

    def roots(X: float) -> Tuple[float, float]:
        r = math.sqrt(max(X * X - 4.0, 0.0))
        return 0.5 * (X - r), 0.5 * (X + r)

    near_lo, near_hi = roots(max(lo_v, 2.0))
    far_lo, far_hi = roots(hi_v)
    right = (1.0, -math.log(far_hi - 1.0), -math.log(near_hi - 1.0) if near_hi > 1.0 else math.inf)
    left = (-1.0, -math.log(1.0 - far_lo), -math.log(1.0 - near_lo) if near_lo < 1.0 else math.inf)
    return [right, left]


def _phi_t_values(v: TestFunction, nu: np.ndarray, mu: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Integral of t^(nu - 1) conj(v)(t + 1/t) |t - 1/t|^(-mu - 1/2) over t > 0"""
    values = np.zeros(nu.shape, dtype=np.complex128)
    errs = np.zeros(nu.shape, dtype=np.float64)
    gap = 0.5 - float(mu.real.max())
    w_cap = min(PHI_W_MAX, 40.0 / gap)
    params = np.stack([nu - 1.0, mu], axis=1)

    for sign, w_far, w_near in _phi_sides(v):
        open_end = math.isinf(w_near)
        w_near = min(w_near, w_cap)
        if w_near <= w_far:
            continue

        def geometry(w: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
            step = np.exp(-w)
            t = 1.0 + sign * step
            # log|t - 1/t| without cancellation near t = 1
            log_gap = -w + np.log(2.0 + sign * step) - np.log(t)
            return t, step, log_gap

        def amplitude(w: np.ndarray) -> np.ndarray:
            t, step, log_gap = geometry(w)
            return np.conj(v(t + 1.0 / t)) * np.exp(-0.5 * log_gap) * step

        def phases(w: np.ndarray) -> np.ndarray:
            t, _, log_gap = geometry(w)
            return np.stack([np.log(t), -log_gap])

        probe = np.linspace(w_far, w_near, PHI_PROBE)
        probe_t = 1.0 + sign * np.exp(-probe)
        alive = np.flatnonzero(v(probe_t + 1.0 / probe_t))
        if alive.size == 0:
            continue
        last = min(int(alive[-1]) + 1, PHI_PROBE - 1)
        w_hi = float(probe[last])
        part, part_err = transform_panels(amplitude, phases, w_far, w_hi, params)
        values += part
        errs += part_err
        if open_end and last == PHI_PROBE - 1:
            # plain v near t = 1: the integrand behaves like e^((Re mu - 1/2) w)
            peak = float(np.max(np.abs(v(np.array([2.0])))))
            errs += peak * math.exp(-gap * w_hi) / gap
    return values, errs


def phi_values(v: TestFunction, u: TestFunction, nu, mu) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized Phi(v, u; nu, mu) = c(mu) times the t-integral of
    t^(nu - 1) conj(v)(t + 1/t) |t - 1/t|^(-mu - 1/2)

    nu and mu broadcast against each other. The t-integral is split at
    t = 1 and runs in w = -log|t - 1| on each side.

    Raises:
        PreconditionError: some Re mu >= 1/2
    """
    nu, mu = np.broadcast_arrays(
        np.atleast_1d(np.asarray(nu, dtype=np.complex128)),
        np.atleast_1d(np.asarray(mu, dtype=np.complex128)),
    )
    shape = nu.shape
    nu, mu = nu.ravel().copy(), mu.ravel().copy()
    if np.any(mu.real >= 0.5):
        raise PreconditionError("Phi is evaluated directly only for Re mu < 1/2")
    if v.is_zero or u.is_zero:
        return np.zeros(shape, dtype=np.complex128), np.zeros(shape, dtype=np.float64)
    c, c_err = mellin_c_values(u, mu)
    J, J_err = _phi_t_values(v, nu, mu)
    values = c * J
    errs = np.abs(c) * J_err + c_err * np.abs(J)
    return values.reshape(shape), errs.reshape(shape)


def phi(v: TestFunction, u: TestFunction, nu: complex, mu: complex) -> Estimate:
    """Phi(v, u; nu, mu) at one point"""
    values, errs = phi_values(v, u, [complex(nu)], [complex(mu)])
    return Estimate.of(values[0], errs[0])


def pairing_mellin910(
    v: TestFunction,
    u: TestFunction,
    nu: complex,
    T: Optional[float] = None,
    tol: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> Estimate:
    """(1/i) times the integral of Phi(v, u; nu, mu) over Re mu = 0"""
    nu = complex(nu)
    return integrate_vertical(
        lambda mu: phi_values(v, u, nu, mu)[0], 0.0, T, tol=tol, extend_to=extend_to
    )


def pairing(v: TestFunction, u: TestFunction, nu: complex, route: PairingRoute = PairingRoute.KERNEL320) -> PairingResult:
    """<E_{-nu}, Wig(v, u)> along one route"""
    route = PairingRoute(route)
    nu = complex(nu)
    if route == PairingRoute.DEF31:
        value = pairing_def31(v, u, nu)
    elif route == PairingRoute.KERNEL320:
        value = pairing_kernel320(v, u, nu)
    else:
        value = pairing_mellin910(v, u, nu)
    return PairingResult(nu=(nu.real, nu.imag), value=value, route=route)


# ---------------------------------------------------------------------------
# Checks and reports
# ---------------------------------------------------------------------------

def recursion_914_report(v: TestFunction, u: TestFunction, nu: complex, mu: complex) -> Dict[str, Any]:
    """
    (1/2 + nu^2) Phi(v, u; nu, mu) against the sum over j = -1, 0, 1 of
    Phi(D_j v, y^(-2j) u; nu, mu + 2j), with the operators as printed:
    D_-1 v = v'', D_0 v = -2 mu (x v' + v/2), D_1 v = (1/2 + conj mu)(3/2 + conj mu) x^2 v

    A diagnostic: both sides and the relative residual are returned, no
    tolerance is applied.

    Raises:
        PreconditionError: Re mu + 2 >= 1/2, or u not flat at 0
    """
    nu, mu = complex(nu), complex(mu)
    if mu.real + 2.0 >= 0.5:
        raise PreconditionError("every shifted mu + 2j needs real part below 1/2")
    left = phi(v, u, nu, mu).scaled(0.5 + nu * nu)
    mb = mu.conjugate()
    terms = [
        phi(differentiate(v, 2), times_power(u, 2), nu, mu - 2.0),
        phi(scaled(times_power(differentiate(v), 1), -2.0 * mu), u, nu, mu),
        phi(scaled(v, -mu), u, nu, mu),
        phi(scaled(times_power(v, 2), (0.5 + mb) * (1.5 + mb)), times_power(u, -2), nu, mu + 2.0),
    ]
    right = terms[0]
    for term in terms[1:]:
        right = right + term
    result = Comparison(left=left, right=right)
    return {"left": left, "right": right, "residual": result.residual, "relative": result.relative}


def comb_decomp_check(
    v: TestFunction,
    u: TestFunction,
    c: Optional[float] = None,
    T: Optional[float] = None,
    N=None,
    tol: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> Comparison:
    """
    Line integral of weight(nu) K(nu) over Re nu = c against
    2 pi times the sum over (j, k) != 0 of b(j, k) W(v, u)(j, k)

    Without N the weight is 1 and b = 1 (the Dirac comb); with N the weight
    is 1/zeta_N(nu) and b(j, k) = a(gcd(j, k, N)).
    """
    if c is None:
        c = settings.CONTOUR_C
    if c <= 1.0:
        raise PreconditionError(f"need c > 1, got {c}")
    if v.is_zero or u.is_zero:
        return Comparison(left=Estimate.of(0.0), right=Estimate.of(0.0))
    require_support_class(v, u)
    if N is None:
        spec = LatticeSymbolSpec(kind=SymbolKind.DIRAC_COMB)

        def weight(nu: np.ndarray) -> np.ndarray:
            return np.ones(nu.shape, dtype=np.complex128)
    else:
        level = as_factored(N)
        spec = t_n(level, include_origin=False)

        def weight(nu: np.ndarray) -> np.ndarray:
            return zeta_N_inverse_values(nu, level)

    def integrand(nu: np.ndarray) -> np.ndarray:
        values, _ = kernel320_values(v, u, nu)
        return weight(nu) * values

    left = integrate_vertical(integrand, c, T, tol=tol, extend_to=extend_to)
    right = lattice_form(v, u, spec, 1).scaled(2.0 * math.pi)
    return Comparison(left=left, right=right)


def residue_check_32(v: TestFunction, u: TestFunction, steps: Optional[Sequence[float]] = None) -> Comparison:
    """
    Extrapolated limit of (nu - 1) <E_{-nu}, Wig(v, u)> as nu -> 1+ against
    the integral of conj(v) u
    """
    if steps is None:
        steps = [0.1 / 2 ** k for k in range(4)]
    steps = [float(h) for h in steps]
    values, errs = pairing_def31_values(v, u, [1.0 + h for h in steps])
    limit = richardson_limit(steps, [h * value for h, value in zip(steps, values)])
    limit = Estimate.of(limit.value, limit.err + max(h * e for h, e in zip(steps, errs)))
    return Comparison(left=limit, right=inner(v, u))
