"""
Dirichlet Series over Squarefree Odd Levels
F_0 and F_eps as series and as line integrals, the kernel H_eps, the
residue terms G_eps and G_0, and the growth fit of dilated forms
"""
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from app.models import Comparison, Estimate, GrowthFit, LatticeSymbolSpec, SymbolKind
from core.arith import require_squarefree_odd, squarefree_odd_array
from core.config import settings
from core.eisenstein import kernel320_values, pairing_mellin910, phi_values
from core.exceptions import PreconditionError
from core.forms import arithmetic_side, lattice_form
from core.logging_config import get_logger
from core.quad import integrate_vertical
from core.testfn import TestFunction, rescale_uQ
from core.zeta import f_kernel_values, f_residue_at_1, zeta_values

logger = get_logger(__name__)

# Density of squarefree odd integers
SQFREE_ODD_DENSITY = 4.0 / math.pi ** 2
DEFAULT_X = 41
# Largest level summed by the Dirichlet route of H_eps
H_DIRICHLET_CAP = 1 << 14
MIN_FIT_POINTS = 8
# |zeta| below this on an integration line is treated as a zero
ZERO_GUARD = 1e-6

HALF_INF = LatticeSymbolSpec(kind=SymbolKind.T_INF_OVER_2)
FULL_INF = LatticeSymbolSpec(kind=SymbolKind.T_INF)


# ---------------------------------------------------------------------------
# Growth fit
# ---------------------------------------------------------------------------

def fit_exponent(qs: Sequence[float], values: Sequence[complex]) -> GrowthFit:
    """
    Least-squares slope of log|value| against log Q, zeros excluded

    Raises:
        PreconditionError: fewer than three nonzero values
    """
    q = np.asarray(qs, dtype=np.float64)
    mags = np.abs(np.asarray(values, dtype=np.complex128))
    keep = mags > 0.0
    if keep.sum() < 3:
        raise PreconditionError("growth fit needs at least three nonzero values")
    fit = stats.linregress(np.log(q[keep]), np.log(mags[keep]))
    return GrowthFit(
        exponent=float(fit.slope),
        intercept=float(fit.intercept),
        stderr=float(fit.stderr),
        r_squared=float(fit.rvalue ** 2),
        points=int(keep.sum()),
        zeros_excluded=int((~keep).sum()),
    )


def growth_fit(
    v: TestFunction,
    u: TestFunction,
    Q_range: Sequence[int],
    spec: Optional[LatticeSymbolSpec] = None,
) -> Tuple[GrowthFit, List[Tuple[int, Estimate]]]:
    """
    Exponent of Q -> |(v | Psi(Q^{2i pi E} S) u)| over squarefree Q (S = T_inf by default)

    Exploratory; no pass/fail is attached.

    Returns:
        (fit, [(Q, value)])
    """
    if spec is None:
        spec = FULL_INF
    levels = [require_squarefree_odd(Q, "Q").n for Q in Q_range]
    if len(levels) < MIN_FIT_POINTS:
        raise PreconditionError(f"growth fit needs at least {MIN_FIT_POINTS} levels, got {len(levels)}")
    data = [(Q, lattice_form(v, u, spec, Q, method="poisson")) for Q in levels]
    fit = fit_exponent([Q for Q, _ in data], [e.value for _, e in data])
    logger.debug("growth fit", extra={"exponent": fit.exponent, "points": fit.points})
    return fit, data


# ---------------------------------------------------------------------------
# Series
# ---------------------------------------------------------------------------

def _tail_bound(qs: np.ndarray, mags: np.ndarray, sigma: float, X: int, exponent: Optional[float] = None) -> float:
    """
    Bound for the sum over squarefree odd Q > X of Q^-sigma |term(Q)|

    Terms are modelled as C Q^alpha, alpha from the fit when enough nonzero
    terms exist (1 otherwise), C the largest |term| Q^-alpha seen.
    """
    nonzero = mags > 0.0
    if not nonzero.any():
        return 0.0
    if exponent is None:
        if nonzero.sum() >= MIN_FIT_POINTS:
            exponent = max(0.0, fit_exponent(qs, mags).exponent)
        else:
            exponent = 1.0
    C = float(np.max(mags[nonzero] * qs[nonzero] ** (-exponent)))
    gap = sigma - exponent - 1.0
    if gap <= 0:
        raise PreconditionError(f"series tail does not converge at Re s = {sigma} (term growth Q^{exponent:.3f})")
    return SQFREE_ODD_DENSITY * C * float(X) ** (-gap) / gap


def _partial_sum(term: Callable[[int], Estimate], s: complex, X: int) -> Tuple[Estimate, List[Tuple[int, Estimate]]]:
    if X < 1:
        raise PreconditionError(f"need X >= 1, got {X}")
    qs = squarefree_odd_array(int(X))
    data = [(int(Q), term(int(Q))) for Q in qs]
    weights = np.exp(-s * np.log(qs.astype(np.float64)))
    value = complex(sum(w * e.value for w, (_, e) in zip(weights, data)))
    err = float(sum(abs(w) * e.err for w, (_, e) in zip(weights, data)))
    mags = np.array([e.abs() for _, e in data])
    tail = _tail_bound(qs.astype(np.float64), mags, s.real, int(X))
    return Estimate.of(value, err + tail), data


def F0_series(v: TestFunction, u: TestFunction, s: complex, X: Optional[int] = None, method: str = "poisson") -> Estimate:
    """
    Sum over squarefree odd Q <= X of Q^-s (v | Psi(Q^{2i pi E} T_{inf/2}) u)

    The err includes the modelled tail beyond X.
    """
    if X is None:
        X = DEFAULT_X
    s = complex(s)
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    value, _ = _partial_sum(lambda Q: lattice_form(v, u, HALF_INF, Q, method=method), s, X)
    return value


def Feps_series(v: TestFunction, u: TestFunction, s: complex, eps: float, X: Optional[int] = None) -> Estimate:
    """
    Sum over squarefree odd Q <= X of Q^-s (v | Psi(Q^{2i pi E} T_{inf/2}) u_Q),
    u_Q(y) = Q^(eps/2) u(Q^eps y), each term in arithmetic closed form
    """
    if X is None:
        X = DEFAULT_X
    if eps < 0:
        raise PreconditionError(f"need eps >= 0, got {eps}")
    s = complex(s)
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    value, _ = _partial_sum(lambda Q: arithmetic_side(v, rescale_uQ(u, Q, eps), "inf_odd", Q), s, X)
    return value


def series_terms(v: TestFunction, u: TestFunction, eps: float, X: int) -> List[Tuple[int, Estimate]]:
    """(Q, arithmetic side for u_Q) for squarefree odd Q <= X"""
    return [
        (int(Q), arithmetic_side(v, rescale_uQ(u, int(Q), eps), "inf_odd", int(Q)))
        for Q in squarefree_odd_array(int(X))
    ]


# ---------------------------------------------------------------------------
# Line integrals
# ---------------------------------------------------------------------------

def _odd_inverse_zeta(nu: np.ndarray) -> np.ndarray:
    """(1 - 2^-nu)^-1 / zeta(nu)"""
    z, _ = zeta_values(nu)
    return 1.0 / ((1.0 - np.exp(-nu * math.log(2.0))) * z)


def F0_integral(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    T: Optional[float] = None,
    c0: float = 1.0,
    tol: Optional[float] = None,
    extend_to: Optional[float] = None,
    variant: str = "plus",
) -> Estimate:
    """
    (1/2i pi) times the integral over Re nu = c0 of
    f(s - nu) (1 - 2^-nu)^-1 / zeta(nu) <E_{-nu}, Wig(v, u)>

    Args:
        s: Point with Re s > 2
        c0: Line, 1 <= c0 < Re s - 1
    """
    s = complex(s)
    if s.real <= 2.0:
        raise PreconditionError(f"need Re s > 2, got {s}")
    if not 1.0 <= c0 < s.real - 1.0:
        raise PreconditionError(f"need 1 <= c0 < Re s - 1, got c0={c0}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)

    def integrand(nu: np.ndarray) -> np.ndarray:
        f, _ = f_kernel_values(s - nu, variant)
        pairing, _ = kernel320_values(v, u, nu)
        return f * _odd_inverse_zeta(nu) * pairing

    return integrate_vertical(integrand, c0, T, tol=tol, extend_to=extend_to).scaled(1.0 / (2.0 * math.pi))


def eq416_integral(
    v: TestFunction,
    u: TestFunction,
    Q: int,
    c: Optional[float] = None,
    T: Optional[float] = None,
    tol: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> Estimate:
    """
    (v | Psi(Q^{2i pi E} T_{inf/2}) u) as (1/2i pi) times the integral over
    Re nu = c of (1 - 2^-nu)^-1 zeta(nu)^-1 Q^nu <E_{-nu}, Wig(v, u)>
    """
    if c is None:
        c = settings.CONTOUR_C
    if c <= 1.0:
        raise PreconditionError(f"need c > 1, got {c}")
    Q = require_squarefree_odd(Q, "Q").n
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    log_q = math.log(Q)

    def integrand(nu: np.ndarray) -> np.ndarray:
        pairing, _ = kernel320_values(v, u, nu)
        return _odd_inverse_zeta(nu) * np.exp(nu * log_q) * pairing

    return integrate_vertical(integrand, c, T, tol=tol, extend_to=extend_to).scaled(1.0 / (2.0 * math.pi))


def check_eq416(
    v: TestFunction,
    u: TestFunction,
    Q: int,
    c: Optional[float] = None,
    T: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> Comparison:
    """Line integral of one Q-term against its arithmetic closed form"""
    left = eq416_integral(v, u, Q, c, T, extend_to=extend_to)
    right = arithmetic_side(v, u, "inf_odd", Q)
    return Comparison(left=left, right=right)


def _check_shift(s: complex, nu: complex) -> None:
    if abs((s - nu).real - 1.0) < 1e-12:
        raise PreconditionError(f"f(s - nu + eps mu) meets its pole at 1 on Re mu = 0 (s={s}, nu={nu})")


def _mellin_route(v: TestFunction, u: TestFunction, s: complex, nu: complex, eps: float, T_mu, variant: str) -> Estimate:
    def integrand(mu: np.ndarray) -> np.ndarray:
        f, _ = f_kernel_values(s - nu + eps * mu, variant)
        values, _ = phi_values(v, u, nu, mu)
        return f * values

    return integrate_vertical(integrand, 0.0, T_mu)


def _dirichlet_route(
    v: TestFunction, u: TestFunction, s: complex, nu: complex, eps: float, X: Optional[int], tol: float
) -> Estimate:
    """
    Sum over squarefree odd Q of Q^(nu - s) <E_{-nu}, Wig(v, u_Q)>

    The level doubles from 64 until the modelled tail is below tol times
    the value, up to H_DIRICHLET_CAP.
    """
    sigma = (s - nu).real
    if sigma <= 1.0:
        raise PreconditionError(f"the Dirichlet route needs Re(s - nu) > 1, got {sigma}")
    fixed = X is not None
    X = int(X) if fixed else 64
    done = 0
    value = 0j
    err = 0.0
    scaled_mags: List[float] = []
    while True:
        qs = [int(Q) for Q in squarefree_odd_array(X) if Q > done]
        for Q in qs:
            pairing, pairing_err = kernel320_values(v, rescale_uQ(u, Q, eps), [nu])
            weight = complex(np.exp((nu - s) * math.log(Q)))
            value += weight * complex(pairing[0])
            err += abs(weight) * float(pairing_err[0])
            scaled_mags.append(abs(complex(pairing[0])) * Q ** (0.5 * eps))
        done = X
        C = max(scaled_mags) if scaled_mags else 0.0
        gap = sigma + 0.5 * eps - 1.0
        tail = SQFREE_ODD_DENSITY * C * float(X) ** (-gap) / gap
        if fixed or tail <= tol * max(abs(value), 1e-300) or 2 * X > H_DIRICHLET_CAP:
            break
        X *= 2
    if not fixed and tail > tol * abs(value):
        logger.warning("H_eps Dirichlet tail above tolerance", extra={"levels": X, "tail": tail})
    return Estimate.of(value, err + tail)


def H_eps(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    nu: complex,
    eps: float,
    T_mu: Optional[float] = None,
    method: str = "auto",
    X: Optional[int] = None,
    tol: Optional[float] = None,
    variant: str = "plus",
) -> Estimate:
    """
    (1/i) times the integral over Re mu = 0 of f(s - nu + eps mu) Phi(v, u; nu, mu)

    Args:
        method: "mellin" integrates over mu; "dirichlet" expands f in its
            series and sums Q^(nu - s) <E_{-nu}, Wig(v, u_Q)>; "auto" takes
            "mellin" for u flat at 0 and "dirichlet" otherwise
        X: Fixed level for the Dirichlet route (adaptive when omitted)

    Raises:
        PreconditionError: Re(s - nu) = 1, or an unknown method
    """
    s, nu = complex(s), complex(nu)
    if eps < 0:
        raise PreconditionError(f"need eps >= 0, got {eps}")
    if tol is None:
        tol = settings.TOL
    _check_shift(s, nu)
    if method == "auto":
        method = "mellin" if 0.0 in u.flat_points else "dirichlet"
    if method not in ("mellin", "dirichlet"):
        raise PreconditionError(f"unknown H_eps method {method!r}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)

    if eps == 0:
        f_values, f_errs = f_kernel_values([s - nu], variant)
        factor = Estimate.of(f_values[0], f_errs[0])
        if method == "mellin":
            inner_value = pairing_mellin910(v, u, nu, T_mu)
        else:
            values, errs = kernel320_values(v, u, [nu])
            inner_value = Estimate.of(values[0], errs[0])
        return factor * inner_value
    if method == "mellin":
        return _mellin_route(v, u, s, nu, eps, T_mu, variant)
    if variant != "plus":
        raise PreconditionError("the Dirichlet route expands the squarefree odd kernel only")
    return _dirichlet_route(v, u, s, nu, eps, X, tol)


def Feps_integral(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    eps: float,
    c: Optional[float] = None,
    T: Optional[float] = None,
    method: str = "auto",
    X: Optional[int] = None,
    T_mu: Optional[float] = None,
    extend_to: Optional[float] = None,
) -> Estimate:
    """
    (1/2i pi) times the integral over Re nu = c of (1 - 2^-nu)^-1 zeta(nu)^-1 H_eps(s, nu)

    eps = 0 is the F_0 line integral on Re nu = c. For eps > 0 the
    "dirichlet" route sums Q^-s times the per-level line integral of
    (1 - 2^-nu)^-1 zeta(nu)^-1 Q^nu <E_{-nu}, Wig(v, u_Q)> over Q <= X,
    and the "mellin" route integrates H_eps by nested line integrals.

    Args:
        c: Line, c > 1 and Re s > c + 1 (default settings.CONTOUR_C)
    """
    if c is None:
        c = settings.CONTOUR_C
    s = complex(s)
    if c <= 1.0:
        raise PreconditionError(f"need c > 1, got {c}")
    if s.real <= c + 1.0:
        raise PreconditionError(f"need Re s > c + 1, got s={s}, c={c}")
    if eps < 0:
        raise PreconditionError(f"need eps >= 0, got {eps}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    if eps == 0:
        return F0_integral(v, u, s, T, c0=c, extend_to=extend_to)
    if method == "auto":
        method = "mellin" if 0.0 in u.flat_points else "dirichlet"

    if method == "dirichlet":
        if X is None:
            X = DEFAULT_X
        value, _ = _partial_sum(
            lambda Q: eq416_integral(v, rescale_uQ(u, Q, eps), Q, c, T, extend_to=extend_to), s, X
        )
        return value
    if method != "mellin":
        raise PreconditionError(f"unknown F_eps method {method!r}")

    def integrand(nu: np.ndarray) -> np.ndarray:
        inner_values = np.array([H_eps(v, u, s, n, eps, T_mu, "mellin").value for n in nu])
        return _odd_inverse_zeta(nu) * inner_values

    return integrate_vertical(integrand, c, T, extend_to=extend_to).scaled(1.0 / (2.0 * math.pi))


# ---------------------------------------------------------------------------
# Residue terms
# ---------------------------------------------------------------------------

def _residue_weight(theta: np.ndarray) -> np.ndarray:
    """(1 - 2^-theta)^-1 / zeta(theta), rejecting near-zeros of zeta"""
    z, _ = zeta_values(theta)
    small = np.abs(z) < ZERO_GUARD
    if small.any():
        raise PreconditionError(
            f"zeta is near zero on the integration line at {complex(theta[small][0])} (|zeta| = {float(np.abs(z[small]).min()):.3e})"
        )
    return 1.0 / ((1.0 - np.exp(-theta * math.log(2.0))) * z)


def G_eps(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    eps: float,
    T_mu: Optional[float] = None,
    variant: str = "plus",
) -> Estimate:
    """
    -kappa times the integral over Re mu = 0 (d mu = i d lam) of
    (1 - 2^(-s + 1 - eps mu))^-1 zeta(s - 1 + eps mu)^-1 Phi(v, u; s - 1 + eps mu, mu)

    kappa is the residue of f at 1, computed rather than assumed.
    """
    s = complex(s)
    if eps < 0:
        raise PreconditionError(f"need eps >= 0, got {eps}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    kappa = f_residue_at_1(variant)

    def integrand(mu: np.ndarray) -> np.ndarray:
        theta = s - 1.0 + eps * mu
        values, _ = phi_values(v, u, theta, mu)
        return _residue_weight(theta) * values

    integral = integrate_vertical(integrand, 0.0, T_mu)
    return (integral * kappa).scaled(-1j)


def G0(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    route: str = "closed",
    T_mu: Optional[float] = None,
    variant: str = "plus",
) -> Estimate:
    """
    G_0(s) by the mu-integral ("integral") or in closed form ("closed"):
    -i kappa (1 - 2^(1 - s))^-1 zeta(s - 1)^-1 <E_{1-s}, Wig(v, u)>
    """
    s = complex(s)
    if route == "integral":
        return G_eps(v, u, s, 0.0, T_mu, variant)
    if route != "closed":
        raise PreconditionError(f"unknown G0 route {route!r}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    kappa = f_residue_at_1(variant)
    weight = complex(_residue_weight(np.array([s - 1.0]))[0])
    values, errs = kernel320_values(v, u, [s - 1.0])
    pairing = Estimate.of(values[0], errs[0])
    return (pairing * kappa).scaled(-1j * weight)


def check_G0_routes(v: TestFunction, u: TestFunction, s: complex, T_mu: Optional[float] = None) -> Comparison:
    return Comparison(left=G0(v, u, s, "integral", T_mu), right=G0(v, u, s, "closed"))


def G_eps_convergence(
    v: TestFunction,
    u: TestFunction,
    s: complex,
    eps_values: Sequence[float] = (0.4, 0.2, 0.1),
    T_mu: Optional[float] = None,
) -> Dict[str, object]:
    """|G_eps(s) - G_0(s)| along a decreasing eps sequence"""
    target = G0(v, u, s, "closed")
    gaps = [abs(G_eps(v, u, s, e, T_mu).value - target.value) for e in eps_values]
    return {"G0": target, "eps": list(eps_values), "gaps": gaps}
