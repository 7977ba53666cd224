"""
Hermitian Forms of Lattice Symbols
Lattice sums against Wigner transforms, the theta map, f_N, the integer
coefficients c_{R,Q}(m, n) and the arithmetic closed forms
"""
import csv
import io
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.models import (
    CoeffTable,
    Comparison,
    Estimate,
    FactoredInt,
    LatticeSymbolSpec,
    PanelRule,
    SymbolKind,
    ThetaVector,
)
from core.arith import (
    a_weight,
    as_factored,
    check_level,
    mobius,
    radical,
    require_squarefree_odd,
    squarefree_divisors,
    squarefree_odd_array,
)
from core.config import settings
from core.exceptions import ConsistencyError, ConvergenceError, PreconditionError
from core.logging_config import get_logger
from core.quad import composite_nodes, integrate_compact
from core.testfn import TestFunction, dilate, require_support_class
from core.wigner import WignerEvaluator

logger = get_logger(__name__)

EPS = np.finfo(float).eps
# Rows with a longer period are summed term by term
ROW_PERIOD_CAP = 4096
# Exact Poisson rows need one DFT of the period
POISSON_PERIOD_CAP = 1 << 16
# Tables of f_N and pointwise DFTs
DFT_CAP = 1 << 12
EXHAUSTIVE_PAIRS = 4_000_000
K_BLOCK = 512

Level = Union[int, FactoredInt]


# ---------------------------------------------------------------------------
# Coefficient rules
# ---------------------------------------------------------------------------

def t_n(N: Level, include_origin: bool = True) -> LatticeSymbolSpec:
    """Spec of T_N"""
    return LatticeSymbolSpec(kind=SymbolKind.T_N, N=as_factored(N), include_origin=include_origin)


def _a_values(g: np.ndarray, omit_two: bool = False) -> np.ndarray:
    values, inverse = np.unique(g, return_inverse=True)
    mapped = np.array([a_weight(int(x), omit_two) if x > 0 else 0 for x in values], dtype=np.int64)
    return mapped[inverse].reshape(g.shape)


def periodic_value(spec: LatticeSymbolSpec, j: int, ks) -> np.ndarray:
    """b(j, k) by the gcd rule, without the special value at the origin"""
    ks = np.asarray(ks, dtype=np.int64)
    kind = spec.kind
    if kind in (SymbolKind.DIRAC_COMB, SymbolKind.DIRAC_COMB_FULL):
        return np.ones(ks.shape, dtype=np.int64)
    g = np.gcd(np.int64(j), ks)
    if kind == SymbolKind.T_N:
        return _a_values(np.gcd(g, np.int64(spec.N.n)))
    return _a_values(g, omit_two=kind == SymbolKind.T_INF_OVER_2)


def origin_coeff(spec: LatticeSymbolSpec) -> int:
    """b(0, 0); gcd(0, 0) has no a-weight, so the T_inf families drop it"""
    if not spec.include_origin:
        return 0
    if spec.kind == SymbolKind.T_N:
        return a_weight(spec.N.n)
    if spec.kind == SymbolKind.DIRAC_COMB_FULL:
        return 1
    return 0


def coefficient(spec: LatticeSymbolSpec, j: int, k: int) -> int:
    """b(j, k)"""
    if j == 0 and k == 0:
        return origin_coeff(spec)
    return int(periodic_value(spec, j, [k])[0])


def row_period(spec: LatticeSymbolSpec, j: int) -> Optional[int]:
    """Period in k of b(j, .) away from the origin; None when not periodic"""
    kind = spec.kind
    if kind in (SymbolKind.DIRAC_COMB, SymbolKind.DIRAC_COMB_FULL):
        return 1
    if kind == SymbolKind.T_N:
        return math.gcd(j, spec.N.n)
    if j == 0:
        return None
    return radical(abs(j), omit_two=kind == SymbolKind.T_INF_OVER_2)


def _origin_fix(spec: LatticeSymbolSpec) -> int:
    """Periodic value at k = 0 of row 0 minus the actual b(0, 0)"""
    if row_period(spec, 0) is None:
        return 0
    return int(periodic_value(spec, 0, [0])[0]) - origin_coeff(spec)


# ---------------------------------------------------------------------------
# Lattice forms
# ---------------------------------------------------------------------------

def _kernel_explicit(spec: LatticeSymbolSpec, j: int, t: np.ndarray, K: int, Q: int) -> np.ndarray:
    out = np.full(t.shape, float(coefficient(spec, j, 0)))
    theta = 2.0 * math.pi * t / Q
    for start in range(1, K + 1, K_BLOCK):
        ks = np.arange(start, min(K, start + K_BLOCK - 1) + 1, dtype=np.int64)
        b = periodic_value(spec, j, ks).astype(np.float64)
        out += 2.0 * (b @ np.cos(np.outer(ks, theta)))
    return out


def lattice_kernel(spec: LatticeSymbolSpec, j: int, t: np.ndarray, K: int, Q: int) -> np.ndarray:
    """
    B_K(t), the sum of b(j, k) exp(2i pi k t / Q) over |k| <= K

    Periodic rows are summed per residue class r mod P with the closed
    Dirichlet kernel; the kernel argument is reduced to the nearest
    integer first so that large K loses no phase accuracy.
    """
    t = np.asarray(t, dtype=np.float64)
    P = row_period(spec, j)
    if P is None or P > ROW_PERIOD_CAP:
        return _kernel_explicit(spec, j, t, K, Q)

    y = P * t / Q
    ell = np.rint(y)
    frac = y - ell
    odd_ell = ell.astype(np.int64) % 2 == 1
    den = np.sin(math.pi * frac)
    zero = den == 0.0
    safe_den = np.where(zero, 1.0, den)

    residues = np.arange(P, dtype=np.int64)
    b = periodic_value(spec, j, residues)
    out = np.zeros(t.shape, dtype=np.float64)
    for r, br in zip(residues.tolist(), b.tolist()):
        if br == 0:
            continue
        m_lo = -((K + r) // P)
        m_hi = (K - r) // P
        n = m_hi - m_lo + 1
        if n <= 0:
            continue
        ratio = np.where(zero, float(n), np.sin(n * math.pi * frac) / safe_den)
        if (n - 1) % 2:
            ratio = np.where(odd_ell, -ratio, ratio)
        center = r + 0.5 * P * (m_lo + m_hi)
        out += br * np.cos(2.0 * math.pi * center * t / Q) * ratio
    if j == 0:
        out -= _origin_fix(spec)
    return out


def _row_window(ev: WignerEvaluator, j: int, Q: int) -> Tuple[float, float]:
    return ev.t_window(j / Q)


def _direct_row(
    ev: WignerEvaluator, spec: LatticeSymbolSpec, j: int, Q: int, K: int, order: int
) -> Tuple[complex, float]:
    """Integral of g(t) B_K(t) over the row's t-window, with an order p vs p/2 error"""
    lo, hi = _row_window(ev, j, Q)
    if hi <= lo:
        return 0j, 0.0
    x = j / Q
    panels = 16 + math.ceil(2.0 * (hi - lo) * K / Q)
    results = []
    for n in (order, order // 2):
        t, w = composite_nodes(lo, hi, panels, n)
        results.append(complex(np.sum(ev.integrand(x, t) * lattice_kernel(spec, j, t, K, Q) * w)))
    return results[0], abs(results[0] - results[1])


def _direct_rows(
    ev: WignerEvaluator,
    spec: LatticeSymbolSpec,
    Q: int,
    rows: Sequence[int],
    tol: float,
    k_cap: int,
    order: int,
) -> Estimate:
    """Sum of the truncated rows, doubling K from 64Q until the change is below tol/4"""
    if not rows:
        return Estimate.of(0.0)

    def at(K: int) -> Tuple[complex, float]:
        total, err = 0j, 0.0
        for j in rows:
            value, e = _direct_row(ev, spec, j, Q, K, order)
            total += value
            err += e
        return total, err

    K = 64 * Q
    previous, _ = at(K)
    while True:
        if 2 * K > k_cap:
            raise ConvergenceError(f"k-truncation for Q={Q} exceeded k_cap={k_cap}")
        K *= 2
        current, quad_err = at(K)
        change = abs(current - previous)
        if change < tol * max(1.0, abs(current)) / 4:
            break
        previous = current
    logger.debug("lattice rows converged", extra={"Q": Q, "rows": len(rows), "K": K, "last_change": change})
    return Estimate.of(current, change + quad_err)


def _poisson_row(ev: WignerEvaluator, spec: LatticeSymbolSpec, j: int, Q: int) -> Optional[Tuple[complex, float]]:
    """Exact row sum by Poisson summation over residue classes; None if the row is not periodic"""
    P = row_period(spec, j)
    if P is None or P > POISSON_PERIOD_CAP:
        return None
    lo, hi = _row_window(ev, j, Q)
    if hi <= lo:
        return 0j, 0.0
    x = j / Q
    ell = np.arange(math.ceil(lo * P / Q), math.floor(hi * P / Q) + 1, dtype=np.int64)
    g = ev.integrand(x, ell * Q / P)
    b = periodic_value(spec, j, np.arange(P)).astype(np.float64)
    dual = np.fft.ifft(b) * P
    terms = g * dual[ell % P]
    value = complex(np.sum(terms)) * Q / P
    err = 8 * EPS * float(np.sum(np.abs(terms))) * Q / P
    if j == 0:
        fix = _origin_fix(spec)
        if fix:
            w0 = integrate_compact(lambda t: ev.integrand(0.0, t), (lo, hi))
            value -= fix * w0.value
            err += abs(fix) * w0.err
    return value, err


def lattice_rows(v: TestFunction, u: TestFunction, Q: int) -> List[int]:
    """j with j/Q in the x-window of W(v, u)"""
    lo, hi = WignerEvaluator(v, u).x_window
    return list(range(math.floor(Q * lo), math.ceil(Q * hi) + 1))


def lattice_form(
    v: TestFunction,
    u: TestFunction,
    spec: LatticeSymbolSpec,
    Q: Level = 1,
    method: str = "direct",
    tol: Optional[float] = None,
    k_cap: Optional[int] = None,
    rule: Optional[PanelRule] = None,
) -> Estimate:
    """
    (v | Psi(Q^{2i pi E} S) u) = Q^-1 * sum over j, k of b(j, k) W(v, u)(j/Q, k/Q)

    Args:
        v, u: Compactly supported test functions
        spec: Coefficient rule of S
        Q: Dilation level
        method: "direct" (Wigner quadrature with k-tail doubling) or
            "poisson" (exact rows by Poisson summation; rows without a
            period fall back to direct)
        tol: Tail tolerance (default settings.TOL)
        k_cap: Largest k-truncation (default settings.K_CAP)

    Returns:
        Estimate
    """
    if tol is None:
        tol = settings.TOL
    if k_cap is None:
        k_cap = settings.K_CAP
    Q = int(Q)
    if Q < 1:
        raise PreconditionError(f"Q must be a positive integer, got {Q}")
    if method not in ("direct", "poisson"):
        raise PreconditionError(f"unknown lattice method {method!r}")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)

    ev = WignerEvaluator(v, u, rule)
    order = rule.order if rule else settings.GL_ORDER
    rows = lattice_rows(v, u, Q)
    if method == "direct":
        total = _direct_rows(ev, spec, Q, rows, tol, k_cap, order)
    else:
        value, err = 0j, 0.0
        leftover = []
        for j in rows:
            row = _poisson_row(ev, spec, j, Q)
            if row is None:
                leftover.append(j)
                continue
            value += row[0]
            err += row[1]
        total = Estimate.of(value, err) + _direct_rows(ev, spec, Q, leftover, tol, k_cap, order)
    return total.scaled(1.0 / Q)


# ---------------------------------------------------------------------------
# Congruence side
# ---------------------------------------------------------------------------

def theta_map(u: TestFunction, N: Level) -> ThetaVector:
    """
    (theta_N u)(n) = sum over l of u(n/N + 2lN), n mod 2N^2

    Every integer m with m/N in supp u adds u(m/N) to bucket m mod 2N^2.
    """
    N = int(N)
    if N < 1:
        raise PreconditionError(f"N must be positive, got {N}")
    if not u.is_real:
        raise PreconditionError("theta_map needs a real-valued function")
    M = 2 * N * N
    if u.is_zero:
        return ThetaVector(N=N)
    lo, hi = u.support
    m = np.arange(math.floor(N * lo), math.ceil(N * hi) + 1, dtype=np.int64)
    if m.size > settings.TABLE_AXIS_CAP:
        raise PreconditionError(f"theta_{N} of {u.name} needs {m.size} samples")
    values = np.asarray(u(m / N), dtype=np.float64)
    buckets: Dict[int, float] = {}
    for key, value in zip((m % M).tolist(), values.tolist()):
        if value != 0.0:
            buckets[key] = buckets.get(key, 0.0) + value
    return ThetaVector(N=N, values=buckets)


def f_N(N: Level, j: int, s: int, method: str = "dft", spec: Optional[LatticeSymbolSpec] = None) -> int:
    """
    f_N(j, s) = (1/N) * sum over k mod N of b(j, k) exp(2i pi k s / N)

    Args:
        N: Squarefree level
        j, s: Residues mod N
        method: "dft" (period-reduced transform, rounded and checked) or
            "euler_product" (product over p | N of char(s = 0 mod p) - char(j = 0 mod p),
            T_N only)
        spec: Coefficient rule (default T_N)

    Raises:
        ConsistencyError: the transform is not an integer
    """
    f = as_factored(N)
    if not f.is_squarefree:
        raise PreconditionError(f"N={f.n} must be squarefree")
    if spec is None:
        spec = t_n(f)
    n = f.n
    j, s = j % n, s % n
    if method == "euler_product":
        if spec.kind != SymbolKind.T_N:
            raise PreconditionError("the Euler product exists for T_N only")
        value = 1
        for p in f.primes:
            value *= int(s % p == 0) - int(j % p == 0)
        return value
    if method != "dft":
        raise PreconditionError(f"unknown f_N method {method!r}")

    # b(j, .) has period P | N, so only s = 0 mod N/P survive
    P = row_period(spec, j) if j else n
    if P is None or n % P:
        P = n
    if s % (n // P):
        return 0
    if P > DFT_CAP:
        raise PreconditionError(f"pointwise DFT of period {P} exceeds {DFT_CAP}")
    r = np.arange(P, dtype=np.int64)
    b = periodic_value(spec, j, r).astype(np.float64)
    if j == 0:
        b[0] = origin_coeff(spec)
    value = complex(np.sum(b * np.exp(2j * math.pi * r * s / n))) / P
    return _as_integer(value, f"f_{n}({j}, {s})")


def _as_integer(value: complex, label: str) -> int:
    nearest = round(value.real)
    if abs(value - nearest) > 1e-6:
        raise ConsistencyError(f"{label} = {value} is not an integer")
    return int(nearest)


def f_N_table(N: Level, method: str = "dft") -> np.ndarray:
    """Integer matrix f_N(j, s) over (Z/N)^2 for the T_N rule"""
    f = as_factored(N)
    if not f.is_squarefree:
        raise PreconditionError(f"N={f.n} must be squarefree")
    n = f.n
    if n > DFT_CAP:
        raise PreconditionError(f"f_N tables are limited to N <= {DFT_CAP}")
    idx = np.arange(n, dtype=np.int64)
    if method == "euler_product":
        table = np.ones((n, n), dtype=np.int64)
        for p in f.primes:
            table *= (idx[None, :] % p == 0).astype(np.int64) - (idx[:, None] % p == 0).astype(np.int64)
        return table
    if method != "dft":
        raise PreconditionError(f"unknown f_N method {method!r}")
    g = np.gcd(np.gcd(idx[:, None], idx[None, :]), np.int64(n))
    b = _a_values(g).astype(np.float64)
    raw = np.fft.ifft(b, axis=1)
    table = np.rint(raw.real).astype(np.int64)
    gap = float(np.max(np.abs(raw - table))) if n else 0.0
    if gap > 1e-6:
        raise ConsistencyError(f"DFT table of f_{n} is off the integers by {gap:.3e}")
    return table


def _conditions(R: int, Q: int, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Support conditions of c_{R,Q}; the mod R and mod 2R forms must coincide"""
    m, n = np.broadcast_arrays(m, n)
    plus, minus = m + n, m - n
    odd_side = minus % (2 * Q) == 0
    loose = (plus % R == 0) & odd_side
    strict = (plus % (2 * R) == 0) & odd_side
    if np.any(loose != strict):
        bad = int(np.argmax(loose != strict))
        raise ConsistencyError(
            f"m+n = 0 mod {R} and mod {2 * R} disagree at (m, n) = ({int(m.flat[bad])}, {int(n.flat[bad])})"
        )
    return strict


def coeff_c71(R: int, Q: int, m, n) -> np.ndarray:
    """
    Vectorized c_{R,Q}(m, n) in closed form

    char(m+n = 0 mod 2R) char(m-n = 0 mod 2Q) times the sum over
    R1 R2 = R, Q1 Q2 = Q of mu(R1 Q1) char(j = 0 mod R1 Q1) char(s = 0 mod R2 Q2),
    with j = (m+n)/2R and s = (m-n)/2Q.
    """
    R, Q = int(R), int(Q)
    N = check_level(R, Q).n
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    ok = _conditions(R, Q, m, n)
    j = np.where(ok, (m + n) // (2 * R), 0)
    s = np.where(ok, (m - n) // (2 * Q), 0)
    total = np.zeros(np.broadcast(m, n).shape, dtype=np.int64)
    for R1 in squarefree_divisors(R):
        for Q1 in squarefree_divisors(Q):
            A = R1 * Q1
            B = N // A
            total += mobius(A) * ((j % A == 0) & (s % B == 0)).astype(np.int64)
    return np.where(ok, total, 0)


def coeff_eq64(R: int, Q: int, m, n) -> np.ndarray:
    """Vectorized c_{R,Q}(m, n) = char(...) f_N((m+n)/2R, (m-n)/2Q) with f_N by DFT"""
    R, Q = int(R), int(Q)
    f = check_level(R, Q)
    N = f.n
    m = np.asarray(m, dtype=np.int64)
    n = np.asarray(n, dtype=np.int64)
    ok = _conditions(R, Q, m, n)
    j = np.where(ok, (m + n) // (2 * R), 0) % N
    s = np.where(ok, (m - n) // (2 * Q), 0) % N
    if N <= DFT_CAP:
        values = f_N_table(f)[j, s]
    else:
        values = np.vectorize(lambda a, b: f_N(f, int(a), int(b)), otypes=[np.int64])(j, s)
    return np.where(ok, values, 0)


def _n_class(R: int, Q: int, m: np.ndarray) -> np.ndarray:
    """The class n0(m) mod 2N of the n with m+n = 0 mod 2R and m-n = 0 mod 2Q"""
    inverse = pow(R, -1, Q) if Q > 1 else 0
    t = (m % Q) * inverse % Q
    return (-m + 2 * R * t) % (2 * R * Q)


def coeff_table(R: int, Q: int) -> CoeffTable:
    """
    Nonzero entries of c_{R,Q} over (Z/2N^2)^2 from the closed form

    Raises:
        PreconditionError: 2N^2 beyond settings.TABLE_AXIS_CAP; use coeff_c71 pointwise
    """
    R, Q = int(R), int(Q)
    N = check_level(R, Q).n
    M = 2 * N * N
    if M > settings.TABLE_AXIS_CAP:
        raise PreconditionError(f"table axis 2N^2={M} exceeds {settings.TABLE_AXIS_CAP}; evaluate pointwise")
    entries: Dict[Tuple[int, int], int] = {}
    steps = 2 * N * np.arange(N, dtype=np.int64)
    for start in range(0, M, 4096):
        m = np.arange(start, min(M, start + 4096), dtype=np.int64)
        n = (_n_class(R, Q, m)[:, None] + steps[None, :]) % M
        mm = np.broadcast_to(m[:, None], n.shape)
        c = coeff_c71(R, Q, mm, n)
        nz = np.nonzero(c)
        for a, b, value in zip(mm[nz].tolist(), n[nz].tolist(), c[nz].tolist()):
            entries[(a, b)] = value
    return CoeffTable(R=R, Q=Q, N=N, entries=entries)


def coeff_table_csv(table: CoeffTable) -> str:
    """Header R,Q,N with its values, then m,n,value rows"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["R", "Q", "N"])
    writer.writerow([table.R, table.Q, table.N])
    writer.writerow(["m", "n", "value"])
    writer.writerows(table.rows())
    return buffer.getvalue()


def _sample_pairs(R: int, Q: int, samples: Optional[int], seed: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    """All pairs when small, otherwise half uniform and half on the admissible n-classes"""
    N = R * Q
    M = 2 * N * N
    if samples is None and M * M <= EXHAUSTIVE_PAIRS:
        m, n = np.meshgrid(np.arange(M, dtype=np.int64), np.arange(M, dtype=np.int64), indexing="ij")
        return m.ravel(), n.ravel()
    if samples is None:
        samples = 10_000
    if seed is None:
        seed = settings.SEED
    rng = np.random.default_rng(seed)
    m = rng.integers(0, M, size=samples, dtype=np.int64)
    n = rng.integers(0, M, size=samples, dtype=np.int64)
    half = samples // 2
    step = 2 * N
    n[:half] = (_n_class(R, Q, m[:half]) + step * rng.integers(0, N, size=half, dtype=np.int64)) % M
    return m, n


def check_lemma71(R: int, Q: int, samples: Optional[int] = None, seed: Optional[int] = None) -> int:
    """Largest |closed form - DFT construction| over all (or sampled) (m, n)"""
    R, Q = int(R), int(Q)
    check_level(R, Q)
    m, n = _sample_pairs(R, Q, samples, seed)
    gap = np.abs(coeff_c71(R, Q, m, n) - coeff_eq64(R, Q, m, n))
    return int(gap.max()) if gap.size else 0


def _reflect_all(n: Iterable[int], R: int, Q: int) -> np.ndarray:
    R2, M2 = R * R, 2 * Q * Q
    inverse = pow(R2, -1, M2)
    out = [int(x) % R2 + R2 * ((-int(x) - int(x) % R2) * inverse % M2) for x in n]
    return np.array(out, dtype=np.int64)


def check_thm81(R: int, Q: int, samples: Optional[int] = None, seed: Optional[int] = None) -> int:
    """
    Largest |c_{R,Q}(m, n) - mu(Q) c_{N,1}(m, n_check)| over all or sampled pairs

    n_check is n mod R^2 and -n mod 2Q^2.
    """
    R, Q = int(R), int(Q)
    N = check_level(R, Q).n
    m, n = _sample_pairs(R, Q, samples, seed)
    unique, inverse = np.unique(n, return_inverse=True)
    n_check = _reflect_all(unique.tolist(), R, Q)[inverse]
    left = coeff_c71(R, Q, m, n)
    right = mobius(Q) * coeff_c71(N, 1, m, n_check)
    gap = np.abs(left - right)
    return int(gap.max()) if gap.size else 0


def finite_form(v: TestFunction, u: TestFunction, R: int, Q: int) -> Estimate:
    """
    Sum over m, n mod 2N^2 of c_{R,Q}(m, n) conj(theta_N v)(m) (theta_N u)(n)

    For each m only one class of n mod 2N carries nonzero coefficients,
    so the sum runs over the sparse supports of the two theta vectors.
    """
    R, Q = int(R), int(Q)
    N = check_level(R, Q).n
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    tv, tu = theta_map(v, N), theta_map(u, N)
    if not tv.values or not tu.values:
        return Estimate.of(0.0)

    by_class: Dict[int, List[int]] = {}
    for key in sorted(tu.values):
        by_class.setdefault(key % (2 * N), []).append(key)
    m_keys = np.array(sorted(tv.values), dtype=np.int64)
    classes = _n_class(R, Q, m_keys)
    pairs_m, pairs_n = [], []
    for m, cls in zip(m_keys.tolist(), classes.tolist()):
        for n in by_class.get(cls, ()):
            pairs_m.append(m)
            pairs_n.append(n)
    if not pairs_m:
        return Estimate.of(0.0)
    pm = np.array(pairs_m, dtype=np.int64)
    pn = np.array(pairs_n, dtype=np.int64)
    c = coeff_c71(R, Q, pm, pn).astype(np.float64)
    terms = c * np.array([tv.values[m] for m in pairs_m]) * np.array([tu.values[n] for n in pairs_n])
    return Estimate.of(float(np.sum(terms)), 8 * EPS * float(np.sum(np.abs(terms))))


# ---------------------------------------------------------------------------
# Arithmetic closed forms
# ---------------------------------------------------------------------------

def _branch(y: float) -> float:
    """Positive t with t - 1/t = y"""
    return 0.5 * (y + math.sqrt(y * y + 4.0))


def arithmetic_terms(
    v: TestFunction,
    u: TestFunction,
    R: Union[Level, str],
    Q: Level,
) -> List[Tuple[int, int, float, float, complex]]:
    """
    Nonzero terms mu(Q1) mu(R1) conj(v)(R1/Q2 + Q2/R1) u(R1/Q2 - Q2/R1)

    Args:
        R: Level whose divisors R1 run, or "inf_odd" for every squarefree odd
            R1 coprime to Q inside the support window of u
        Q: Squarefree odd level

    Returns:
        (Q2, R1, x, y, term) tuples ordered by (Q2, R1)
    """
    require_support_class(v, u)
    Q = require_squarefree_odd(Q, "Q").n
    if isinstance(R, str):
        if R != "inf_odd":
            raise PreconditionError(f"unknown arithmetic range {R!r}")
        inf_odd = True
    else:
        inf_odd = False
        R = int(R)
        check_level(R, Q)

    lo_u, hi_u = u.support
    out = []
    for Q2 in squarefree_divisors(Q):
        sign_q = mobius(Q // Q2)
        if inf_odd:
            first = max(1, math.floor(Q2 * _branch(lo_u)))
            last = math.ceil(Q2 * _branch(hi_u))
            candidates = [int(r) for r in squarefree_odd_array(last) if r >= first and math.gcd(int(r), Q) == 1]
        else:
            candidates = squarefree_divisors(R)
        if not candidates:
            continue
        R1 = np.array(candidates, dtype=np.float64)
        x = R1 / Q2 + Q2 / R1
        y = R1 / Q2 - Q2 / R1
        values = np.conj(v(x)) * u(y)
        for r1, xx, yy, value in zip(candidates, x.tolist(), y.tolist(), np.atleast_1d(values).tolist()):
            if value != 0:
                out.append((Q2, r1, xx, yy, sign_q * mobius(r1) * complex(value)))
    return out


def arithmetic_side(v: TestFunction, u: TestFunction, R: Union[Level, str], Q: Level) -> Estimate:
    """Closed form of (v | Psi(Q^{2i pi E} T_N) u) under the support hypotheses"""
    terms = [term for *_, term in arithmetic_terms(v, u, R, Q)]
    value = complex(sum(terms))
    return Estimate.of(value, 8 * EPS * sum(abs(t) for t in terms))


def form_lemma83(v: TestFunction, u: TestFunction, N: Level) -> Estimate:
    """
    Sum over T | N of mu(T) times the sum over j, k of conj(v)(Tj + k/T) u(Tj - k/T)

    With x = Tj + k/T and y = Tj - k/T, j is bounded by (x + y)/2 and k by
    the two windows x - Tj in supp v and Tj - y in supp u.
    """
    f = as_factored(N)
    if not f.is_squarefree:
        raise PreconditionError(f"N={f.n} must be squarefree")
    if v.is_zero or u.is_zero:
        return Estimate.of(0.0)
    (lo_v, hi_v), (lo_u, hi_u) = v.support, u.support
    total = 0j
    magnitude = 0.0
    for T in squarefree_divisors(f):
        sign = mobius(T)
        j_lo = math.floor(0.5 * (lo_v + lo_u) / T)
        j_hi = math.ceil(0.5 * (hi_v + hi_u) / T)
        for j in range(j_lo, j_hi + 1):
            c = T * j
            k_lo = math.floor(T * max(lo_v - c, c - hi_u))
            k_hi = math.ceil(T * min(hi_v - c, c - lo_u))
            if k_hi < k_lo:
                continue
            k = np.arange(k_lo, k_hi + 1, dtype=np.float64)
            terms = np.conj(v(c + k / T)) * u(c - k / T)
            total += sign * complex(np.sum(terms))
            magnitude += float(np.sum(np.abs(terms)))
    return Estimate.of(total, 8 * EPS * magnitude)


def check_eq82(v: TestFunction, u: TestFunction, R: int, Q: int, method: str = "direct") -> Comparison:
    """
    lattice_form(v, u, T_N, Q) against mu(Q) form_lemma83(v, u~, N), u~(y) = u(y(1 - 2R^2))

    Raises:
        PreconditionError: R is not 1 mod 2Q^2
    """
    R, Q = int(R), int(Q)
    N = check_level(R, Q)
    if R % (2 * Q * Q) != 1 % (2 * Q * Q):
        raise PreconditionError(f"R={R} must be 1 mod 2Q^2={2 * Q * Q}")
    left = lattice_form(v, u, t_n(N), Q, method=method)
    right = form_lemma83(v, dilate(u, 1.0 - 2.0 * R * R), N).scaled(mobius(Q))
    return Comparison(left=left, right=right)
