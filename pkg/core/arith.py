"""
Integer Arithmetic
Factorization, Moebius and a-weights, divisor sums, CRT and the
construction of the auxiliary level R
"""
import math
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.models import FactoredInt, ResidueClass
from core.config import settings
from core.exceptions import ConvergenceError, PreconditionError
from core.logging_config import get_logger

logger = get_logger(__name__)

INT64_MAX = 2 ** 63 - 1
# N^2 must stay below 2^62
LEVEL_MAX = 2 ** 31
SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

IntLike = Union[int, FactoredInt]


# ---------------------------------------------------------------------------
# Sieves
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def prime_sieve(nmax: int) -> np.ndarray:
    """Primes <= nmax (Eratosthenes)"""
    if nmax < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(nmax + 1, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(nmax) + 1):
        if is_prime[i]:
            is_prime[i * i::i] = False
    primes = np.nonzero(is_prime)[0].astype(np.int64)
    primes.setflags(write=False)
    return primes


@lru_cache(maxsize=8)
def squarefree_odd_array(X: int) -> np.ndarray:
    """Squarefree odd integers in [1, X], ascending"""
    if X < 1:
        return np.array([], dtype=np.int64)
    squarefree = np.ones(X + 1, dtype=bool)
    squarefree[0] = False
    squarefree[0::2] = False
    for p in prime_sieve(math.isqrt(X)):
        squarefree[int(p) * int(p)::int(p) * int(p)] = False
    values = np.nonzero(squarefree)[0].astype(np.int64)
    values.setflags(write=False)
    return values


def squarefree_odd_upto(X: int) -> Iterator[int]:
    """Iterate over squarefree odd integers up to X"""
    for q in squarefree_odd_array(int(X)):
        yield int(q)


# ---------------------------------------------------------------------------
# Primality and factorization
# ---------------------------------------------------------------------------

def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with the first twelve prime bases; deterministic below 3.3e24"""
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of the odd composite n"""
    for c in range(1, 64):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ConvergenceError(f"Pollard-Brent failed on {n}")


def _split(n: int, out: List[int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        out.append(n)
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> FactoredInt:
    """
    Canonical factorization of 1 <= n <= 2^63 - 1

    Trial division by sieved primes up to settings.TRIAL_DIVISION_LIMIT,
    then Miller-Rabin and Pollard-Brent on the cofactor.
    """
    n = int(n)
    if n < 1:
        raise PreconditionError(f"factorize needs n >= 1, got {n}")
    if n > INT64_MAX:
        raise PreconditionError(f"{n} exceeds the 64-bit range")

    found: List[int] = []
    m = n
    for p in SMALL_PRIMES:
        while m % p == 0:
            found.append(p)
            m //= p
    if m > 1 and not is_probable_prime(m):
        limit = min(settings.TRIAL_DIVISION_LIMIT, math.isqrt(m))
        primes = prime_sieve(limit)
        for p in primes[m % primes == 0]:
            p = int(p)
            while m % p == 0:
                found.append(p)
                m //= p
    if m > 1:
        _split(m, found)

    found.sort()
    factors: List[Tuple[int, int]] = []
    for p in found:
        if factors and factors[-1][0] == p:
            factors[-1] = (p, factors[-1][1] + 1)
        else:
            factors.append((p, 1))
    return FactoredInt(n=n, factors=tuple(factors))


def as_factored(n: IntLike) -> FactoredInt:
    if isinstance(n, FactoredInt):
        return n
    return factorize(int(n))


def require_squarefree_odd(n: IntLike, name: str = "N") -> FactoredInt:
    """Factorization of n, rejecting even or non-squarefree values"""
    f = as_factored(n)
    if not f.is_odd or not f.is_squarefree:
        raise PreconditionError(f"{name}={f.n} must be squarefree and odd")
    return f


# ---------------------------------------------------------------------------
# Multiplicative functions
# ---------------------------------------------------------------------------

def mobius(n: IntLike) -> int:
    f = as_factored(n)
    if not f.is_squarefree:
        return 0
    return -1 if len(f.factors) % 2 else 1


@lru_cache(maxsize=65536)
def _a_weight(r: int, omit_two: bool) -> int:
    weight = 1
    for p, _ in factorize(r).factors:
        if omit_two and p == 2:
            continue
        weight *= 1 - p
    return weight


def a_weight(r: int, omit_two: bool = False) -> int:
    """Product of (1 - p) over primes p | r, skipping p = 2 when omit_two"""
    r = int(r)
    if r < 1:
        raise PreconditionError(f"a_weight needs r >= 1, got {r}")
    return _a_weight(r, bool(omit_two))


def divisors(n: IntLike) -> List[int]:
    """All positive divisors, ascending"""
    divs = [1]
    for p, e in as_factored(n).factors:
        divs = [d * p ** i for d in divs for i in range(e + 1)]
    return sorted(divs)


def squarefree_divisors(n: IntLike) -> List[int]:
    divs = [1]
    for p, _ in as_factored(n).factors:
        divs = divs + [d * p for d in divs]
    return sorted(divs)


def sigma_div(r: int, nu: complex) -> complex:
    """Sum of d^(-nu) over the divisors d of r"""
    return complex(sum(complex(d) ** (-nu) for d in divisors(r)))


def radical(n: int, omit_two: bool = False) -> int:
    rad = 1
    for p, _ in as_factored(n).factors:
        if not (omit_two and p == 2):
            rad *= p
    return rad


def odd_primes_below(bound: float) -> List[int]:
    """Odd primes p < bound"""
    if bound <= 3:
        return []
    primes = prime_sieve(math.ceil(bound))
    return [int(p) for p in primes if p != 2 and p < bound]


# ---------------------------------------------------------------------------
# Congruences
# ---------------------------------------------------------------------------

def crt_pair(r1: ResidueClass, r2: ResidueClass) -> ResidueClass:
    """Unique class mod m1*m2 reducing to r1 and r2"""
    m1, m2 = r1.modulus, r2.modulus
    if math.gcd(m1, m2) != 1:
        raise PreconditionError(f"moduli {m1} and {m2} are not coprime")
    inverse = pow(m1, -1, m2) if m2 > 1 else 0
    x = r1.value + m1 * ((r2.value - r1.value) * inverse % m2)
    return ResidueClass.reduce(x, m1 * m2)


def check_level(R: int, Q: int) -> FactoredInt:
    """N = RQ as a squarefree odd level inside the 64-bit table range"""
    if math.gcd(R, Q) != 1:
        raise PreconditionError(f"R={R} and Q={Q} must be coprime")
    N = require_squarefree_odd(R * Q, "N=RQ")
    if N.n > LEVEL_MAX:
        raise PreconditionError(f"N={N.n} exceeds the 64-bit table range")
    return N


def reflect_index(n: int, R: int, Q: int) -> ResidueClass:
    """n-check mod 2N^2: congruent to n mod R^2 and to -n mod 2Q^2"""
    R, Q = int(R), int(Q)
    check_level(R, Q)
    return crt_pair(
        ResidueClass.reduce(n, R * R),
        ResidueClass.reduce(-n, 2 * Q * Q),
    )


# ---------------------------------------------------------------------------
# Choice of R
# ---------------------------------------------------------------------------

def minimal_R(Q: int, beta: Optional[float] = None) -> int:
    """Product of the odd primes below beta*Q that do not divide Q"""
    if beta is None:
        beta = settings.BETA
    Q = require_squarefree_odd(Q, "Q").n
    R1 = 1
    for p in odd_primes_below(beta * Q):
        if Q % p:
            R1 *= p
    return R1


def R_violations(R: int, Q: int, beta: float, congruence: bool = True) -> List[str]:
    """Independent check of the conditions on R; empty when all hold"""
    problems = []
    if not as_factored(R).is_squarefree:
        problems.append("R is not squarefree")
    if math.gcd(R, Q) != 1:
        problems.append("R and Q are not coprime")
    if congruence and R % (2 * Q * Q) != 1 % (2 * Q * Q):
        problems.append(f"R is not 1 mod {2 * Q * Q}")
    missing = [p for p in odd_primes_below(beta * Q) if (R * Q) % p]
    if missing:
        problems.append(f"N misses odd primes {missing}")
    return problems


def find_R(Q: int, beta: Optional[float] = None, cap: Optional[int] = None) -> int:
    """
    Squarefree R, coprime to Q, with R = 1 mod 2Q^2 and RQ divisible by all
    odd primes below beta*Q

    R = R1 * r with R1 from minimal_R and r a prime in the class solving
    r = 1 mod R1, R1 * r = 1 mod 2Q^2. For Q = 1 and R1 = 1 the prime is
    not needed and R = 1.

    Args:
        Q: Squarefree odd level
        beta: Prime bound factor (default settings.BETA)
        cap: Number of progression terms to try (default settings.PRIME_SEARCH_CAP)

    Raises:
        ConvergenceError: no prime within the cap
    """
    if beta is None:
        beta = settings.BETA
    if cap is None:
        cap = settings.PRIME_SEARCH_CAP
    if beta <= 0:
        raise PreconditionError(f"beta must be positive, got {beta}")
    Q = require_squarefree_odd(Q, "Q").n
    R1 = minimal_R(Q, beta)
    if Q == 1 and R1 == 1:
        return 1

    modulus = 2 * Q * Q
    target = crt_pair(
        ResidueClass.reduce(1, R1),
        ResidueClass.reduce(pow(R1, -1, modulus), modulus),
    )
    step = target.modulus
    r = target.value
    for _ in range(cap):
        if r > 1 and (R1 * Q) % r and is_probable_prime(r):
            R = R1 * r
            if R * Q > LEVEL_MAX:
                raise ConvergenceError(f"R={R} pushes N beyond the 64-bit range")
            problems = R_violations(R, Q, beta)
            if problems:
                raise ConvergenceError(f"constructed R={R} fails: {problems}")
            logger.debug("found R", extra={"Q": Q, "R": R, "R1": R1, "r": r})
            return R
        r += step
    raise ConvergenceError(f"no prime found in {cap} terms of {target.value} mod {step}")
