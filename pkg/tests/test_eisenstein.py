"""
Eisenstein Pairing Tests
"""
import math

import numpy as np
import pytest

from app.models import Comparison, PairingRoute
from core.exceptions import PreconditionError
from core.eisenstein import (
    comb_decomp_check,
    kernel320_values,
    kernel_circle_residual,
    kernel_window,
    pairing,
    pairing_def31,
    pairing_kernel320,
    pairing_mellin910,
    phi,
    recursion_914_report,
    residue_check_32,
)
from core.testfn import zero_like


def test_kernel_window_of_canonical_pair(plain_pair):
    v, u = plain_pair
    (lo, hi), = kernel_window(v, u)
    assert lo == pytest.approx(-math.asinh(0.5))
    assert hi == pytest.approx(math.asinh(0.5))


def test_kernel_is_analytic(plain_pair):
    v, u = plain_pair
    assert kernel_circle_residual(v, u, 2.5 + 1j) < 1e-10


def test_kernel_of_zero_function(plain_pair):
    v, u = plain_pair
    values, errs = kernel320_values(v, zero_like(u), [2.0, 3.0])
    assert not values.any() and not errs.any()


@pytest.mark.parametrize("nu", [2.2, 2.5, 3 + 4j])
def test_defining_sum_matches_kernel(plain_pair, nu):
    v, u = plain_pair
    comparison = Comparison(left=pairing_def31(v, u, nu), right=pairing_kernel320(v, u, nu))
    assert comparison.relative <= 1e-6


def test_defining_sum_domain(plain_pair):
    v, u = plain_pair
    with pytest.raises(PreconditionError):
        pairing_def31(v, u, 1.0)
    with pytest.raises(PreconditionError):
        pairing_def31(v, u, 0.5 + 3j)
    assert pairing_def31(v, zero_like(u), 2.5).value == 0


def test_residue_at_one(plain_pair):
    _, u = plain_pair
    assert residue_check_32(u, u).relative <= 1e-4


def test_pairing_routes(plain_pair):
    v, u = plain_pair
    result = pairing(v, u, 2.5, PairingRoute.KERNEL320)
    assert result.route == PairingRoute.KERNEL320
    assert result.nu == (2.5, 0.0)
    assert result.value == pairing_kernel320(v, u, 2.5)


def test_phi_conjugation(mellin_pair):
    v, u = mellin_pair
    nu, mu = 2.0 + 1.0j, -0.3 + 2.0j
    left = phi(v, u, nu, mu).value
    right = phi(v, u, nu.conjugate(), mu.conjugate()).value
    assert abs(left - np.conj(right)) <= 1e-10 * max(1.0, abs(left))


def test_phi_domain(mellin_pair):
    v, u = mellin_pair
    with pytest.raises(PreconditionError):
        phi(v, u, 2.0, 0.5)
    assert phi(v, zero_like(u), 2.0, 0.0).value == 0


def test_recursion_report_domain(mellin_pair):
    v, u = mellin_pair
    with pytest.raises(PreconditionError):
        recursion_914_report(v, u, 2.0, -1.0)


@pytest.mark.slow
def test_recursion_report_runs(mellin_pair):
    v, u = mellin_pair
    out = recursion_914_report(v, u, 2.0, -2.0)
    assert set(out) == {"left", "right", "residual", "relative"}
    assert math.isfinite(out["relative"])


@pytest.mark.slow
@pytest.mark.parametrize("nu", [2.5, 1 + 3j])
def test_mellin_route_matches_kernel(mellin_pair, nu):
    v, u = mellin_pair
    comparison = Comparison(left=pairing_mellin910(v, u, nu), right=pairing_kernel320(v, u, nu))
    assert comparison.residual <= 1e-6


def test_comb_check_rejects_small_abscissa(plain_pair):
    v, u = plain_pair
    with pytest.raises(PreconditionError):
        comb_decomp_check(v, u, c=1.0)


@pytest.mark.slow
@pytest.mark.parametrize("N", [None, 15])
def test_comb_decomposition(plain_pair, N):
    v, u = plain_pair
    assert comb_decomp_check(v, u, c=2.0, T=60.0, N=N).residual <= 1e-4
