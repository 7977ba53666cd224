"""
Wigner Transform Tests
"""
import numpy as np
import pytest

from core.testfn import zero_like
from core.wigner import (
    WignerEvaluator,
    euler_apply_check,
    euler_apply_convergence,
    symp_fourier_check,
    wig,
    wig_marginal_check,
)


def test_windows(plain_pair):
    v, u = plain_pair
    ev = WignerEvaluator(v, u)
    lo, hi = ev.x_window
    assert lo == pytest.approx(0.0)
    assert hi == pytest.approx(0.5 * (2 ** 1.5 + 1))
    t_lo, t_hi = ev.t_window(0.9)
    assert t_lo == pytest.approx(0.1) and t_hi == pytest.approx(1.9)


def test_outside_window_is_zero(plain_pair):
    v, u = plain_pair
    assert wig(v, u, 3.0, 0.5).value == 0
    assert wig(v, zero_like(u), 0.9, 0.5).value == 0


def test_adaptive_and_fixed_rules_agree(plain_pair):
    v, u = plain_pair
    ev = WignerEvaluator(v, u)
    for x, xi in [(0.8, 0.3), (1.2, -0.5)]:
        assert abs(ev.wig(x, xi).value - ev.wig_fixed(x, xi)) < 1e-10
    row = ev.row(0.8, np.array([0.3, -0.5]))
    assert abs(row[0] - ev.wig_fixed(0.8, 0.3)) < 1e-10


def test_hermitian_symmetry_of_self_transform(plain_pair):
    _, u = plain_pair
    value = wig(u, u, 0.3, 0.7).value
    assert abs(value.imag) < 1e-12


def test_marginal_with_disjoint_supports_is_zero(plain_pair):
    v, u = plain_pair
    est = wig_marginal_check(v, u, 0.9, tol=1e-8)
    assert abs(est.value) <= 1e-6


def test_marginal_recovers_product(plain_pair):
    _, u = plain_pair
    est = wig_marginal_check(u, u, 0.2, tol=1e-8)
    assert abs(est.value) <= 1e-6


@pytest.mark.parametrize("x,xi", [(0.8, 0.3), (1.0, 0.0), (1.2, -0.5), (0.6, 1.0), (1.4, 0.2)])
def test_euler_operator_identity(plain_pair, x, xi):
    v, u = plain_pair
    assert euler_apply_check(v, u, x, xi) <= 1e-6


def test_euler_residual_shrinks_with_step(plain_pair):
    v, u = plain_pair
    residuals, order = euler_apply_convergence(v, u, 0.8, 0.3)
    assert residuals[1] < residuals[0]
    assert order >= 3.5


def test_symplectic_fourier_reflection(plain_pair):
    v, u = plain_pair
    assert symp_fourier_check(v, u, [(0.9, 0.0), (1.2, 0.5)]) < 1e-3
    assert symp_fourier_check(v, zero_like(u), [(0.9, 0.0)]) == 0.0
