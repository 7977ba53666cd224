"""
Quadrature Engine Tests
"""
import math

import numpy as np
import pytest

from app.models import PanelRule
from core.exceptions import ConvergenceError, PreconditionError
from core.quad import (
    circle_mean,
    composite_nodes,
    graded_edges,
    integrate_compact,
    integrate_vertical,
    richardson_limit,
    transform_panels,
    vertical_integral,
)


def test_composite_rule_integrates_polynomials_exactly():
    x, w = composite_nodes(0.0, 2.0, 3, order=8)
    assert np.sum(w * x ** 7) == pytest.approx(2.0 ** 8 / 8, rel=1e-14)


def test_empty_interval_is_zero():
    assert integrate_compact(np.exp, (1.0, 1.0)).value == 0


def test_smooth_integral_and_error_bound():
    est = integrate_compact(np.exp, (0.0, 1.0))
    assert abs(est.value - (math.e - 1.0)) <= max(est.err, 1e-14)
    assert est.err < 1e-10


def test_oscillatory_integral_with_more_panels():
    est = integrate_compact(lambda t: np.exp(40j * t), (0.0, 1.0), panels=8)
    exact = (np.exp(40j) - 1.0) / 40j
    assert abs(est.value - exact) < 1e-12


def test_panel_cap_raises():
    rule = PanelRule(order=8, rel_tol=1e-15, abs_tol=1e-300, max_panels=4)
    with pytest.raises(ConvergenceError):
        integrate_compact(lambda t: np.abs(t - 0.3) ** 0.5, (0.0, 1.0), rule=rule)


def test_graded_edges_refine_toward_endpoint():
    edges = graded_edges(0.0, 1.0, 0.0, levels=10)
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert edges[1] == pytest.approx(2.0 ** -10)
    assert np.all(np.diff(edges) > 0)
    with pytest.raises(PreconditionError):
        graded_edges(0.0, 1.0, 0.5)


def test_vertical_gaussian():
    # integral of exp((nu - c)^2) over nu = c + i lam is sqrt(pi)
    est = integrate_vertical(lambda nu: np.exp((nu - 2.0) ** 2), 2.0, T=12.0, extend_to=12.0)
    assert est.value == pytest.approx(math.sqrt(math.pi), abs=1e-10)


def test_vertical_extends_until_tail_is_small():
    # 1/(1 + lam^2) decays slowly; the contour records how far it went
    f = lambda nu: 1.0 / (1.0 - (nu - 1.5) ** 2)
    est, contour = vertical_integral(f, 1.5, T=16.0, tol=1e-3, extend_to=4096.0)
    assert contour.height > 16.0
    assert abs(est.value - math.pi) <= est.err + 1e-6


def test_vertical_growth_raises():
    with pytest.raises(ConvergenceError):
        integrate_vertical(lambda nu: np.exp(np.abs(nu.imag) / 10.0), 0.0, T=64.0, extend_to=64.0)


def test_transform_panels_matches_fourier_of_gaussian():
    xis = np.array([0.0, 1.0, 2.5])
    values, errs = transform_panels(
        lambda s: np.exp(-s * s), lambda s: s, -8.0, 8.0, 2j * math.pi * xis, rates=[1.0]
    )
    exact = math.sqrt(math.pi) * np.exp(-(math.pi * xis) ** 2)
    assert np.max(np.abs(values - exact)) < 1e-12
    assert np.all(errs < 1e-10)


def test_richardson_recovers_linear_limit():
    steps = [0.1, 0.05, 0.025]
    est = richardson_limit(steps, [3.0 + 2.0 * h + h * h for h in steps])
    assert est.value == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(PreconditionError):
        richardson_limit([0.1], [1.0])


def test_circle_mean_of_analytic_function():
    assert circle_mean(np.exp, 0.5 + 0.5j, 0.1) == pytest.approx(np.exp(0.5 + 0.5j), abs=1e-14)
