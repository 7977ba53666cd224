"""
Test Function Tests
"""
import math

import mpmath
import numpy as np
import pytest

from app.models import Parity, TestFamily
from core.exceptions import PreconditionError, SupportClassError
from core.testfn import (
    check_flatness,
    differentiate,
    dilate,
    eval_deriv,
    homog_component,
    inner,
    mellin_c,
    mellin_c_values,
    mellin_reconstruct,
    reflected,
    require_support_class,
    rescale_uQ,
    scaled,
    times_power,
    translate,
    zero_like,
)


def _u_mp(r, delta=None):
    """Oracle for canonical_u on 0 < r < 1"""
    value = -1 / ((r + 1) * (1 - r))
    if delta is not None:
        value -= delta ** 2 / r ** 2
    return mpmath.exp(value)


def test_canonical_supports_and_values(plain_pair):
    v, u = plain_pair
    assert v.support == (1.0, pytest.approx(2 ** 1.5))
    assert u.support == (-1.0, 1.0)
    assert u.parity == Parity.EVEN
    assert float(u(0.0)) == pytest.approx(math.exp(-1.0))
    assert float(u(0.3)) == float(u(-0.3))
    assert np.all(v(np.array([0.5, 1.0, 3.0])) == 0.0)


def test_flattened_family_vanishes_at_flat_points(flat_pair):
    v, u = flat_pair
    assert u.family == TestFamily.FLATTENED_BUMP
    assert u.flat_points == (0.0,)
    assert v.flat_points == (2.0,)
    assert float(u(0.0)) == 0.0
    assert check_flatness(u) < 1e-200
    assert check_flatness(v) < 1e-200


def test_derivatives_match_finite_differences(plain_pair):
    v, _ = plain_pair
    x, h = 1.7, 1e-4
    fd1 = (v(x + h) - v(x - h)) / (2 * h)
    fd2 = (v(x + h) - 2 * v(x) + v(x - h)) / h ** 2
    assert float(eval_deriv(v, x, 1)) == pytest.approx(float(fd1), rel=1e-6)
    assert float(eval_deriv(v, x, 2)) == pytest.approx(float(fd2), rel=1e-4)
    assert float(differentiate(v)(x)) == pytest.approx(float(eval_deriv(v, x, 1)))


def test_transformations(plain_pair):
    v, u = plain_pair
    x = 1.3
    assert float(times_power(v, 2)(x)) == pytest.approx(x * x * float(v(x)))
    assert float(translate(u, 0.5)(0.7)) == pytest.approx(float(u(0.2)))
    assert float(dilate(u, 2.0)(0.2)) == pytest.approx(float(u(0.4)))
    assert float(reflected(translate(u, 0.2))(-0.5)) == pytest.approx(float(u(0.3)))
    assert complex(scaled(u, 2j)(0.0)) == pytest.approx(2j * math.exp(-1.0))
    assert zero_like(u).is_zero
    with pytest.raises(PreconditionError):
        differentiate(times_power(v, 1))
    with pytest.raises(PreconditionError):
        differentiate(v, 3)
    with pytest.raises(PreconditionError):
        eval_deriv(v, x, 3)


def test_rescaled_u(plain_pair):
    _, u = plain_pair
    Q, eps, y = 7.0, 0.5, 0.1
    uQ = rescale_uQ(u, Q, eps)
    assert float(uQ(y)) == pytest.approx(Q ** (eps / 2) * float(u(Q ** eps * y)))
    assert rescale_uQ(u, Q, 0.0) is u
    with pytest.raises(PreconditionError):
        rescale_uQ(u, 0.5, eps)


def test_inner_products(plain_pair):
    v, u = plain_pair
    assert inner(v, u).value == 0
    expected = float(mpmath.quad(lambda r: _u_mp(r) ** 2, [0, 1])) * 2
    assert inner(u, u).value == pytest.approx(expected, rel=1e-9)


def test_support_class(plain_pair):
    v, u = plain_pair
    require_support_class(v, u)
    with pytest.raises(SupportClassError):
        require_support_class(v, dilate(u, 0.5))
    with pytest.raises(SupportClassError):
        require_support_class(translate(v, -1.5), u)
    with pytest.raises(SupportClassError):
        require_support_class(translate(v, 0.5), u)


@pytest.mark.parametrize("mu", [0.3, 0.3 + 2j, 1.0 + 4j])
def test_mellin_against_mpmath_plain(plain_pair, mu):
    _, u = plain_pair
    expected = complex(mpmath.quad(lambda r: r ** (mu - 0.5) * _u_mp(r), [0, 1])) / (2 * math.pi)
    assert abs(mellin_c(u, mu).value - expected) < 1e-8


def test_mellin_against_mpmath_flattened(mellin_pair):
    _, u = mellin_pair
    mu = 1.5 + 3j
    expected = complex(mpmath.quad(lambda r: r ** (mu - 0.5) * _u_mp(r, 0.25), [0, 0.5, 1])) / (2 * math.pi)
    assert abs(mellin_c(u, mu).value - expected) < 1e-9


def test_mellin_decay_of_flattened_u(mellin_pair):
    _, u = mellin_pair
    values, _ = mellin_c_values(u, [0.0, 200j, 400j])
    assert np.all(np.abs(values[1:]) < 1e-3 * abs(values[0]))


def test_homogeneous_component(plain_pair):
    _, u = plain_pair
    comp = homog_component(u, 0.2)
    assert comp(0.5) == pytest.approx(comp.c.value * 0.5 ** -0.7)
    assert comp(-0.5) == comp(0.5)


def test_mellin_reconstruction(mellin_pair):
    _, u = mellin_pair
    est = mellin_reconstruct(u, 0.5)
    assert abs(est.value - float(u(0.5))) < 1e-6
    with pytest.raises(PreconditionError):
        mellin_reconstruct(u, 0.0)
