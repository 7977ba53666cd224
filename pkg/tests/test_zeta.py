"""
Zeta, Gamma and Kernel Tests
mpmath serves as the high-precision oracle
"""
import math

import mpmath
import numpy as np
import pytest

from core.exceptions import PoleError, PreconditionError
from core.zeta import (
    PRINTED_RESIDUE,
    f_kernel,
    f_residue_at_1,
    gamma_complex,
    gamma_values,
    sqfree_odd_dirichlet,
    zeta_N_inverse,
    zeta_N_inverse_values,
    zeta_complex,
    zeta_star_residual,
    zeta_values,
)


@pytest.mark.parametrize("s", [2.0, 0.0, -1.0, 3.0, 0.5 + 3j, -1.5 + 2j, 1.5 - 40j, 0.25 + 100j])
def test_zeta_against_mpmath(s):
    expected = complex(mpmath.zeta(s))
    est = zeta_complex(s)
    assert abs(est.value - expected) <= 1e-10 * max(1.0, abs(expected))
    assert est.err < 1e-9 * max(1.0, abs(expected))


def test_closed_forms():
    assert zeta_complex(2.0).value == pytest.approx(math.pi ** 2 / 6, abs=1e-10)
    assert zeta_complex(0.0).value == pytest.approx(-0.5, abs=1e-10)
    assert zeta_complex(-1.0).value == pytest.approx(-1 / 12, abs=1e-10)


def test_first_zero():
    assert abs(zeta_complex(0.5 + 14.134725142j).value) <= 1e-6


def test_pole_rejected():
    with pytest.raises(PoleError):
        zeta_values([2.0, 1.0])


def test_vectorized_matches_scalar():
    s = np.array([2.0, 2.5 + 1j, -0.5 + 20j])
    values, _ = zeta_values(s)
    for si, value in zip(s, values):
        assert value == pytest.approx(zeta_complex(si).value, abs=1e-13)


@pytest.mark.parametrize("s", [0.5, 3.7, 0.2 + 5j, -3.3 + 1j, 10.0 - 2j])
def test_gamma_against_mpmath(s):
    expected = complex(mpmath.gamma(s))
    assert abs(gamma_complex(s).value - expected) <= 1e-13 * abs(expected)


def test_gamma_vectorized_reflection():
    values = gamma_values([-0.5, 0.5])
    assert values[0] == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-13)
    assert values[1] == pytest.approx(math.sqrt(math.pi), rel=1e-13)


def test_completed_zeta_symmetry_on_grid():
    worst = max(
        zeta_star_residual(complex(a, b))
        for a in np.linspace(-1.5, 2.5, 10)
        for b in np.linspace(0.5, 30.0, 10)
    )
    assert worst <= 1e-10


def test_local_inverse_zeta():
    s = 2.0 + 1j
    expected = (1 - 3 ** -s) * (1 - 5 ** -s)
    assert zeta_N_inverse(s, 15).value == pytest.approx(expected, abs=1e-15)
    assert zeta_N_inverse(s, 1).value == 1.0
    assert zeta_N_inverse_values([2.0], 1).tolist() == [1.0]


def test_local_inverse_zeta_forms_agree_for_large_levels():
    s = np.linspace(1.0, 4.0, 7) + 2j
    values = zeta_N_inverse_values(s, 3 * 5 * 7 * 11 * 13)
    expected = np.prod([1 - p ** -s for p in (3, 5, 7, 11, 13)], axis=0)
    assert np.max(np.abs(values - expected)) < 1e-13


def test_f_kernel_at_two_is_twelve_over_pi_squared():
    assert f_kernel(2.0).value == pytest.approx(12 / math.pi ** 2, abs=1e-10)
    assert PRINTED_RESIDUE == pytest.approx(12 / math.pi ** 2)


def test_f_kernel_matches_mpmath():
    theta = 2.5 + 1.5j
    expected = complex(mpmath.zeta(theta) / mpmath.zeta(2 * theta) / (1 + mpmath.power(2, -theta)))
    assert f_kernel(theta).value == pytest.approx(expected, rel=1e-10)


def test_f_kernel_poles_and_variants():
    with pytest.raises(PoleError):
        f_kernel(1.0)
    with pytest.raises(PreconditionError):
        f_kernel(2.0, variant="other")


def test_f_residues_for_both_variants():
    plus = f_residue_at_1("plus")
    minus = f_residue_at_1("minus")
    assert plus.value == pytest.approx(4 / math.pi ** 2, abs=1e-6)
    assert minus.value == pytest.approx(12 / math.pi ** 2, abs=1e-6)


def test_sqfree_odd_dirichlet_partial_sum():
    partial = sqfree_odd_dirichlet(2.0, 100_000)
    assert abs(partial.value - f_kernel(2.0).value) <= 3e-5
    with pytest.raises(PreconditionError):
        sqfree_odd_dirichlet(1.0, 10)
