"""
Hermitian Form Tests
Coefficient tables are checked integer-exact; quadrature sides to 1e-8
"""
import numpy as np
import pytest

from app.models import Comparison
from core.exceptions import PreconditionError
from core.forms import (
    arithmetic_side,
    arithmetic_terms,
    check_eq82,
    check_lemma71,
    check_thm81,
    coeff_c71,
    coeff_eq64,
    coeff_table,
    coeff_table_csv,
    f_N,
    f_N_table,
    finite_form,
    form_lemma83,
    lattice_form,
    t_n,
    theta_map,
)
from core.series import HALF_INF
from core.testfn import zero_like

FORM_TOL = 1e-8


def _agree(left, right, tol=FORM_TOL):
    return abs(left.value - right.value) <= tol * (1.0 + abs(right.value))


# ---------------------------------------------------------------------------
# f_N and the coefficient tables
# ---------------------------------------------------------------------------

def test_f_N_small_values():
    assert f_N(3, 1, 0) == 1
    assert f_N(3, 0, 1) == -1
    assert f_N(1, 0, 0) == 1
    with pytest.raises(PreconditionError):
        f_N(9, 1, 1)


def test_f_N_dft_matches_euler_product():
    dft = f_N_table(15)
    product = f_N_table(15, method="euler_product")
    assert np.array_equal(dft, product)
    for j in range(15):
        for s in range(15):
            assert f_N(15, j, s) == f_N(15, j, s, method="euler_product") == dft[j, s]


def test_f_N_antisymmetry():
    for N, sign in [(3, -1), (15, 1), (105, -1)]:
        table = f_N_table(N)
        assert np.array_equal(table, sign * table.T)


@pytest.mark.parametrize("R,Q", [(1, 3), (3, 1), (3, 5), (1, 15)])
def test_closed_form_coefficients_match_dft(R, Q):
    assert check_lemma71(R, Q) == 0


def test_table_matches_pointwise_construction():
    table = coeff_table(1, 3)
    assert table.modulus == 18
    m, n = np.meshgrid(np.arange(18), np.arange(18), indexing="ij")
    full = coeff_eq64(1, 3, m, n)
    for a in range(18):
        for b in range(18):
            assert table.get(a, b) == full[a, b]
    assert coeff_c71(1, 3, 1, 0) == 0


def test_sampled_coefficients_match_dft():
    assert check_lemma71(3, 5, samples=1000, seed=7) == 0


def test_table_guard_and_csv():
    with pytest.raises(PreconditionError):
        coeff_table(7 * 11 * 13 * 17 * 19 * 23, 15)
    text = coeff_table_csv(coeff_table(1, 3))
    lines = text.splitlines()
    assert lines[:3] == ["R,Q,N", "1,3,3", "m,n,value"]
    assert len(lines) == 3 + len(coeff_table(1, 3).entries)


def test_reflection_symmetry():
    assert check_thm81(1, 3) == 0
    assert check_thm81(5, 1) == 0
    assert check_thm81(19, 3, samples=10_000, seed=0) == 0


# ---------------------------------------------------------------------------
# Theta map and the finite form
# ---------------------------------------------------------------------------

def test_theta_single_term_reduction(plain_pair):
    _, u = plain_pair
    theta = theta_map(u, 3)
    for n in range(-8, 9):
        assert theta[n] == pytest.approx(float(u(n / 3)))
        assert theta[n + 18] == theta[n]
    assert theta_map(zero_like(u), 3).values == {}
    with pytest.raises(PreconditionError):
        theta_map(u, 0)


def test_finite_form_of_zero(plain_pair):
    v, u = plain_pair
    assert finite_form(v, zero_like(u), 5, 3).value == 0


def test_finite_form_matches_lattice_form(plain_pair):
    v, u = plain_pair
    left = finite_form(v, u, 5, 3)
    right = lattice_form(v, u, t_n(15), 3)
    assert _agree(left, right)


@pytest.mark.slow
@pytest.mark.parametrize("R,Q", [(1, 15), (15, 1)])
def test_finite_form_matches_lattice_form_large(plain_pair, R, Q):
    v, u = plain_pair
    assert _agree(finite_form(v, u, R, Q), lattice_form(v, u, t_n(R * Q), Q))


def test_hermitian_form_is_real(plain_pair):
    _, u = plain_pair
    value = lattice_form(u, u, t_n(1), 1).value
    assert abs(value.imag) <= FORM_TOL


def test_lattice_form_arguments(plain_pair):
    v, u = plain_pair
    assert lattice_form(v, zero_like(u), t_n(3), 1).value == 0
    with pytest.raises(PreconditionError):
        lattice_form(v, u, t_n(3), 0)
    with pytest.raises(PreconditionError):
        lattice_form(v, u, t_n(3), 1, method="fft")


def test_poisson_rows_match_direct(plain_pair):
    v, u = plain_pair
    direct = lattice_form(v, u, t_n(15), 3)
    poisson = lattice_form(v, u, t_n(15), 3, method="poisson")
    assert _agree(direct, poisson)


# ---------------------------------------------------------------------------
# Arithmetic closed forms
# ---------------------------------------------------------------------------

def test_arithmetic_side_single_term(plain_pair):
    v, u = plain_pair
    value = arithmetic_side(v, u, 1, 1).value
    assert value == pytest.approx(complex(np.conj(v(2.0)) * u(0.0)))


def test_arithmetic_side_window_enumeration(plain_pair):
    v, u = plain_pair
    terms = {(Q2, R1): (x, y) for Q2, R1, x, y, _ in arithmetic_terms(v, u, "inf_odd", 15)}
    assert (15, 13) in terms
    x, y = terms[(15, 13)]
    assert x == pytest.approx(394 / 195)
    assert y == pytest.approx(-56 / 195)
    with pytest.raises(PreconditionError):
        arithmetic_terms(v, u, "all", 15)


def test_arithmetic_side_vanishes_for_flattened_pair(flat_pair):
    v, u = flat_pair
    assert arithmetic_side(v, u, 1, 1).value == 0


@pytest.mark.parametrize("Q,R", [(1, 1), (3, 5)])
def test_lattice_form_matches_arithmetic_side(plain_pair, Q, R):
    v, u = plain_pair
    comparison = Comparison(left=lattice_form(v, u, t_n(R * Q), Q), right=arithmetic_side(v, u, R, Q))
    assert comparison.relative <= FORM_TOL


@pytest.mark.slow
def test_lattice_form_matches_arithmetic_side_large_level(plain_pair):
    v, u = plain_pair
    R, Q = 7 * 11 * 13 * 17 * 19 * 23, 15
    comparison = Comparison(left=lattice_form(v, u, t_n(R * Q), Q), right=arithmetic_side(v, u, R, Q))
    assert comparison.relative <= FORM_TOL


@pytest.mark.slow
@pytest.mark.parametrize("Q", [1, 3, 15])
def test_odd_limit_matches_arithmetic_side(plain_pair, Q):
    v, u = plain_pair
    comparison = Comparison(left=lattice_form(v, u, HALF_INF, Q), right=arithmetic_side(v, u, "inf_odd", Q))
    assert comparison.relative <= FORM_TOL


# ---------------------------------------------------------------------------
# The reflected form
# ---------------------------------------------------------------------------

def test_form_lemma83_of_zero(plain_pair):
    v, u = plain_pair
    assert form_lemma83(v, zero_like(u), 15).value == 0


@pytest.mark.parametrize("N", [3, pytest.param(15, marks=pytest.mark.slow)])
def test_form_lemma83_matches_lattice_form(plain_pair, N):
    v, u = plain_pair
    assert _agree(form_lemma83(v, u, N), lattice_form(v, u, t_n(N), 1))


def test_reflected_form_identity(plain_pair):
    v, u = plain_pair
    assert check_eq82(v, u, 1, 1).residual <= FORM_TOL
    assert check_eq82(v, u, 19, 3).residual <= FORM_TOL


def test_reflected_form_needs_congruence(plain_pair):
    v, u = plain_pair
    with pytest.raises(PreconditionError):
        check_eq82(v, u, 5, 3)
