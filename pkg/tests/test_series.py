"""
Tests for the transseries coefficient tables and the closed-form resummations.
"""

from fractions import Fraction

import pytest

from painlab.errors import ResummationPoleError, SeriesError, SeriesRangeError
from painlab.series import (
    ProblemParams,
    base_series,
    closed_form_a0k,
    g0,
    g1,
    level_one_series,
    reflected_row,
    series_residual,
    taylor_at_zero,
    transseries_table,
)


def test_derived_parameters():
    """ν, λ and √(3a00) for mu = 1 and mu = 15/7."""
    p = ProblemParams.create(1)
    mp = p.prec.mp
    assert p.nu_exact == Fraction(1, 2)
    assert abs(p.lam - 8 * mp.power(6, mp.mpf(-1) / 4) / 5) < p.prec.tolerance
    assert abs(p.sqrt3a00**2 + 3) < p.prec.tolerance
    assert mp.im(p.sqrt3a00) > 0
    assert ProblemParams.create("15/7").nu_exact == Fraction(75, 86)
    assert ProblemParams.create(2).nu_exact == Fraction(5, 6)


def test_params_validation():
    with pytest.raises(SeriesError):
        ProblemParams.create(-4)
    with pytest.raises(SeriesError):
        ProblemParams.create(1, a00=2)


def test_base_series_mu1(params_mu1):
    """a₂ = -4/75 and every odd coefficient is zero."""
    a = base_series(params_mu1, 30)
    mp = params_mu1.prec.mp
    assert a[0] == -1
    assert abs(a[2] + mp.mpf(4) / 75) < params_mu1.prec.tolerance
    assert all(a[n] == 0 for n in range(1, 31, 2))


def test_base_series_a4_seed(params_mu1):
    a = base_series(params_mu1, 4)
    nu = params_mu1.nu
    expected = 2 * (2 * nu / 15 - 1) * (3 * nu / 5 - 1) * a[0] * a[2]
    assert abs(a[4] - expected) < params_mu1.prec.tolerance


def test_base_series_needs_depth(params_mu1):
    with pytest.raises(SeriesRangeError):
        base_series(params_mu1, 3)


def test_exact_solution_series_is_constant(params_mu2):
    """mu = 2 gives u = -1 exactly."""
    a = base_series(params_mu2, 20)
    assert a[0] == -1
    assert all(v == 0 for v in a[1:])


def test_series_residual_vanishes(params_mu1):
    a = base_series(params_mu1, 12)
    residual = series_residual(params_mu1, a)
    assert all(abs(r) < params_mu1.prec.tolerance for r in residual)


def test_series_residual_detects_wrong_coefficient(params_mu1):
    a = list(base_series(params_mu1, 8))
    a[6] += 1
    residual = series_residual(params_mu1, a)
    assert abs(residual[6]) > 1


def test_level_one_initial_data(params_mu1):
    """a_{0,1} = 1 and a_{1,1} = ν(ν-1)/(2i√3) = i/(8√3)."""
    mp = params_mu1.prec.mp
    a1 = level_one_series(params_mu1, 10)
    assert a1[0] == 1
    assert abs(a1[1] - mp.mpc(0, 1) / (8 * mp.sqrt(3))) < params_mu1.prec.tolerance


def test_level_one_vanishes_for_nu_zero():
    p = ProblemParams.create(0)
    a1 = level_one_series(p, 15)
    assert a1[0] == 1
    assert all(abs(v) == 0 for v in a1[1:])


def test_table_rows_agree_with_series(params_mu1):
    table = transseries_table(params_mu1, 12, 4)
    tol = params_mu1.prec.tolerance
    for mine, ref in zip(table.row(0), base_series(params_mu1, 12)):
        assert abs(mine - ref) <= tol * (1 + abs(ref))
    for mine, ref in zip(table.row(1), level_one_series(params_mu1, 12)):
        assert abs(mine - ref) <= tol * (1 + abs(ref))
    assert len(table.column(3)) == 5


def test_table_closed_form_first_column(params_mu1):
    """a_{0,k} = k / (12 a00)^(k-1); a_{0,2} = -1/6 for a00 = -1."""
    mp = params_mu1.prec.mp
    table = transseries_table(params_mu1, 4, 6)
    assert abs(table.a(0, 2) + mp.mpf(1) / 6) < params_mu1.prec.tolerance
    for k in range(1, 7):
        assert abs(table.a(0, k) - closed_form_a0k(params_mu1, k)) < params_mu1.prec.tolerance


def test_table_closed_form_positive_branch():
    """a00 = +1 gives a_{0,3} = 3/144."""
    p = ProblemParams.create(1, a00=1)
    mp = p.prec.mp
    table = transseries_table(p, 3, 3)
    assert abs(table.a(0, 3) - mp.mpf(3) / 144) < p.prec.tolerance


def test_table_range(params_mu1):
    with pytest.raises(SeriesRangeError):
        transseries_table(params_mu1, 0, 2)


def test_export_rows(params_mu1):
    table = transseries_table(params_mu1, 3, 2)
    rows = table.export_rows()
    assert len(rows) == 4 * 3
    assert rows[0][:2] == ["0", "0"]
    assert rows[4][:2] == ["0", "1"]
    assert float(rows[0][2]) == -1.0


def test_g0_values(params_mu1):
    """G0(0) = a00 and G0(-24) = -25."""
    assert g0(0, params_mu1) == -1
    assert abs(g0(-24, params_mu1) + 25) < params_mu1.prec.tolerance
    assert g1(0, params_mu1) == 0


def test_resummation_pole(params_mu1):
    with pytest.raises(ResummationPoleError):
        g0(-12, params_mu1)
    with pytest.raises(ResummationPoleError):
        g1(-12, params_mu1)


def test_g0_taylor_matches_table(params_mu1):
    table = transseries_table(params_mu1, 2, 5)
    coeffs = taylor_at_zero(g0, 5, params_mu1)
    for k, c in enumerate(coeffs):
        assert abs(c - table.a(0, k)) < 1e-20


def test_g1_taylor_matches_table(params_mu1):
    """X² coefficient of G1 equals a_{1,2}."""
    table = transseries_table(params_mu1, 2, 2)
    coeffs = taylor_at_zero(g1, 2, params_mu1)
    for k, c in enumerate(coeffs):
        assert abs(c - table.a(1, k)) < 1e-20


def test_reflected_row_matches_opposite_root(params_mu1):
    """(-1)^n a_{n,k} is the table built with the other square root."""
    table = transseries_table(params_mu1, 8, 3)
    other = transseries_table(params_mu1.reflected(), 8, 3)
    for k in (1, 2, 3):
        for mine, theirs in zip(reflected_row(table, k), other.row(k)):
            assert abs(mine - theirs) < 1e-25 * (1 + abs(theirs))
