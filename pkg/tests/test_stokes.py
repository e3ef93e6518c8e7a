"""
Tests for the Stokes multipliers of y₋.
"""

import pytest

from painlab.errors import StokesInputError
from painlab.series import ProblemParams
from painlab.stokes import compute_stokes, exact_stokes_mu1, late_coefficient_check, stokes_sweep


def test_stokes_mu157(params_mu157):
    """n = 15 with 15 terms."""
    mp = params_mu157.prec.mp
    result = compute_stokes(params_mu157, 15, 15)
    expected = mp.mpc("0.07069725039", "0.01439846034")
    assert abs(result.k_minus - expected) < 5e-10
    assert result.n_used == 30
    assert result.terms_used == 15


def test_stokes_mu4():
    params = ProblemParams.create(4, digits=20)
    mp = params.prec.mp
    result = compute_stokes(params, 15, 15)
    assert abs(result.k_minus - mp.mpc("0.5297382962", "-0.2194247868")) < 5e-10


def test_stokes_mu1_against_closed_form(params_mu1):
    exact = exact_stokes_mu1(params_mu1.prec)
    result = compute_stokes(params_mu1, 30, 30)
    assert abs(result.k_minus - exact) < 1e-12


def test_stokes_error_shrinks_with_n(params_mu1):
    exact = exact_stokes_mu1(params_mu1.prec)
    coarse = abs(compute_stokes(params_mu1, 10, 10).k_minus - exact)
    fine = abs(compute_stokes(params_mu1, 20, 20).k_minus - exact)
    assert fine < coarse * 1e-3


def test_exact_stokes_mu1_modulus_and_argument(params_mu1):
    """|K₋|² = 2√3/(5π) and arg K₋ = -3π/4."""
    mp = params_mu1.prec.mp
    k = exact_stokes_mu1(params_mu1.prec)
    assert abs(abs(k) ** 2 - 2 * mp.sqrt(3) / (5 * mp.pi)) < params_mu1.prec.tolerance
    assert abs(mp.arg(k) + 3 * mp.pi / 4) < params_mu1.prec.tolerance


def test_k_plus_is_conjugate(params_mu157):
    result = compute_stokes(params_mu157, 8, 8)
    assert result.k_plus == params_mu157.prec.mp.conj(result.k_minus)


def test_late_coefficient_rebuilt_from_both_multipliers(params_mu157):
    """Both halves of the late-term relation add back to a_{2n,0}."""
    result = compute_stokes(params_mu157, 10, 10)
    rebuilt, actual = late_coefficient_check(params_mu157, result)
    assert abs(rebuilt - actual) <= 1e-18 * abs(actual)


@pytest.mark.parametrize("n, terms", [(1, 1), (5, 0), (5, 6)])
def test_stokes_input_errors(params_mu1, n, terms):
    with pytest.raises(StokesInputError):
        compute_stokes(params_mu1, n, terms)


def test_stokes_needs_minus_branch():
    with pytest.raises(StokesInputError):
        compute_stokes(ProblemParams.create(1, a00=1), 5, 5)


def test_sweep_improves(params_mu1):
    sweep = stokes_sweep(params_mu1, [10, 20, 30])
    assert len(sweep.results) == 3
    assert not sweep.diverging
    assert [r.n_used for r in sweep.results] == [20, 40, 60]


def test_to_dict_fields(params_mu157):
    data = compute_stokes(params_mu157, 6, 6).to_dict(params_mu157)
    assert set(data) == {"mu", "n", "terms", "K_minus_re", "K_minus_im", "est_err"}
    assert data["mu"] == "15/7"
    assert data["n"] == "6"
