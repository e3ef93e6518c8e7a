"""
Tests for the arbitrary-precision kernel.
"""

import mpmath
import pytest

from painlab.errors import GammaPoleError, IncompleteGammaOriginError, PrecisionError
from painlab.precision import (
    PrecisionContext,
    gamma,
    hyperterminant_f1,
    hyperterminant_f1_dz,
    pochhammer,
    upper_incomplete_gamma,
)


@pytest.fixture
def prec():
    return PrecisionContext(30)


def test_gamma_known_values(prec):
    """Γ(1), Γ(5) and Γ(1/2)."""
    mp = prec.mp
    assert gamma(1, prec) == 1
    assert gamma(5, prec) == 24
    assert abs(gamma(mp.mpf(1) / 2, prec) - mp.sqrt(mp.pi)) < prec.tolerance


@pytest.mark.parametrize("z", [0, -1, -7])
def test_gamma_poles_raise(prec, z):
    """Non-positive integers are poles."""
    with pytest.raises(GammaPoleError):
        gamma(z, prec)


def test_gamma_functional_equation(prec):
    mp = prec.mp
    for z in [mp.mpc("0.3", "1.7"), mp.mpc("-4.5", "0.2"), mp.mpf("12.25")]:
        lhs = gamma(z + 1, prec)
        rhs = z * gamma(z, prec)
        assert abs(lhs - rhs) <= prec.tolerance * abs(lhs)


def test_incomplete_gamma_values(prec):
    """Γ(1, 1) = e⁻¹ and Γ(0, 1) = E₁(1)."""
    mp = prec.mp
    assert abs(upper_incomplete_gamma(1, 1, prec) - mp.exp(-1)) < prec.tolerance
    e1 = upper_incomplete_gamma(0, 1, prec)
    assert abs(e1 - mp.mpf("0.219383934395520273677163775460")) < mp.mpf(10) ** -28
    quad = mp.quad(lambda t: mp.exp(-t) / t, [1, mp.inf])
    assert abs(e1 - quad) < prec.tolerance


def test_incomplete_gamma_at_origin(prec):
    assert upper_incomplete_gamma(2, 0, prec) == 1
    with pytest.raises(IncompleteGammaOriginError):
        upper_incomplete_gamma(0, 0, prec)
    with pytest.raises(IncompleteGammaOriginError):
        upper_incomplete_gamma(-3, 0, prec)


def test_incomplete_gamma_downward_recurrence(prec):
    """Γ(a-1, z) = (Γ(a, z) - z^(a-1) e^(-z)) / (a-1), seeded from Γ(0, z) = E₁(z)."""
    mp = prec.mp
    z = mp.mpc(2, 1)
    ladder = mp.e1(z)
    for a in [0, -1, -2]:
        ladder = (ladder - mp.power(z, a - 1) * mp.exp(-z)) / (a - 1)
    direct = upper_incomplete_gamma(-3, z, prec)
    assert abs(direct - ladder) <= prec.tolerance * abs(direct)


def test_hyperterminant_collapses_at_order_one(prec):
    """N = 0 leaves -e^(σz) Γ(0, σz)."""
    mp = prec.mp
    z = mp.mpc(3, 2)
    sigma = mp.mpc(0, mp.sqrt(3))
    expected = -mp.exp(sigma * z) * mp.e1(sigma * z)
    got = hyperterminant_f1(z, 1, sigma, prec)
    assert abs(got - expected) <= prec.tolerance * abs(expected)


def test_hyperterminant_large_argument_size(prec):
    """For |σz| >> N the incomplete gamma is w^(-N-1) e^(-w), so |F1| ≈ Γ(N+1) / (|σ|^(N+1) |z|)."""
    mp = prec.mp
    z = mp.mpf(400)
    sigma = mp.mpf(1)
    order = 3
    value = hyperterminant_f1(z, order, sigma, prec)
    leading = gamma(order, prec) / z
    assert abs(abs(value) / leading - 1) < mp.mpf("0.02")


def test_hyperterminant_derivative_matches_numeric(prec):
    mp = prec.mp
    z = mp.mpc(2, 1)
    sigma = mp.mpc(0, mp.sqrt(3))
    order = mp.mpf("3.5")
    analytic = hyperterminant_f1_dz(z, order, sigma, prec)
    numeric = mp.diff(lambda t: hyperterminant_f1(t, order, sigma, prec), z)
    assert abs(analytic - numeric) <= mp.mpf(10) ** -15 * abs(analytic)


def test_hyperterminant_needs_nonzero_z(prec):
    with pytest.raises(IncompleteGammaOriginError):
        hyperterminant_f1(0, 2, 1, prec)


def test_pochhammer(prec):
    mp = prec.mp
    assert abs(pochhammer(-1, 3, prec)) < prec.tolerance
    assert abs(pochhammer(mp.mpf("-2.25"), 0, prec) - 1) < prec.tolerance
    assert abs(pochhammer(mp.mpf(1) / 2, 3, prec) - mp.mpf(15) / 8) < prec.tolerance
    with pytest.raises(PrecisionError):
        pochhammer(1, -1, prec)


def test_contexts_are_isolated():
    """Two contexts keep their own precision and leave the global one alone."""
    before = mpmath.mp.dps
    low = PrecisionContext(15)
    high = PrecisionContext(80)
    assert low.mp.dps == 35
    assert high.mp.dps == 100
    assert low.mp.sqrt(2) != high.mp.sqrt(2)
    assert mpmath.mp.dps == before


def test_context_validation():
    with pytest.raises(PrecisionError):
        PrecisionContext(30, guard_digits=5)
    with pytest.raises(PrecisionError):
        PrecisionContext(0)


def test_scaled_for_adds_factorial_digits():
    prec = PrecisionContext(30)
    assert prec.scaled_for(1) is prec
    scaled = prec.scaled_for(100)
    assert scaled.target_digits == 30
    assert scaled.guard_digits == 20 + 158


def test_cplx_reads_strings_and_fractions(prec):
    from fractions import Fraction

    mp = prec.mp
    assert prec.cplx("1+2j") == mp.mpc(1, 2)
    assert abs(prec.cplx(Fraction(1, 3)) - mp.mpf(1) / 3) < prec.tolerance
