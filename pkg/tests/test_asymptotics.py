"""
Tests for the optimal-truncation and level-1 evaluators.
"""

import math

import numpy as np
import pytest

from painlab.asymptotics import (
    EvalRequest,
    eval_level0,
    eval_level1,
    eval_plus,
    evaluate,
    optimal_n,
    resum_boundary,
    seed_point,
    stokes_for_level1,
)
from painlab.continuation import TaylorWalker
from painlab.errors import AsymptoticRangeError, SectorError
from painlab.pipelines import ReferenceBook
from painlab.series import ProblemParams
from painlab.stokes import StokesResult, exact_stokes_mu1


def test_optimal_n(params_mu1, params_mu157):
    """About 70 non-zero terms at x = 33 for mu = 1 and about 11 at x = 6 for mu = 15/7."""
    assert optimal_n(params_mu1.z_of(33)) == 140
    assert optimal_n(params_mu157.z_of(6)) == 23


def test_optimal_n_needs_large_z():
    with pytest.raises(AsymptoticRangeError):
        optimal_n(0.5)
    with pytest.raises(AsymptoticRangeError):
        optimal_n(10, level=2)


def test_level0_mu1_at_33(params_mu1):
    book = ReferenceBook()
    state = eval_level0(33, params_mu1)
    assert abs(state.y - book.value("mu1", "y_33", params_mu1.prec)) < 1e-28
    assert abs(state.dy - book.value("mu1", "dy_33", params_mu1.prec)) < 1e-28


def test_level0_mu157_at_6(params_mu157):
    mp = params_mu157.prec.mp
    state = eval_level0(6, params_mu157)
    assert abs(state.y - mp.mpf("-2.7837507946")) < 1e-8
    assert abs(state.dy - mp.mpf("-0.4971881751")) < 1e-8


def test_level0_exact_solution(params_mu2):
    """mu = 2: y = -x/√6, y' = -1/√6."""
    mp = params_mu2.prec.mp
    state = eval_level0(10, params_mu2)
    assert abs(state.y + 10 / mp.sqrt(6)) < params_mu2.prec.tolerance
    assert abs(state.dy + 1 / mp.sqrt(6)) < params_mu2.prec.tolerance


def test_level0_derivative_matches_difference_quotient(params_mu157):
    mp = params_mu157.prec.mp
    h = mp.mpf(10) ** -7
    x = mp.mpf(9)
    n = optimal_n(params_mu157.z_of(x))
    up = eval_level0(x + h, params_mu157, n_override=n)
    down = eval_level0(x - h, params_mu157, n_override=n)
    mid = eval_level0(x, params_mu157, n_override=n)
    assert abs((up.y - down.y) / (2 * h) - mid.dy) < 1e-11


def test_level0_sector(params_mu1):
    with pytest.raises(SectorError):
        eval_level0(-33, params_mu1)


def test_level0_too_few_terms(params_mu1):
    with pytest.raises(AsymptoticRangeError):
        eval_level0(2, params_mu1, n_override=2)


def test_level1_beats_level0(params_mu157):
    """At x = 6 the level-1 value is far closer to a walked reference than level 0."""
    reference = TaylorWalker(eval_level0(20, params_mu157), params_mu157, 30)
    reference.walk_to(6, 200)
    level0 = eval_level0(6, params_mu157)
    stokes = stokes_for_level1(params_mu157, params_mu157.z_of(6))
    level1 = eval_level1(6, params_mu157, stokes)
    err0 = abs(level0.y - reference.state.y)
    err1 = abs(level1.y - reference.state.y)
    assert err1 < err0 * 1e-3


def test_level1_sector(params_mu1):
    mp = params_mu1.prec.mp
    stokes = stokes_for_level1(params_mu1, params_mu1.z_of(33))
    x = 33 * mp.expj(mp.mpf("1.3"))
    with pytest.raises(SectorError):
        eval_level1(x, params_mu1, stokes)
    eval_level0(x, params_mu1)


def test_level1_without_multipliers_is_long_sum(params_mu157):
    """K± = 0 leaves the 2N-term base sum."""
    from painlab.stokes import StokesResult

    mp = params_mu157.prec.mp
    zero = StokesResult(mp.mpc(0), mp.mpc(0), 0, 0, mp.zero)
    n = optimal_n(params_mu157.z_of(8))
    level1 = eval_level1(8, params_mu157, zero, n_override=n)
    long_sum = eval_level0(8, params_mu157, n_override=2 * n)
    assert abs(level1.y - long_sum.y) < params_mu157.prec.tolerance


def test_evaluate_request(params_mu1):
    result = evaluate(EvalRequest(33, params_mu1))
    assert result.level == 0
    assert result.n_terms == 140
    data = result.to_dict(params_mu1)
    assert {"x_re", "y_re", "dy_im", "level", "N", "est_err"} <= set(data)
    assert float(data["est_err"]) < 1e-50


def test_evaluate_rejects_level(params_mu1):
    with pytest.raises(AsymptoticRangeError):
        evaluate(EvalRequest(33, params_mu1, level=3))


def test_resum_boundary_head(params_mu1):
    """K₊ = 0 leaves -√(x^μ/6)."""
    mp = params_mu1.prec.mp
    x = 30 * mp.expj(2)
    value = resum_boundary(x, params_mu1, 0)
    assert abs(value + mp.sqrt(x / 6)) < params_mu1.prec.tolerance


def test_plus_family_leading_behaviour(params_mu1):
    """y₊ ~ +√(x^μ/6) on the positive axis."""
    mp = params_mu1.prec.mp
    state = eval_plus(40, params_mu1)
    leading = mp.sqrt(mp.mpf(40) / 6)
    assert abs(state.y / leading - 1) < 0.02


def test_evaluator_is_minus_branch_only():
    with pytest.raises(SectorError):
        eval_level0(33, ProblemParams.create(1, a00=1))


def test_evaluate_plus_reports_truncation(params_mu1):
    """The y₊ result carries N and est_err like the y₋ one."""
    result = evaluate(EvalRequest(40, params_mu1, plus=True))
    assert result.level == 0
    assert result.n_terms == optimal_n(params_mu1.z_of(40))
    assert abs(result.state.y - eval_plus(40, params_mu1).y) < params_mu1.prec.tolerance
    data = result.to_dict(params_mu1)
    assert {"N", "est_err", "level"} <= set(data)
    assert float(data["est_err"]) < 1e-30


def test_evaluate_plus_rejects_level(params_mu1):
    with pytest.raises(AsymptoticRangeError):
        evaluate(EvalRequest(40, params_mu1, level=2, plus=True))


def test_seed_point_mu1_sixty_digits():
    params = ProblemParams.create(1, digits=60)
    x0 = seed_point(params)
    assert 33 < x0 < 34
    result = evaluate(EvalRequest(params.prec.real(x0), params))
    assert result.est_err < 1e-58


def test_seed_point_grows_with_digits():
    low = seed_point(ProblemParams.create("15/7", digits=10))
    high = seed_point(ProblemParams.create("15/7", digits=40))
    assert 0 < low < high


def _exact_mu1(params):
    mp = params.prec.mp
    k = exact_stokes_mu1(params.prec)
    return StokesResult(k, mp.conj(k), 0, 0, mp.zero)


def test_level1_continuous_across_real_axis():
    """Level 1 is analytic through arg z = 0: the two sides differ only by y'·Δx."""
    params = ProblemParams.create(1, digits=40)
    mp = params.prec.mp
    stokes = _exact_mu1(params)
    delta = mp.mpf("1e-25")
    x = mp.mpf(10)
    above = eval_level1(x * mp.expj(delta), params, stokes)
    below = eval_level1(x * mp.expj(-delta), params, stokes)
    mid = eval_level1(x, params, stokes)
    jump = (above.y - below.y) - mid.dy * x * (mp.expj(delta) - mp.expj(-delta))
    assert abs(jump) < 1e-30
    assert abs(mid.y - (above.y + below.y) / 2) < 1e-30


@pytest.mark.slow
def test_level1_error_exponent_mu1():
    """Level-1 errors fall like |z| e^(-2√3|z|), far below level 0, at x = 20, 33, 50."""
    params = ProblemParams.create(1, digits=230)
    mp = params.prec.mp
    stokes = _exact_mu1(params)
    walker = TaylorWalker(eval_level1(56, params, stokes), params, 150)
    zs, logs = [], []
    for x, steps in ((50, 12), (33, 34), (20, 26)):
        walker.walk_to(x, steps)
        reference = walker.state.y
        size = float(abs(params.z_of(x)))
        err1 = abs(eval_level1(x, params, stokes).y - reference)
        err0 = abs(eval_level0(x, params).y - reference)
        assert err1 > 0
        assert float(mp.log(err0) - mp.log(err1)) >= math.sqrt(3) * size - 2 * math.log(size)
        zs.append(size)
        logs.append(float(mp.log(err1 / size)))
    slope, _ = np.polyfit(zs, logs, 1)
    assert abs(slope + 2 * math.sqrt(3)) < 0.1 * 2 * math.sqrt(3)
