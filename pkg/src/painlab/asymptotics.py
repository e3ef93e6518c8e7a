"""Evaluate y₋(x) at large |x| from its divergent expansion.

Level 0 truncates Σ a_{n,0} z^(-n) optimally; level 1 adds the hyperterminant
re-expansion of the remainder, which carries the Stokes switching of K±.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from painlab.continuation import SolutionState
from painlab.errors import AsymptoticRangeError, SectorError
from painlab.precision import hyperterminant_f1, hyperterminant_f1_dz
from painlab.series import ProblemParams, base_series, level_one_series
from painlab.stokes import StokesResult, compute_stokes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalRequest:
    x: object
    params: ProblemParams
    level: int = 0
    n_override: Optional[int] = None
    plus: bool = False


@dataclass(frozen=True)
class AsymptoticResult:
    state: SolutionState
    level: int
    n_terms: int
    est_err: object

    def to_dict(self, params: ProblemParams) -> dict:
        prec = params.prec
        out = self.state.to_dict(prec)
        out.update({"level": self.level, "N": self.n_terms, "est_err": prec.mp.nstr(self.est_err, 5)})
        return out


def optimal_n(z, level: int = 0) -> int:
    """round(√3|z|), ties to even.

    N counts series indices; odd coefficients vanish so about N/2 terms are
    non-zero. Level 1 uses the same N for its inner sums and 2N for the outer.
    """
    if level not in (0, 1):
        raise AsymptoticRangeError(f"level must be 0 or 1, got {level}")
    size = float(abs(z))
    if size <= 1:
        raise AsymptoticRangeError(f"|z| = {size:.3g} is too small for optimal truncation (need |z| > 1)")
    return round(math.sqrt(3) * size)


def _require_y_minus(params: ProblemParams) -> None:
    if params.a00 != -1 or params.root_sign != 1:
        raise SectorError("the evaluator implements the y- branch only (a00 = -1); use eval_plus for y+")


def _resolve_log(x, params: ProblemParams, log_x):
    mp = params.prec.mp
    x = mp.convert(x)
    if x == 0:
        raise AsymptoticRangeError("x = 0 is not in the asymptotic region")
    return x, (mp.convert(log_x) if log_x is not None else mp.log(x))


def _check_level0_sector(log_x, params: ProblemParams) -> None:
    mp = params.prec.mp
    bound = 4 * mp.pi / (params.mu_mp + 4)
    if abs(mp.im(log_x)) >= bound:
        raise SectorError(f"arg x = {mp.nstr(mp.im(log_x), 6)} outside |arg x| < 4pi/(mu+4) = {mp.nstr(bound, 6)}")


def _assemble(x, log_x, params: ProblemParams, u, z_du):
    """y, y' from u(z) and z·u'(z) via the prefactor √(x^μ/6)."""
    pref = params.prefactor_from_log(log_x)
    y = pref * u
    dy = pref / x * (params.mu_mp / 2 * u + params.q * z_du)
    return y, dy


def _level0(x, params: ProblemParams, n_override, log_x):
    _require_y_minus(params)
    mp = params.prec.mp
    x, log_x = _resolve_log(x, params, log_x)
    _check_level0_sector(log_x, params)
    z = params.z_from_log(log_x)
    n_terms = n_override if n_override is not None else optimal_n(z, 0)
    if n_terms < 4:
        raise AsymptoticRangeError(f"|z| = {mp.nstr(abs(z), 5)} gives N = {n_terms} < 4 terms")
    a = base_series(params, max(n_terms + 1, 4))
    inv = 1 / z
    u = mp.zero
    z_du = mp.zero
    power = mp.one
    for n in range(n_terms):
        u += a[n] * power
        z_du -= n * a[n] * power
        power *= inv
    y, dy = _assemble(x, log_x, params, u, z_du)
    first_omitted = a[n_terms] if a[n_terms] != 0 else a[n_terms + 1] * inv
    est = abs(first_omitted * power * params.prefactor_from_log(log_x))
    return AsymptoticResult(SolutionState(x, y, dy), 0, n_terms, est)


def eval_level0(x, params: ProblemParams, n_override: Optional[int] = None, log_x=None) -> SolutionState:
    """y₋ and y₋' from the optimally truncated series and its exact derivative."""
    return _level0(x, params, n_override, log_x).state


def _level1(x, params: ProblemParams, stokes: StokesResult, n_override, log_x):
    _require_y_minus(params)
    prec = params.prec
    mp = prec.mp
    x, log_x = _resolve_log(x, params, log_x)
    z = params.z_from_log(log_x)
    if abs(mp.im(log_x)) * params.q >= mp.pi / 2:
        raise SectorError(f"arg z = {mp.nstr(params.q * mp.im(log_x), 6)} outside |arg z| < pi/2")
    n_terms = n_override if n_override is not None else optimal_n(z, 1)
    if n_terms < 2:
        raise AsymptoticRangeError(f"|z| = {mp.nstr(abs(z), 5)} too small for the level-1 expansion")

    a0 = base_series(params, max(2 * n_terms, 4))
    a1 = level_one_series(params, n_terms)
    inv = 1 / z
    u = mp.zero
    z_du = mp.zero
    power = mp.one
    for n in range(2 * n_terms):
        u += a0[n] * power
        z_du -= n * a0[n] * power
        power *= inv

    s = params.sqrt3a00
    plus = mp.zero
    plus_dz = mp.zero
    minus = mp.zero
    minus_dz = mp.zero
    for n in range(n_terms):
        order = 2 * n_terms - n - params.nu
        f_plus = hyperterminant_f1(z, order, s, prec)
        f_minus = hyperterminant_f1(z, order, -s, prec)
        sign = -1 if n % 2 else 1
        plus += sign * a1[n] * f_plus
        plus_dz += sign * a1[n] * hyperterminant_f1_dz(z, order, s, prec, f_plus)
        minus += a1[n] * f_minus
        minus_dz += a1[n] * hyperterminant_f1_dz(z, order, -s, prec, f_minus)

    two_pi_i = 2 * mp.pi * mp.j
    h = (stokes.k_plus * plus - stokes.k_minus * minus) / two_pi_i
    h_dz = (stokes.k_plus * plus_dz - stokes.k_minus * minus_dz) / two_pi_i
    scale = mp.power(z, 1 - 2 * n_terms)
    u += scale * h
    # z d/dz [z^(1-2N) H] = z^(1-2N) [(1-2N) H + z H']
    z_du += scale * ((1 - 2 * n_terms) * h + z * h_dz)

    y, dy = _assemble(x, log_x, params, u, z_du)
    est = mp.exp(-2 * mp.sqrt(3) * abs(z)) * abs(z) * abs(params.prefactor_from_log(log_x))
    return AsymptoticResult(SolutionState(x, y, dy), 1, n_terms, est)


def eval_level1(
    x, params: ProblemParams, stokes: StokesResult, n_override: Optional[int] = None, log_x=None
) -> SolutionState:
    """y₋ and y₋' from the level-1 hyperasymptotic expansion."""
    return _level1(x, params, stokes, n_override, log_x).state


def stokes_for_level1(params: ProblemParams, z) -> StokesResult:
    """K± accurate enough for a level-1 evaluation at z.

    The late-term relation gains roughly a factor 4 per unit of n, and K must
    be known to about e^(-√3|z|) relative accuracy.
    """
    mp = params.prec.mp
    target = float(mp.sqrt(3) * abs(z)) / math.log(4)
    digits = params.prec.working_digits * math.log(10) / math.log(4)
    n = max(15, math.ceil(min(target, digits)) + 5)
    return compute_stokes(params, n, n)


def evaluate(request: EvalRequest, stokes: Optional[StokesResult] = None) -> AsymptoticResult:
    params = request.params
    if request.plus:
        return _plus(request.x, params, request.level, stokes, request.n_override, None)
    if request.level == 0:
        return _level0(request.x, params, request.n_override, None)
    if request.level != 1:
        raise AsymptoticRangeError(f"level must be 0 or 1, got {request.level}")
    if stokes is None:
        stokes = stokes_for_level1(params, params.z_of(request.x))
    return _level1(request.x, params, stokes, request.n_override, None)


def resum_boundary(x, params: ProblemParams, k_plus, log_x=None):
    """Resummed first exponential near arg x = 4π/(μ+4).

    √(x^μ/6)·(-1 + E/(1 + E/12)²) with E = K₊ e^(i√3 z) z^(-ν); the double
    poles sit where 12 + E = 0.
    """
    _require_y_minus(params)
    prec = params.prec
    mp = prec.mp
    x, log_x = _resolve_log(x, params, log_x)
    z = params.z_from_log(log_x)
    # z^(-ν) = λ^(-ν) x^(-ν(μ+4)/4) on the branch of log x
    z_pow = mp.exp(-params.nu * (mp.log(params.lam) + params.q * log_x))
    e = mp.convert(k_plus) * mp.exp(params.sqrt3a00 * z) * z_pow
    denom = 1 + e / 12
    if abs(denom) <= prec.tolerance:
        raise SectorError(f"resummed transseries has a double pole at x = {mp.nstr(x, 10)}")
    return params.prefactor_from_log(log_x) * (-1 + e / denom**2)


def rotation(params: ProblemParams):
    """e^(2πi/(μ+4)), the map between the y₋ and y₊ families."""
    mp = params.prec.mp
    return mp.expjpi(2 / (params.mu_mp + 4))


def _plus(x, params: ProblemParams, level: int, stokes: Optional[StokesResult], n_override, log_x) -> AsymptoticResult:
    mp = params.prec.mp
    x, log_x = _resolve_log(x, params, log_x)
    omega = rotation(params)
    rotated_log = log_x + 2 * mp.pi * mp.j / (params.mu_mp + 4)
    rotated_x = omega * x
    if level == 0:
        inner = _level0(rotated_x, params, n_override, rotated_log)
    elif level == 1:
        if stokes is None:
            stokes = stokes_for_level1(params, params.z_from_log(rotated_log))
        inner = _level1(rotated_x, params, stokes, n_override, rotated_log)
    else:
        raise AsymptoticRangeError(f"level must be 0 or 1, got {level}")
    # |ω| = 1: the error estimate carries over unchanged
    state = SolutionState(x, omega**2 * inner.state.y, omega**3 * inner.state.dy)
    return AsymptoticResult(state, inner.level, inner.n_terms, inner.est_err)


def eval_plus(x, params: ProblemParams, level: int = 0, stokes: Optional[StokesResult] = None, log_x=None) -> SolutionState:
    """y₊(x) = ω² y₋(ωx) with ω = e^(2πi/(μ+4)); y₊'(x) = ω³ y₋'(ωx)."""
    return _plus(x, params, level, stokes, None, log_x).state


def seed_point(params: ProblemParams, extra_digits: int = 2) -> Fraction:
    """Smallest positive real x, rounded up to 1/100, where level 0 reaches the target precision.

    Optimal truncation leaves about e^(-√3|z|), so |z| must reach
    (digits + extra)·ln 10 / √3. For μ = 1 at 60 digits this is x ≈ 33.
    """
    digits = params.prec.target_digits + extra_digits
    z_min = max(digits * math.log(10) / math.sqrt(3), 4.0)
    x = (z_min / float(params.lam)) ** (1 / float(params.q))
    return Fraction(math.ceil(x * 100), 100)
