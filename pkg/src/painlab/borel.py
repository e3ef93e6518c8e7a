"""Borel-plane data and the summability bounds σ(ν), σ̃(μ).

b(t) = Σ a_{n+1,0} t^n / n! solves a Volterra-type integral equation whose
fixed-point map is a contraction in the norm sup |h(t)| e^(-σt)/c once c and
σ satisfy two closing inequalities; the smallest such σ bounds the growth of
b and hence where the Laplace integral converges.
"""
import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from painlab.errors import BorelError, InfeasibleBoundError
from painlab.precision import PrecisionContext
from painlab.series import ProblemParams, base_series

logger = logging.getLogger(__name__)

FALLBACK_C = Fraction(7, 10)

CMode = Union[str, float, Fraction, None]


def borel_taylor(params: ProblemParams, N: int) -> List:
    """b_0..b_N of the Borel transform, b_n = a_{n+1,0}/n!."""
    if params.a00 != -1:
        raise BorelError("the Borel transform is built for a00 = -1")
    if N < 1:
        raise BorelError(f"N must be at least 1, got {N}")
    mp = params.prec.mp
    a = base_series(params, max(N + 1, 4))
    return [a[n + 1] / mp.factorial(n) for n in range(N + 1)]


def growth_rate(b: Sequence, prec: PrecisionContext):
    """Root-test estimate max |b_n|^(1/n) over n in [N/2, N]; tends to 1/√3."""
    mp = prec.mp
    N = len(b) - 1
    rates = [abs(b[n]) ** (mp.one / n) for n in range(max(1, N // 2), N + 1) if b[n] != 0]
    if not rates:
        return mp.zero
    return max(rates)


def a20_of(nu, prec: PrecisionContext):
    """a_{2,0} = (4/15) ν (6ν/5 - 1) for a00 = -1."""
    nu = prec.real(nu)
    return prec.mp.mpf(4) / 15 * nu * (6 * nu / 5 - 1)


def optimal_c(nu, prec: Optional[PrecisionContext] = None):
    """c = √(3/α² + 4/α) - √3/α with α = |ν/a_{2,0}| + 3/2.

    Falls back to c = 7/10 when a_{2,0} vanishes (ν = 0 or ν = 5/6).
    """
    prec = prec or PrecisionContext()
    mp = prec.mp
    a2 = a20_of(nu, prec)
    if a2 == 0:
        logger.warning(f"⚠️ a20 = 0 at nu = {nu}; using c = 7/10")
        return prec.real(FALLBACK_C)
    alpha = abs(prec.real(nu) / a2) + mp.mpf(3) / 2
    return c_of_alpha(alpha, prec)


def c_of_alpha(alpha, prec: PrecisionContext):
    mp = prec.mp
    alpha = prec.real(alpha)
    return mp.sqrt(3 / alpha**2 + 4 / alpha) - mp.sqrt(3) / alpha


def mu_from_nu(nu) -> Optional[Fraction]:
    """μ = 8ν/(5 - 2ν), or None when no μ > -4 maps to ν (ν ≥ 5/2)."""
    nu = Fraction(nu)
    if nu >= Fraction(5, 2):
        return None
    return 8 * nu / (5 - 2 * nu)


@dataclass(frozen=True)
class BorelBound:
    nu: object
    c: object
    sigma: object
    sigma_tilde: Optional[object]
    lhs1: object
    lhs2: object
    mu: Optional[object] = None
    note: str = ""

    def to_dict(self, prec: PrecisionContext) -> dict:
        out = {}
        for key, value in asdict(self).items():
            if key == "note":
                out[key] = value
            elif value is None:
                out[key] = None
            else:
                out[key] = prec.fmt(value)
        return out

    def sigma_row(self, prec: PrecisionContext) -> List[str]:
        return [prec.fmt(self.nu), prec.fmt(self.c), prec.fmt(self.sigma)]

    def sigma_tilde_row(self, prec: PrecisionContext) -> Optional[List[str]]:
        if self.mu is None or self.sigma_tilde is None:
            return None
        return [prec.fmt(self.mu), prec.fmt(self.sigma_tilde)]


SIGMA_CSV_HEADER = ["nu", "c", "sigma"]
SIGMA_TILDE_CSV_HEADER = ["mu", "sigma_tilde"]


def resolve_c(nu, c_mode: CMode, prec: PrecisionContext):
    """'optimal' (or None) → closed form; anything else is read as a number."""
    if c_mode is None or (isinstance(c_mode, str) and c_mode.strip().lower() == "optimal"):
        return optimal_c(nu, prec)
    if isinstance(c_mode, str):
        try:
            c_mode = Fraction(c_mode.strip())
        except ValueError:
            raise BorelError(f"c must be 'optimal' or a number, got {c_mode!r}")
    c = prec.real(c_mode)
    if c <= 0:
        raise BorelError(f"c must be positive, got {c_mode}")
    return c


def closing_lhs(nu, c, sigma, prec: PrecisionContext):
    """Left-hand sides of the two closing inequalities at (c, σ)."""
    mp = prec.mp
    nu = prec.real(nu)
    c = prec.real(c)
    sigma = prec.real(sigma)
    a2 = abs(a20_of(nu, prec))
    b = (abs(nu) + mp.mpf(3) / 2 * a2) / mp.sqrt(3)
    root3 = mp.sqrt(3)
    if sigma == 0:
        return root3 / 4 * c, root3 / 2 * c
    lhs1 = a2 / (c * sigma) + root3 / 4 * c + b / sigma
    lhs2 = root3 / 2 * c + b / sigma
    return lhs1, lhs2


def sigma_tilde(sigma, mu, prec: PrecisionContext):
    """σ̃ = ((6^(1/4)/8)(μ+4)σ)^(1/(1+μ/4))."""
    mp = prec.mp
    mu = prec.real(mu)
    if mu <= -4:
        raise BorelError(f"mu must exceed -4, got {mp.nstr(mu, 8)}")
    sigma = prec.real(sigma)
    if sigma == 0:
        return mp.zero
    return mp.power(mp.root(6, 4) / 8 * (mu + 4) * sigma, 1 / (1 + mu / 4))


def sigma_from_tilde(st, mu, prec: PrecisionContext):
    """Inverse of sigma_tilde."""
    mp = prec.mp
    mu = prec.real(mu)
    st = prec.real(st)
    return mp.power(st, 1 + mu / 4) * 8 / (mp.root(6, 4) * (mu + 4))


def _exact_nu(nu) -> Fraction:
    if isinstance(nu, float):
        return Fraction(nu).limit_denominator(10**12)
    try:
        return Fraction(nu)
    except (TypeError, ValueError):
        raise BorelError(f"nu must be a rational or decimal, got {nu!r}")


def sigma_bound(nu, c: CMode = None, prec: Optional[PrecisionContext] = None) -> BorelBound:
    """Smallest σ closing both inequalities for the given (or optimal) c.

    Each inequality is affine in 1/σ, so its equality root is explicit:
    σ₁ = (A/c + B)/(1 - √3c/4) and σ₂ = B/(1 - √3c/2), with A = |a_{2,0}| and
    B = (|ν| + 3|a_{2,0}|/2)/√3. The bound is max(σ₁, σ₂).
    """
    prec = prec or PrecisionContext()
    mp = prec.mp
    nu_exact = _exact_nu(nu)
    nu_mp = prec.real(nu_exact)
    c_value = resolve_c(nu_exact, c, prec)
    root3 = mp.sqrt(3)
    if root3 / 2 * c_value >= 1:
        raise InfeasibleBoundError(
            f"c = {mp.nstr(c_value, 8)} makes sqrt(3)c/2 >= 1; the contraction inequality cannot hold"
        )
    a2 = abs(a20_of(nu_mp, prec))
    b = (abs(nu_mp) + mp.mpf(3) / 2 * a2) / root3
    sigma1 = (a2 / c_value + b) / (1 - root3 * c_value / 4)
    sigma2 = b / (1 - root3 * c_value / 2)
    sigma = max(sigma1, sigma2)
    note = ""
    if sigma == 0:
        note = "all nu-dependent terms vanish; sigma is the 0+ limit"
    lhs1, lhs2 = closing_lhs(nu_mp, c_value, sigma, prec)
    mu = mu_from_nu(nu_exact)
    st = sigma_tilde(sigma, mu, prec) if mu is not None else None
    logger.debug(f"sigma(nu={nu_exact}) = {mp.nstr(sigma, 10)} with c = {mp.nstr(c_value, 10)}")
    return BorelBound(nu_mp, c_value, sigma, st, lhs1, lhs2, prec.real(mu) if mu is not None else None, note)


def sigma_asymptote(nu, c, prec: PrecisionContext):
    """Leading σ(ν) as ν → -∞ at fixed c, (4/25)(√3 + 2/c)ν²/(1 - √3c/4)."""
    mp = prec.mp
    nu = prec.real(nu)
    c = prec.real(c)
    return mp.mpf(4) / 25 * (mp.sqrt(3) + 2 / c) * nu**2 / (1 - mp.sqrt(3) * c / 4)


def sigma_curve(nu_min, nu_max, points: int, c_mode: CMode = "optimal", prec: Optional[PrecisionContext] = None) -> List[BorelBound]:
    """σ(ν) on an evenly spaced ν-grid."""
    prec = prec or PrecisionContext()
    if points < 2:
        raise BorelError(f"a curve needs at least 2 points, got {points}")
    if nu_min >= nu_max:
        raise BorelError(f"empty nu range [{nu_min}, {nu_max}]")
    grid = np.linspace(float(nu_min), float(nu_max), points)
    curve = [sigma_bound(Fraction(float(nu)).limit_denominator(10**9), c_mode, prec) for nu in grid]
    logger.info(f"sigma curve over [{nu_min}, {nu_max}] with {points} points")
    return curve


def sigma_tilde_curve(curve: Sequence[BorelBound]) -> List[BorelBound]:
    """Entries of a σ(ν) curve that have a matching μ > -4."""
    return [bound for bound in curve if bound.mu is not None and bound.sigma_tilde is not None]


@dataclass(frozen=True)
class IntegralCheck:
    """Residual of the integral equation for the truncated transform.

    ``determined`` covers degrees up to N, where every coefficient involved is
    exact; ``tail`` covers the higher degrees produced by truncation.
    """

    determined: object
    tail: object
    total: object
    N: int
    t_max: object


def _residual_polynomial(params: ProblemParams, b: Sequence) -> List:
    mp = params.prec.mp
    nu = params.nu
    a2 = base_series(params, 4)[2]
    N = len(b) - 1
    r = [mp.zero] * (2 * N + 2)
    for n, bn in enumerate(b):
        r[n] += 3 * bn
        r[n + 2] += bn
        r[n + 2] -= 2 * nu * bn / (n + 2)
        r[n + 2] += 3 * a2 * bn / ((n + 1) * (n + 2))
    r[1] -= 3 * a2
    fact = [mp.factorial(k) for k in range(2 * N + 2)]
    # ∫₀ᵗ τ^m (t-τ)^k dτ = m! k! / (m+k+1)! · t^(m+k+1)
    for m in range(N + 1):
        if b[m] == 0:
            continue
        for k in range(N + 1):
            if b[k] == 0:
                continue
            r[m + k + 1] -= mp.mpf(3) / 2 * b[m] * b[k] * fact[m] * fact[k] / fact[m + k + 1]
    return r


def verify_integral_equation(params: ProblemParams, t_max, N: int, grid_points: int = 41) -> IntegralCheck:
    """Max residual of the integral equation on [0, t_max] for the degree-N transform."""
    prec = params.prec
    mp = prec.mp
    t_max = prec.real(t_max)
    if not 0 <= t_max < mp.sqrt(3):
        raise BorelError(f"t_max must lie in [0, sqrt(3)), got {mp.nstr(t_max, 8)}")
    b = borel_taylor(params, N)
    r = _residual_polynomial(params, b)
    low = list(reversed(r[: N + 1]))
    high = list(reversed(r))
    high_only = list(reversed([mp.zero] * (N + 1) + r[N + 1 :]))
    grid = [t_max * mp.mpf(float(s)) for s in np.linspace(0.0, 1.0, grid_points)]
    grid[-1] = t_max
    determined = max(abs(mp.polyval(low, t)) for t in grid)
    tail = max(abs(mp.polyval(high_only, t)) for t in grid)
    total = max(abs(mp.polyval(high, t)) for t in grid)
    logger.info(f"integral equation at N={N}, t_max={mp.nstr(t_max, 5)}: determined {mp.nstr(determined, 3)}, tail {mp.nstr(tail, 3)}")
    return IntegralCheck(determined, tail, total, N, t_max)
