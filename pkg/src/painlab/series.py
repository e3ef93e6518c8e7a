"""Formal series and transseries coefficients of the rescaled equation.

With z = λ x^(μ/4+1) and y = √(x^μ/6)·u(z) the equation becomes an ODE for u
whose formal solutions are the transseries

    u(z) ~ Σ_k C^k e^(-k√(3a00) z) Σ_n a_{n,k} z^(-n-kν).

This module builds the a_{n,k} by recurrence and evaluates the closed forms
G0, G1 that resum the n = 0 and n = 1 columns.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import List, Sequence, Tuple, Union

from painlab.errors import ResummationPoleError, SeriesError, SeriesRangeError
from painlab.precision import PrecisionContext

logger = logging.getLogger(__name__)

MuLike = Union[Fraction, int, str]


@dataclass(frozen=True)
class ProblemParams:
    """One instance of y'' = 6y² - x^μ plus the branch of the formal solution.

    ``root_sign`` picks the square root of 3·a00: +1 gives i√3 for a00 = -1
    (the convention used for y₋), -1 the opposite half-plane transseries.
    """

    mu: Fraction
    a00: int = -1
    prec: PrecisionContext = field(default_factory=PrecisionContext)
    root_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.mu <= -4:
            raise SeriesError(f"mu must exceed -4, got {self.mu}")
        if self.a00 not in (1, -1):
            raise SeriesError(f"a00 must be +1 or -1, got {self.a00}")
        if self.root_sign not in (1, -1):
            raise SeriesError(f"root_sign must be +1 or -1, got {self.root_sign}")

    @classmethod
    def create(cls, mu: MuLike, digits: int = 30, a00: int = -1, guard_digits: int = 20) -> "ProblemParams":
        return cls(Fraction(mu), a00, PrecisionContext(digits, guard_digits))

    # exact rationals
    @property
    def nu_exact(self) -> Fraction:
        return Fraction(5) * self.mu / (2 * (self.mu + 4))

    @property
    def q_exact(self) -> Fraction:
        """Exponent of x in z, μ/4 + 1."""
        return self.mu / 4 + 1

    @property
    def mu_is_nonneg_integer(self) -> bool:
        return self.mu.denominator == 1 and self.mu >= 0

    # working-precision values
    @cached_property
    def mu_mp(self):
        return self.prec.real(self.mu)

    @cached_property
    def nu(self):
        return self.prec.real(self.nu_exact)

    @cached_property
    def q(self):
        return self.prec.real(self.q_exact)

    @cached_property
    def lam(self):
        mp = self.prec.mp
        return 8 * mp.power(6, mp.mpf(-1) / 4) / self.prec.real(self.mu + 4)

    @cached_property
    def sqrt3a00(self):
        mp = self.prec.mp
        root = mp.sqrt(3)
        if self.a00 == -1:
            return mp.mpc(0, self.root_sign * root)
        return mp.mpc(self.root_sign * root, 0)

    def z_from_log(self, log_x):
        """z = λ exp((μ/4+1)·log x) for an explicitly continued log x."""
        return self.lam * self.prec.mp.exp(self.q * log_x)

    def z_of(self, x):
        mp = self.prec.mp
        return self.z_from_log(mp.log(mp.convert(x)))

    def prefactor_from_log(self, log_x):
        """√(x^μ/6) on the branch given by log x."""
        mp = self.prec.mp
        return mp.exp(self.mu_mp * log_x / 2) / mp.sqrt(6)

    def at_precision(self, prec: PrecisionContext) -> "ProblemParams":
        return ProblemParams(self.mu, self.a00, prec, self.root_sign)

    def reflected(self) -> "ProblemParams":
        return ProblemParams(self.mu, self.a00, self.prec, -self.root_sign)


def _round(prec: PrecisionContext, values) -> Tuple:
    mp = prec.mp
    return tuple(+mp.convert(v) for v in values)


@lru_cache(maxsize=64)
def _base_series_scaled(params: ProblemParams, n_max: int) -> Tuple:
    work = params.prec.scaled_for(n_max)
    mp = work.mp
    nu = work.real(params.nu_exact)
    a00 = mp.mpf(params.a00)
    a = [mp.zero] * (n_max + 1)
    a[0] = a00
    a[2] = mp.mpf(4) / 15 * nu * (6 * nu / 5 - 1)
    # a4 is not produced by the recurrence, its n = 4 instance is degenerate
    a[4] = 2 * (2 * nu / 15 - 1) * (3 * nu / 5 - 1) * a00 * a[2]
    for n in range(5, n_max + 1):
        if n % 2:
            continue
        conv = mp.fsum(a[m] * a[n - m] for m in range(3, n - 2))
        a[n] = ((n - 2) * (n - 1 - 2 * nu) * a[n - 2] - mp.mpf(3) / 2 * conv) / (3 * a00)
    return tuple(a)


def base_series(params: ProblemParams, n_max: int) -> Tuple:
    """a_{n,0} for n = 0..n_max; odd entries are exact zeros."""
    if n_max < 4:
        raise SeriesRangeError(f"base_series needs n_max >= 4, got {n_max}")
    return _round(params.prec, _base_series_scaled(params, n_max))


@lru_cache(maxsize=64)
def _level_one_scaled(params: ProblemParams, n_max: int) -> Tuple:
    base = _base_series_scaled(params, max(n_max + 1, 4))
    work = params.prec.scaled_for(max(n_max + 1, 4))
    mp = work.mp
    nu = work.real(params.nu_exact)
    s = mp.convert(params.sqrt3a00)
    a1 = [mp.mpc(1)]
    for n in range(1, n_max + 1):
        conv = mp.fsum(base[m] * a1[n + 1 - m] for m in range(4, n + 2))
        a1.append(((n - 1 + nu) * (nu - n) * a1[n - 1] + 3 * conv) / (2 * s * n))
    return tuple(a1)


def level_one_series(params: ProblemParams, n_max: int) -> Tuple:
    """a_{n,1} for n = 0..n_max with a_{0,1} = 1."""
    if n_max < 0:
        raise SeriesRangeError(f"level_one_series needs n_max >= 0, got {n_max}")
    return _round(params.prec, _level_one_scaled(params, n_max))


@dataclass(frozen=True)
class CoeffTable:
    """a_{n,k} for 0 <= n <= n_max, 0 <= k <= k_max, stored row by row (k-major)."""

    params: ProblemParams
    n_max: int
    k_max: int
    rows: Tuple[Tuple, ...]

    def a(self, n: int, k: int):
        return self.rows[k][n]

    def row(self, k: int) -> Tuple:
        return self.rows[k]

    def column(self, n: int) -> Tuple:
        return tuple(row[n] for row in self.rows)

    def export_rows(self) -> List[List[str]]:
        """(n, k, Re a, Im a) rows at target digits, n varying fastest."""
        prec = self.params.prec
        mp = prec.mp
        out = []
        for k, row in enumerate(self.rows):
            for n, value in enumerate(row):
                out.append([str(n), str(k), prec.fmt(mp.re(value)), prec.fmt(mp.im(value))])
        return out


@lru_cache(maxsize=16)
def transseries_table(params: ProblemParams, n_max: int, k_max: int) -> CoeffTable:
    """Full transseries table from the level-k recurrences."""
    if n_max < 1 or k_max < 1:
        raise SeriesRangeError(f"transseries_table needs n_max, k_max >= 1, got ({n_max}, {k_max})")
    depth = max(n_max + 1, 4)
    work = params.prec.scaled_for(depth + k_max)
    mp = work.mp
    nu = work.real(params.nu_exact)
    s = mp.convert(params.sqrt3a00)
    a00 = mp.mpf(params.a00)

    rows = [list(_base_series_scaled(params, depth)), list(_level_one_scaled(params, n_max))]

    def entry(k, n):
        return rows[k][n] if n >= 0 else mp.zero

    base = rows[0]
    for k in range(2, k_max + 1):
        rows.append([])
        for n in range(n_max + 1):
            coupling = mp.fsum(
                rows[ell][m] * rows[k - ell][n - m] for ell in range(1, k) for m in range(n + 1)
            )
            rhs = (
                mp.mpf(3) / 2 * coupling
                - 2 * k * s * (n - 1 + (k - 1) * nu) * entry(k, n - 1)
                - (n - 2 + k * nu) * (n - 1 + (k - 2) * nu) * entry(k, n - 2)
                + 3 * mp.fsum(base[m] * rows[k][n - m] for m in range(4, n + 1))
            )
            rows[k].append(rhs / (3 * (k * k - 1) * a00))
        logger.debug(f"transseries row k={k} built to n={n_max}")

    rows[0] = rows[0][: n_max + 1]
    logger.info(f"Transseries table mu={params.mu} built: n<={n_max}, k<={k_max}")
    return CoeffTable(params, n_max, k_max, tuple(_round(params.prec, row) for row in rows))


def reflected_row(table: CoeffTable, k: int) -> Tuple:
    """(-1)^n a_{n,k}: row k of the transseries on the opposite side."""
    return tuple(v if n % 2 == 0 else -v for n, v in enumerate(table.row(k)))


def closed_form_a0k(params: ProblemParams, k: int):
    """a_{0,k} = k / (12 a00)^(k-1)."""
    mp = params.prec.mp
    return mp.mpf(k) / mp.power(12 * params.a00, k - 1)


def pole_shift_alpha(params: ProblemParams):
    """α in X ≈ 12·a00 + α/z, the first correction to the double-pole condition."""
    nu = params.nu
    return -params.sqrt3a00 * nu * (2 * nu - params.prec.real(Fraction(124, 15)))


def _check_resummation_pole(X, params: ProblemParams):
    mp = params.prec.mp
    gap = mp.convert(X) - 12 * params.a00
    if abs(gap) <= params.prec.tolerance:
        raise ResummationPoleError(f"G0/G1 have a pole at X = 12*a00 = {12 * params.a00}")
    return gap


def g0(X, params: ProblemParams):
    """G0(X) = a00 + 144X / (X - 12 a00)²."""
    mp = params.prec.mp
    X = mp.convert(X)
    gap = _check_resummation_pole(X, params)
    return params.a00 + 144 * X / gap**2


def g1(X, params: ProblemParams):
    mp = params.prec.mp
    X = mp.convert(X)
    gap = _check_resummation_pole(X, params)
    nu = params.nu
    a00 = params.a00
    poly = 288 * (1 - nu) - 8 * (3 * nu - 19) * a00 * X + 2 * X**2 - mp.mpf(a00) / 90 * X**3
    return nu * params.sqrt3a00 * X * poly / gap**3


def taylor_at_zero(func, X_order: int, params: ProblemParams) -> List:
    """First Taylor coefficients of a resummation function at X = 0."""
    mp = params.prec.mp
    return list(mp.taylor(lambda X: func(X, params), 0, X_order))


def series_residual(params: ProblemParams, coeffs: Sequence) -> List:
    """Coefficients of z^(2-n) in z²·(u'' + 2νu'/z + 3a20·u/z² - (3/2)(u² - 1)).

    ``coeffs`` is a truncated base series; entry n of the result vanishes for
    every n the truncation fully determines.
    """
    mp = params.prec.mp
    nu = params.nu
    a = list(coeffs)
    c = 3 * a[2]
    out = []
    for n in range(len(a)):
        prev = a[n - 2] if n >= 2 else mp.zero
        square = mp.fsum(a[m] * a[n - m] for m in range(n + 1))
        value = prev * ((n - 2) * (n - 1 - 2 * nu) + c) - mp.mpf(3) / 2 * square
        if n == 0:
            value += mp.mpf(3) / 2
        out.append(value)
    return out
