"""Arbitrary-precision kernel.

A PrecisionContext owns a private mpmath context, so two contexts with
different precisions never interfere and nothing touches ``mpmath.mp.dps``.
Every other module asks its context for ``prec.mp`` and computes with that.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

import mpmath

from painlab.errors import GammaPoleError, IncompleteGammaOriginError, PrecisionError

logger = logging.getLogger(__name__)

DEFAULT_GUARD_DIGITS = 20
MIN_GUARD_DIGITS = 10


@dataclass(frozen=True)
class PrecisionContext:
    target_digits: int = 30
    guard_digits: int = DEFAULT_GUARD_DIGITS

    def __post_init__(self):
        if self.target_digits < 1:
            raise PrecisionError(f"target_digits must be positive, got {self.target_digits}")
        if self.guard_digits < MIN_GUARD_DIGITS:
            raise PrecisionError(
                f"guard_digits must be at least {MIN_GUARD_DIGITS}, got {self.guard_digits}"
            )

    @property
    def working_digits(self) -> int:
        return self.target_digits + self.guard_digits

    @cached_property
    def mp(self) -> mpmath.MPContext:
        ctx = mpmath.MPContext()
        ctx.dps = self.working_digits
        return ctx

    @cached_property
    def tolerance(self):
        """10^-target_digits as a working-precision real."""
        return self.mp.mpf(10) ** (-self.target_digits)

    @cached_property
    def overflow_guard(self):
        return self.mp.mpf(10) ** (2 * self.working_digits)

    def scaled_for(self, n_terms: int) -> "PrecisionContext":
        """Context with extra guard digits for an n-term recurrence.

        Adds ceil(log10 n!) digits, the loss a linear recurrence of that depth
        can inflict on the leading digits.
        """
        if n_terms <= 1:
            return self
        extra = math.ceil(math.lgamma(n_terms + 1) / math.log(10))
        return PrecisionContext(self.target_digits, self.guard_digits + extra)

    def with_target(self, target_digits: int) -> "PrecisionContext":
        return PrecisionContext(target_digits, self.guard_digits)

    def cplx(self, value: Any):
        """Convert anything numeric (or a numeric string) to an mpc at working precision."""
        mp = self.mp
        if isinstance(value, str):
            return mp.mpc(mp.mpmathify(value.replace(" ", "")))
        if isinstance(value, Fraction):
            return mp.mpc(self.real(value))
        return mp.mpc(mp.convert(value))

    def real(self, value: Any):
        if isinstance(value, Fraction):
            return self.mp.mpf(value.numerator) / value.denominator
        return self.mp.mpf(self.mp.convert(value))

    def fmt(self, value: Any, digits: int = None) -> str:
        """Format a value at target digits (or an explicit digit count)."""
        return self.mp.nstr(value, digits or self.target_digits, strip_zeros=False)


def _is_gamma_pole(mp, z) -> bool:
    z = mp.convert(z)
    if mp.im(z) != 0:
        return False
    re = mp.re(z)
    return re <= 0 and mp.isint(re)


def gamma(z, prec: PrecisionContext):
    """Γ(z) at working precision."""
    mp = prec.mp
    if _is_gamma_pole(mp, z):
        raise GammaPoleError(f"Gamma has a pole at z = {z}")
    return mp.gamma(mp.convert(z))


def upper_incomplete_gamma(a, z, prec: PrecisionContext):
    """Γ(a, z) = ∫_z^∞ t^(a-1) e^(-t) dt on the principal branch.

    mpmath switches between its series and asymptotic/continued representations
    and raises internal precision when the two-term form cancels, which covers
    the large negative orders the hyperterminants need.
    """
    mp = prec.mp
    a = mp.convert(a)
    z = mp.convert(z)
    if z == 0:
        if mp.re(a) <= 0:
            raise IncompleteGammaOriginError(f"Gamma({a}, 0) diverges for Re(a) <= 0")
        return mp.gamma(a)
    return mp.gammainc(a, z)


def hyperterminant_f1(z, order, sigma, prec: PrecisionContext):
    """First hyperterminant F1(z; N+1, σ) = -e^(σz) (-z)^N Γ(N+1) Γ(-N, σz).

    ``order`` is N+1 and may be complex; (-z)^N uses the principal branch.
    """
    mp = prec.mp
    z = mp.convert(z)
    sigma = mp.convert(sigma)
    n = mp.convert(order) - 1
    if z == 0:
        raise IncompleteGammaOriginError("hyperterminant needs z != 0")
    w = sigma * z
    return -mp.exp(w) * mp.power(-z, n) * gamma(n + 1, prec) * upper_incomplete_gamma(-n, w, prec)


def hyperterminant_f1_dz(z, order, sigma, prec: PrecisionContext, value=None):
    """z-derivative of F1, (σ + N/z) F1 + Γ(N+1) σ (-z)^N (σz)^(-N-1)."""
    mp = prec.mp
    z = mp.convert(z)
    sigma = mp.convert(sigma)
    n = mp.convert(order) - 1
    if value is None:
        value = hyperterminant_f1(z, order, sigma, prec)
    tail = gamma(n + 1, prec) * sigma * mp.power(-z, n) * mp.power(sigma * z, -n - 1)
    return (sigma + n / z) * value + tail


def pochhammer(a, m: int, prec: PrecisionContext):
    """Rising factorial (a)_m; (a)_0 = 1."""
    if m < 0:
        raise PrecisionError(f"pochhammer needs m >= 0, got {m}")
    mp = prec.mp
    return mp.rf(mp.convert(a), m)
