"""Stokes multipliers K± of y₋ from the late base-series coefficients."""
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional

from painlab.errors import StokesInputError
from painlab.precision import PrecisionContext, gamma
from painlab.series import ProblemParams, _base_series_scaled, _level_one_scaled

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StokesResult:
    k_minus: object
    k_plus: object
    n_used: int
    terms_used: int
    estimated_error: object

    def to_dict(self, params: ProblemParams) -> Dict[str, str]:
        prec = params.prec
        mp = prec.mp
        return {
            "mu": str(params.mu),
            "n": str(self.n_used // 2),
            "terms": str(self.terms_used),
            "K_minus_re": prec.fmt(mp.re(self.k_minus)),
            "K_minus_im": prec.fmt(mp.im(self.k_minus)),
            "est_err": mp.nstr(self.estimated_error, 5),
        }


@dataclass(frozen=True)
class StokesSweep:
    results: List[StokesResult]
    diverging: bool


def _late_term(params: ProblemParams, a1m, two_n: int, m: int, log_s, prec: PrecisionContext):
    mp = prec.mp
    p = two_n - m - params.nu
    return a1m * gamma(p, prec) * mp.exp(-p * log_s)


def compute_stokes(params: ProblemParams, n: int, m_terms: int) -> StokesResult:
    """K₋ from the n-th instance of the late-coefficient relation.

    a_{2n,0} ≈ -(K₋/πi) Σ_m a_{m,1} Γ(2n-m-ν) / (i√3)^(2n-m-ν), solved for K₋
    with m_terms level-one coefficients; K₊ is its conjugate.
    """
    if params.a00 != -1 or params.root_sign != 1:
        raise StokesInputError("Stokes multipliers are defined for the y- branch (a00 = -1, sqrt = i*sqrt(3))")
    if n < 2:
        raise StokesInputError(f"n must be at least 2, got {n}")
    if not 1 <= m_terms <= n:
        raise StokesInputError(f"terms must satisfy 1 <= terms <= n, got terms={m_terms}, n={n}")

    two_n = 2 * n
    work = params.prec.scaled_for(two_n)
    mp = work.mp
    base = _base_series_scaled(params, two_n)
    level_one = _level_one_scaled(params, m_terms)
    # principal Log(i√3), fixes the branch of the power
    log_s = mp.log(mp.convert(params.sqrt3a00))

    terms = [_late_term(params, level_one[m], two_n, m, log_s, work) for m in range(m_terms + 1)]
    partial = mp.fsum(terms[:m_terms])
    k_minus = -mp.pi * mp.j * base[two_n] / partial
    est_err = abs(terms[m_terms]) / abs(partial)

    prec_mp = params.prec.mp
    k_minus = +prec_mp.convert(k_minus)
    logger.info(f"K- for mu={params.mu} from 2n={two_n}, {m_terms} terms, est_err={mp.nstr(est_err, 3)}")
    return StokesResult(
        k_minus=k_minus,
        k_plus=prec_mp.conj(k_minus),
        n_used=two_n,
        terms_used=m_terms,
        estimated_error=+prec_mp.convert(est_err),
    )


def stokes_sweep(params: ProblemParams, ns: Iterable[int], m_terms: Optional[int] = None) -> StokesSweep:
    """compute_stokes over several n; flags non-decreasing error estimates."""
    results = [compute_stokes(params, n, m_terms or n) for n in ns]
    diverging = any(
        later.estimated_error >= earlier.estimated_error for earlier, later in zip(results, results[1:])
    )
    if diverging:
        logger.warning(f"⚠️ Stokes estimates for mu={params.mu} are not improving with n; results may be unreliable")
    return StokesSweep(results, diverging)


def late_coefficient_check(params: ProblemParams, stokes: StokesResult):
    """a_{2n,0} rebuilt from both multipliers.

    Sums the K₋ and K₊ contributions of the two-sided late-term relation
    and returns (rebuilt, actual).
    """
    two_n = stokes.n_used
    work = params.prec.scaled_for(two_n)
    mp = work.mp
    base = _base_series_scaled(params, two_n)
    level_one = _level_one_scaled(params, stokes.terms_used)
    s = mp.convert(params.sqrt3a00)

    def side(root, sign):
        log_root = mp.log(root)
        return mp.fsum(
            sign**m * level_one[m] * gamma(two_n - m - params.nu, work) * mp.exp(-(two_n - m - params.nu) * log_root)
            for m in range(stokes.terms_used)
        )

    rebuilt = (stokes.k_plus * side(-s, -1) - stokes.k_minus * side(s, 1)) / (2 * mp.pi * mp.j)
    return +params.prec.mp.convert(rebuilt), +params.prec.mp.convert(base[two_n])


def exact_stokes_mu1(prec: PrecisionContext):
    """K₋ = -3^(1/4) / √(5π) · (1 + i) for the classical equation."""
    mp = prec.mp
    return -mp.root(3, 4) / mp.sqrt(5 * mp.pi) * mp.mpc(1, 1)
