"""Padé approximants of Taylor data and their zeros/poles.

Poles of a high-order approximant that do not pair up with a zero are the
singularity candidates; pairs closer than 10^(-target/2) are Froissart
doublets and get flagged.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from painlab.errors import RootNonConvergenceError, SingularPadeError
from painlab.precision import PrecisionContext

logger = logging.getLogger(__name__)

MAX_ABERTH_ITERATIONS = 500


@dataclass(frozen=True)
class RationalApproximant:
    center: object
    numerator: Tuple
    denominator: Tuple
    prec: PrecisionContext = field(repr=False)

    @property
    def order(self) -> Tuple[int, int]:
        return len(self.numerator) - 1, len(self.denominator) - 1

    def __call__(self, x):
        mp = self.prec.mp
        t = mp.convert(x) - self.center
        return mp.polyval(list(reversed(self.numerator)), t) / mp.polyval(list(reversed(self.denominator)), t)

    def series(self, n_terms: int) -> List:
        """Taylor coefficients of p/q about the center by long division."""
        mp = self.prec.mp
        q = self.denominator
        out = []
        for k in range(n_terms):
            p_k = self.numerator[k] if k < len(self.numerator) else mp.zero
            acc = p_k - mp.fsum(q[j] * out[k - j] for j in range(1, min(k, len(q) - 1) + 1))
            out.append(acc / q[0])
        return out


def build_pade(taylor: Sequence, L: int, M: int, prec: PrecisionContext, center=0) -> RationalApproximant:
    """[L/M] approximant from Taylor coefficients c_0..c_{L+M}.

    q_0 = 1 and Σ_j q_j c_{k-j} = 0 for k = L+1..L+M fix the denominator; the
    numerator follows from the first L+1 coefficients of q·c.
    """
    mp = prec.mp
    if L < 0 or M < 0:
        raise SingularPadeError(f"orders must be non-negative, got [{L}/{M}]")
    if len(taylor) < L + M + 1:
        raise SingularPadeError(f"[{L}/{M}] needs {L + M + 1} coefficients, got {len(taylor)}")
    c = [mp.convert(v) for v in taylor[: L + M + 1]]

    def coeff(i):
        return c[i] if i >= 0 else mp.zero

    if M == 0:
        q = [mp.one]
    else:
        A = mp.matrix(M, M)
        rhs = mp.matrix(M, 1)
        for row in range(M):
            k = L + 1 + row
            for col in range(M):
                A[row, col] = coeff(k - col - 1)
            rhs[row] = -c[k]
        try:
            sol = mp.lu_solve(A, rhs)
        except ZeroDivisionError as e:
            raise SingularPadeError(f"[{L}/{M}] block is singular: {e}")
        q = [mp.one] + [sol[i] for i in range(M)]
        if any(mp.isnan(abs(v)) or mp.isinf(abs(v)) for v in q):
            raise SingularPadeError(f"[{L}/{M}] block is singular (non-finite denominator)")
    p = [mp.fsum(q[j] * coeff(k - j) for j in range(min(k, M) + 1)) for k in range(L + 1)]
    return RationalApproximant(mp.convert(center), tuple(p), tuple(q), prec)


def build_pade_robust(taylor: Sequence, L: int, M: int, prec: PrecisionContext, center=0) -> RationalApproximant:
    """build_pade, stepping down the diagonal while the block is singular."""
    while True:
        try:
            return build_pade(taylor, L, M, prec, center)
        except SingularPadeError as e:
            if L == 0 or M == 0:
                raise
            logger.warning(f"⚠️ {e}; retrying with [{L - 1}/{M - 1}]")
            L, M = L - 1, M - 1


def _trim(coeffs: List, prec: PrecisionContext) -> List:
    """Drop vanishing leading (highest-degree) coefficients, relative to the largest."""
    mp = prec.mp
    scale = max(abs(v) for v in coeffs)
    if scale == 0:
        return [mp.zero]
    tiny = scale * mp.mpf(10) ** (-prec.working_digits)
    out = list(coeffs)
    while len(out) > 1 and abs(out[-1]) <= tiny:
        out.pop()
    return out


def _seed_roots(coeffs: List, prec: PrecisionContext) -> List:
    """Companion-matrix roots in double precision, or a circle when they are unusable."""
    mp = prec.mp
    degree = len(coeffs) - 1
    try:
        highest_first = np.array([complex(v) for v in reversed(coeffs)], dtype=complex)
        if np.all(np.isfinite(highest_first)) and highest_first[0] != 0:
            seeds = np.roots(highest_first)
            if len(seeds) == degree and np.all(np.isfinite(seeds)):
                return [mp.mpc(complex(s)) for s in seeds]
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    logger.debug(f"companion seeding unusable for degree {degree}, using a circle")
    radius = (abs(coeffs[0]) / abs(coeffs[-1])) ** (mp.mpf(1) / degree) if coeffs[0] != 0 else mp.one
    return [radius * mp.expjpi(2 * mp.mpf(k) / degree + mp.mpf(2) / 5) for k in range(degree)]


def aberth_roots(coeffs: Sequence, prec: PrecisionContext, max_iter: int = MAX_ABERTH_ITERATIONS):
    """All roots of Σ coeffs[k] t^k by Aberth–Ehrlich iteration.

    Returns (roots, converged flags).
    """
    mp = prec.mp
    coeffs = _trim([mp.convert(v) for v in coeffs], prec)
    degree = len(coeffs) - 1
    if degree < 1:
        raise RootNonConvergenceError("polynomial has degree < 1, no roots to find")
    highest_first = list(reversed(coeffs))
    roots = _seed_roots(coeffs, prec)
    tol = mp.mpf(10) ** (-(prec.working_digits - 5))
    done = [False] * degree
    for _ in range(max_iter):
        for k in range(degree):
            if done[k]:
                continue
            z = roots[k]
            value, deriv = mp.polyval(highest_first, z, derivative=True)
            if value == 0:
                done[k] = True
                continue
            ratio = value / deriv if deriv != 0 else value
            repulsion = mp.fsum(1 / (z - roots[j]) for j in range(degree) if j != k and roots[j] != z)
            delta = ratio / (1 - ratio * repulsion)
            roots[k] = z - delta
            if abs(delta) <= tol * max(mp.one, abs(roots[k])):
                done[k] = True
        if all(done):
            break
    if not all(done):
        logger.warning(f"⚠️ Aberth iteration left {done.count(False)} of {degree} roots unconverged")
    return roots, done


@dataclass(frozen=True)
class RootReport:
    value: object
    kind: str
    residual: object
    converged: bool = True
    doublet: bool = False
    spacing: Optional[object] = None

    def csv_row(self, prec: PrecisionContext) -> List[str]:
        mp = prec.mp
        return [
            prec.fmt(mp.re(self.value)),
            prec.fmt(mp.im(self.value)),
            self.kind,
            mp.nstr(self.residual, 5),
            str(int(self.doublet)),
        ]


PADE_CSV_HEADER = ["root_re", "root_im", "type", "residual", "doublet_flag"]


def _certificate(coeffs_highest_first, root, mp):
    value, deriv = mp.polyval(coeffs_highest_first, root, derivative=True)
    denom = abs(deriv * root) if root != 0 else abs(deriv)
    if denom == 0:
        return mp.inf
    return abs(value) / denom


def rational_roots(approx: RationalApproximant, which: str) -> List[RootReport]:
    """Zeros ('zeros') or poles ('poles') of the approximant in x, with residual certificates."""
    prec = approx.prec
    mp = prec.mp
    if which not in ("zeros", "poles"):
        raise ValueError(f"which must be 'zeros' or 'poles', got {which!r}")
    poly = approx.numerator if which == "zeros" else approx.denominator
    trimmed = _trim(list(poly), prec)
    if len(trimmed) < 2:
        return []
    roots, done = aberth_roots(trimmed, prec)
    highest_first = list(reversed(trimmed))
    kind = "zero" if which == "zeros" else "pole"
    return [
        RootReport(approx.center + r, kind, _certificate(highest_first, r, mp), ok)
        for r, ok in zip(roots, done)
    ]


def _nearest(values: List, index: int, mp):
    others = [abs(values[index] - v) for j, v in enumerate(values) if j != index]
    return min(others) if others else mp.inf


def scan(approx: RationalApproximant) -> List[RootReport]:
    """Zeros and poles with Froissart flags and nearest-neighbour spacing."""
    prec = approx.prec
    mp = prec.mp
    zeros = rational_roots(approx, "zeros")
    poles = rational_roots(approx, "poles")
    threshold = mp.mpf(10) ** (-(prec.target_digits / 2))
    zero_values = [r.value for r in zeros]
    pole_values = [r.value for r in poles]

    def annotate(reports, own, partner):
        out = []
        for i, r in enumerate(reports):
            doublet = bool(partner) and min(abs(r.value - p) for p in partner) < threshold
            out.append(RootReport(r.value, r.kind, r.residual, r.converged, doublet, _nearest(own, i, mp)))
        return out

    reports = annotate(zeros, zero_values, pole_values) + annotate(poles, pole_values, zero_values)
    doublets = sum(1 for r in reports if r.doublet and r.kind == "pole")
    logger.info(f"Padé [{approx.order[0]}/{approx.order[1]}]: {len(zeros)} zeros, {len(poles)} poles, {doublets} doublets")
    return reports


def candidate_poles(reports: List[RootReport]) -> List[RootReport]:
    return [r for r in reports if r.kind == "pole" and not r.doublet]


def nearest_candidate(reports: List[RootReport], guess) -> RootReport:
    """Non-doublet pole closest to ``guess``."""
    candidates = candidate_poles(reports)
    if not candidates:
        raise SingularPadeError("approximant has no non-doublet poles")
    return min(candidates, key=lambda r: abs(r.value - guess))
