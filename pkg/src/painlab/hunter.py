"""Singularity hunter: pin down poles, branch points and zeros of a walked solution.

Near a singularity x_j the solution behaves like

    y = (x-x_j)^-2 + (x_j^μ/10)(x-x_j)^2 + (μ/6) x_j^(μ-1) (x-x_j)^3 + h_j (x-x_j)^4 + ...

with a log term at order four when μ ∉ {0, 1}. Contour integrals of -x y'/(2y)
return x_j, those of y'³/(56 y) return h_j (μ = 1), and those of x y'/y
return a simple zero.
"""
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional

from painlab.continuation import SolutionState, TaylorWalker
from painlab.errors import (
    FunctionalError,
    NewtonDivergenceError,
    NoRootsInWindowError,
    NonAnalyticError,
)
from painlab.precision import PrecisionContext
from painlab.series import ProblemParams
from painlab.stokes import StokesResult

logger = logging.getLogger(__name__)


class Functional(str, Enum):
    POLE = "pole-location"
    H_RESIDUE = "h-residue"
    ZERO = "zero-location"


class SingularityKind(str, Enum):
    DOUBLE_POLE = "double-pole"
    LOG_POLE = "log-corrected-pole"
    ZERO = "zero"


class Method(str, Enum):
    CONTOUR = "contour"
    LOCAL_EXPANSION = "local-expansion"
    PREDICTION = "prediction"


@dataclass(frozen=True)
class SingularityEstimate:
    location: object
    kind: SingularityKind
    method: Method
    radius: Optional[object] = None
    nodes: Optional[int] = None
    h: Optional[object] = None
    residual_diag: Optional[object] = None
    closure_gap: Optional[object] = None
    center: Optional[object] = None
    contour_value: Optional[object] = None

    def to_dict(self, prec: PrecisionContext) -> dict:
        mp = prec.mp
        out = {
            "location_re": prec.fmt(mp.re(self.location)),
            "location_im": prec.fmt(mp.im(self.location)),
            "kind": self.kind.value,
            "method": self.method.value,
        }
        if self.radius is not None:
            out["radius"] = mp.nstr(self.radius, 10)
        if self.nodes is not None:
            out["nodes"] = self.nodes
        if self.h is not None:
            out["h_re"] = prec.fmt(mp.re(self.h))
            out["h_im"] = prec.fmt(mp.im(self.h))
        if self.residual_diag is not None:
            out["residual_diag"] = mp.nstr(self.residual_diag, 5)
        if self.closure_gap is not None:
            out["closure_gap"] = mp.nstr(self.closure_gap, 5)
        return out


@dataclass(frozen=True)
class Window:
    center: object
    radius: object


def pole_kind(params: ProblemParams) -> SingularityKind:
    return SingularityKind.DOUBLE_POLE if params.mu in (0, 1) else SingularityKind.LOG_POLE


def _functional_values(functional: Functional, state: SolutionState):
    x, y, dy = state.x, state.y, state.dy
    if functional is Functional.ZERO:
        return (x * dy / y,)
    pole = -x * dy / (2 * y)
    if functional is Functional.H_RESIDUE:
        return pole, dy**3 / (56 * y)
    return (pole,)


def contour_locate(
    center,
    r,
    M: int,
    seed: SolutionState,
    params: ProblemParams,
    functional: Functional = Functional.POLE,
    taylor_terms: int = 40,
    approach_steps: Optional[int] = None,
    log_x=None,
) -> SingularityEstimate:
    """Trapezoid rule for (1/2πi)∮F dx on |x - center| = r with 2M nodes.

    Node states come from one walk around the circle, starting at center + r;
    the seed is first walked there in a straight line.
    """
    functional = Functional(functional)
    if functional is Functional.H_RESIDUE and params.mu != 1:
        raise FunctionalError(f"the h-residue functional needs mu = 1, got mu = {params.mu}")
    prec = params.prec
    mp = prec.mp
    center = mp.convert(center)
    r = mp.convert(r)
    if M < 2:
        raise NonAnalyticError(f"need M >= 2 contour nodes per half turn, got {M}")

    walker = TaylorWalker(seed, params, taylor_terms, log_x)
    start = center + r
    if walker.state.x != start:
        if approach_steps is None:
            arc_step = mp.pi * r / M
            approach_steps = max(1, math.ceil(float(abs(start - walker.state.x) / arc_step)))
        walker.walk_to(start, approach_steps)

    first = walker.state
    offsets = [r * mp.expjpi(mp.mpf(m) / M) for m in range(2 * M)]
    sums = None
    half_sums = None
    for m, w in enumerate(offsets):
        values = _functional_values(functional, walker.state)
        if sums is None:
            sums = [mp.zero] * len(values)
            half_sums = [mp.zero] * len(values)
        for i, v in enumerate(values):
            sums[i] += w * v
            if m % 2 == 0:
                half_sums[i] += w * v
        target = center + offsets[(m + 1) % (2 * M)]
        walker.walk_to(target, 1)

    estimates = [s / (2 * M) for s in sums]
    halves = [s / M for s in half_sums]
    delta = max(abs(e - h) for e, h in zip(estimates, halves))
    gap = abs(walker.state.y - first.y) / max(mp.one, abs(first.y))

    if functional is Functional.ZERO:
        kind = SingularityKind.ZERO
    else:
        kind = pole_kind(params)
    location = estimates[0]
    single_valued = kind is not SingularityKind.LOG_POLE
    if single_valued:
        if delta > mp.mpf("1e-3") * max(mp.one, abs(location)):
            raise NonAnalyticError(
                f"trapezoid sum not stabilising (|M vs M/2| = {mp.nstr(delta, 5)}) around {mp.nstr(center, 8)}"
            )
        if gap > mp.mpf(10) ** (-(prec.target_digits / 2)):
            raise NonAnalyticError(
                f"solution does not return to itself around {mp.nstr(center, 8)} (gap {mp.nstr(gap, 5)}); "
                "a branch cut crosses the contour"
            )

    logger.info(
        f"Contour {functional.value} around {mp.nstr(center, 8)}, r={mp.nstr(r, 4)}, M={M}: "
        f"{mp.nstr(location, 12)} (M/2 gap {mp.nstr(delta, 3)})"
    )
    return SingularityEstimate(
        location=location,
        kind=kind,
        method=Method.CONTOUR,
        radius=r,
        nodes=M,
        h=estimates[1] if functional is Functional.H_RESIDUE else None,
        residual_diag=delta,
        closure_gap=gap,
        center=center,
        contour_value=location,
    )


def log_corrected_locate(estimate: SingularityEstimate, params: ProblemParams) -> SingularityEstimate:
    """Remove the leading log-term bias from a contour estimate.

    Solves x_j + (μ(μ-1)/28) x_j^(μ-1) (r + x̃ - x_j)^6 = I for x_j, where I is
    the contour value and x̃ the contour centre.
    """
    if params.mu in (0, 1):
        return estimate
    mp = params.prec.mp
    value = estimate.contour_value if estimate.contour_value is not None else estimate.location
    center = estimate.center if estimate.center is not None else value
    r = estimate.radius
    coeff = params.mu_mp * (params.mu_mp - 1) / 28

    def f(xj):
        return xj + coeff * mp.power(xj, params.mu_mp - 1) * (r + center - xj) ** 6 - value

    try:
        root = mp.findroot(f, mp.convert(value))
    except (ValueError, ZeroDivisionError) as e:
        raise NewtonDivergenceError(f"log-corrected solve did not converge: {e}")
    logger.debug(f"log correction moved {mp.nstr(value, 12)} by {mp.nstr(abs(root - value), 3)}")
    return replace(estimate, location=root)


def laurent_model(x, x_j, params: ProblemParams, h=0):
    """(y, y') of the truncated local expansion about x_j, log term omitted."""
    mp = params.prec.mp
    u = mp.convert(x) - mp.convert(x_j)
    mu = params.mu_mp
    c2 = mp.power(x_j, mu) / 10
    c3 = mu / 6 * mp.power(x_j, mu - 1)
    y = u**-2 + c2 * u**2 + c3 * u**3 + h * u**4
    dy = -2 * u**-3 + 2 * c2 * u + 3 * c3 * u**2 + 4 * h * u**3
    return y, dy


def local_expansion_refine(x_near, y_near, x_guess, params: ProblemParams):
    """x_j from one walked value near the singularity, by Newton in x_j."""
    mp = params.prec.mp
    mu = params.mu_mp
    x_near = mp.convert(x_near)
    y_near = mp.convert(y_near)

    def f(xj):
        u = x_near - xj
        return u**-2 + mp.power(xj, mu) / 10 * u**2 + mu / 6 * mp.power(xj, mu - 1) * u**3 - y_near

    def df(xj):
        u = x_near - xj
        term2 = (mu * mp.power(xj, mu - 1) * u**2 - 2 * mp.power(xj, mu) * u) / 10
        term3 = mu / 6 * ((mu - 1) * mp.power(xj, mu - 2) * u**3 - 3 * mp.power(xj, mu - 1) * u**2)
        return 2 * u**-3 + term2 + term3

    try:
        root = mp.findroot(f, mp.convert(x_guess), solver="newton", df=df)
    except (ValueError, ZeroDivisionError) as e:
        raise NewtonDivergenceError(f"local expansion refine did not converge from {mp.nstr(x_guess, 10)}: {e}")
    logger.info(f"Local expansion refine: {mp.nstr(root, 12)}")
    return root


def _branch_log(mp, x, upper: bool):
    """log x with arg in [-π/2, 3π/2) (upper) or (-3π/2, π/2] (lower)."""
    L = mp.log(x)
    if mp.re(x) < 0:
        if upper and mp.im(x) < 0:
            L += 2 * mp.pi * mp.j
        elif not upper and mp.im(x) >= 0:
            L -= 2 * mp.pi * mp.j
    return L


class _PoleEquation:
    """Log form of the resummed double-pole condition on one ladder rung.

    K e^(σ i√3 z) λ^-ν x^(-ν(μ+4)/4) = -12 (1 - σ c/(12 z)) with σ = +1 and
    K = K₊ in the upper half-plane, σ = -1 and K = K₋ in the lower one, and
    c = i√3 ν (2ν - 124/15).
    """

    def __init__(self, params: ProblemParams, stokes: StokesResult, upper: bool):
        mp = params.prec.mp
        self.mp = mp
        self.params = params
        self.upper = upper
        self.sigma = 1 if upper else -1
        k = mp.convert(stokes.k_plus if upper else stokes.k_minus)
        self.log_k = mp.log(k)
        self.c = mp.j * mp.sqrt(3) * params.nu * (2 * params.nu - mp.mpf(124) / 15)
        self.rung_base = mp.log(12) + mp.pi * mp.j + params.nu * mp.log(params.lam) - self.log_k

    def parts(self, x):
        mp = self.mp
        p = self.params
        L = _branch_log(mp, x, self.upper)
        z = p.z_from_log(L)
        t = self.sigma * self.c / (12 * z)
        return L, z, t

    def value(self, x, k: int):
        mp = self.mp
        p = self.params
        L, z, t = self.parts(x)
        return (
            self.sigma * mp.j * mp.sqrt(3) * z
            - p.nu * p.q * L
            - mp.log(1 - t)
            - self.rung_base
            - 2 * mp.pi * mp.j * k
        )

    def derivative(self, x):
        mp = self.mp
        p = self.params
        _, z, t = self.parts(x)
        return (self.sigma * mp.j * mp.sqrt(3) * p.q * z - p.nu * p.q - t * p.q / (1 - t)) / x

    def residual(self, x):
        """Direct (non-log) form, for the final acceptance check."""
        mp = self.mp
        p = self.params
        L, z, t = self.parts(x)
        lhs = mp.exp(self.log_k + self.sigma * mp.j * mp.sqrt(3) * z - p.nu * (mp.log(p.lam) + p.q * L))
        return abs(lhs + 12 * (1 - t))

    def seeds(self, k: int, window: Window) -> List:
        """x solving the rung-k equation with the log x and 1/z terms frozen."""
        mp = self.mp
        p = self.params
        rhs = self.rung_base + 2 * mp.pi * mp.j * k
        w = rhs / (self.sigma * mp.j * mp.sqrt(3) * p.lam)
        if w == 0:
            return []
        lo = -mp.pi / 2 if self.upper else -3 * mp.pi / 2
        out = []
        base_arg = mp.arg(w)
        j_span = int(math.ceil(float(p.q))) + 2
        for j in range(-j_span, j_span + 1):
            arg = (base_arg + 2 * mp.pi * j) / p.q
            if not (lo <= arg < lo + 2 * mp.pi):
                continue
            x = mp.exp((mp.log(abs(w)) + mp.j * (base_arg + 2 * mp.pi * j)) / p.q)
            if abs(x - window.center) <= 2 * window.radius + 1:
                out.append(x)
        return out


def _damped_newton(equation: _PoleEquation, x0, k: int, prec: PrecisionContext, max_iter: int = 100):
    mp = prec.mp
    x = x0
    fx = equation.value(x, k)
    tol = mp.mpf(10) ** (-(prec.working_digits - 5))
    for _ in range(max_iter):
        if abs(fx) <= tol:
            return x
        d = equation.derivative(x)
        if d == 0:
            break
        step = fx / d
        for _ in range(30):
            candidate = x - step
            if candidate != 0:
                f_new = equation.value(candidate, k)
                if abs(f_new) < abs(fx):
                    break
            step /= 2
        else:
            raise NewtonDivergenceError(f"damped Newton stalled at {mp.nstr(x, 10)}")
        x, fx = candidate, f_new
        if abs(step) <= tol * max(mp.one, abs(x)):
            return x
    raise NewtonDivergenceError(f"Newton did not converge from {mp.nstr(x0, 10)}")


def predict_singularities(params: ProblemParams, stokes: StokesResult, half_plane: str, window: Window) -> List:
    """Solutions in ``window`` of the resummed double-pole condition.

    Seeds come from the log ladder k ↦ x with the right-hand side frozen at -12;
    each is polished by damped Newton at twice the target precision.
    """
    if half_plane not in ("upper", "lower"):
        raise ValueError(f"half_plane must be 'upper' or 'lower', got {half_plane!r}")
    upper = half_plane == "upper"
    fine_prec = params.prec.with_target(2 * params.prec.target_digits)
    fine = params.at_precision(fine_prec)
    mp = fine_prec.mp
    equation = _PoleEquation(fine, stokes, upper)
    center = mp.convert(window.center)
    radius = mp.convert(window.radius)
    window = Window(center, radius)

    reach = float(mp.sqrt(3) * fine.lam * (abs(center) + radius) ** fine.q + abs(equation.rung_base))
    k_max = int(math.ceil(reach / (2 * math.pi))) + 3
    roots: List = []
    dedupe = mp.mpf(10) ** (-(params.prec.target_digits / 2))
    for k in range(-k_max, k_max + 1):
        for seed in equation.seeds(k, window):
            try:
                root = _damped_newton(equation, seed, k, fine_prec)
            except NewtonDivergenceError as e:
                logger.debug(f"ladder rung {k}: {e}")
                continue
            if abs(root - center) > radius:
                continue
            if equation.residual(root) > mp.mpf(10) ** (-params.prec.target_digits):
                continue
            if all(abs(root - other) > dedupe for other in roots):
                roots.append(root)
    if not roots:
        raise NoRootsInWindowError(
            f"no {half_plane} half-plane pole predictions within {mp.nstr(radius, 4)} of {mp.nstr(center, 8)}"
        )
    roots.sort(key=lambda v: abs(v - center))
    out = [+params.prec.mp.convert(v) for v in roots]
    logger.info(f"Predicted {len(out)} singularities ({half_plane}) near {mp.nstr(center, 8)}")
    return out
