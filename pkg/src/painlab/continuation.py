"""Analytic continuation of y'' = 6y² - x^μ by the Taylor-series method.

At x0 the solution is expanded as y(x0 + t) = Σ b_m t^m with b0 = y, b1 = y'
and (m+2)(m+1) b_{m+2} = 6 Σ b_l b_{m-l} - C(μ, m) x0^(μ-m), where C(μ, m)
is the binomial coefficient of x^μ about x0. For non-integer μ the power is
taken from a log x that the walker carries along the path.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

from painlab.errors import (
    BranchPointError,
    PathPlanError,
    SingularityProximityError,
    StepTooLargeError,
)
from painlab.precision import PrecisionContext, pochhammer
from painlab.series import ProblemParams

logger = logging.getLogger(__name__)

MAX_HALVINGS = 30


@dataclass(frozen=True)
class SolutionState:
    x: object
    y: object
    dy: object

    @classmethod
    def of(cls, x, y, dy, prec: PrecisionContext) -> "SolutionState":
        return cls(prec.cplx(x), prec.cplx(y), prec.cplx(dy))

    def check(self, prec: PrecisionContext) -> "SolutionState":
        """Raise if y or y' is non-finite or beyond the overflow guard."""
        mp = prec.mp
        for name, value in (("y", self.y), ("dy", self.dy)):
            size = abs(value)
            if mp.isnan(size) or mp.isinf(size) or size > prec.overflow_guard:
                raise SingularityProximityError(
                    f"|{name}| = {mp.nstr(size, 5)} at x = {mp.nstr(self.x, 10)} exceeds the overflow guard"
                )
        return self

    def to_dict(self, prec: PrecisionContext) -> dict:
        mp = prec.mp
        out = {}
        for name, value in (("x", self.x), ("y", self.y), ("dy", self.dy)):
            out[f"{name}_re"] = prec.fmt(mp.re(value))
            out[f"{name}_im"] = prec.fmt(mp.im(value))
        return out

    def trace_row(self, prec: PrecisionContext) -> List[str]:
        d = self.to_dict(prec)
        return [d[k] for k in ("x_re", "x_im", "y_re", "y_im", "dy_re", "dy_im")]


TRACE_HEADER = ["x_re", "x_im", "y_re", "y_im", "dy_re", "dy_im"]


def _segment_distance_to_origin(mp, a, b):
    d = b - a
    t = -mp.re(mp.conj(d) * a) / abs(d) ** 2
    t = min(max(t, mp.zero), mp.one)
    return abs(a + t * d)


@dataclass(frozen=True)
class PathPlan:
    """Waypoints visited after the seed point, with uniform steps per segment."""

    waypoints: Tuple
    steps_per_segment: Union[int, Tuple[int, ...]] = 100
    taylor_terms: int = 40
    adaptive: bool = False
    exclusion_radius: float = 1e-3

    def segment_steps(self) -> List[int]:
        if isinstance(self.steps_per_segment, int):
            return [self.steps_per_segment] * len(self.waypoints)
        return list(self.steps_per_segment)

    def validate(self, start, params: ProblemParams) -> None:
        mp = params.prec.mp
        if not self.waypoints:
            raise PathPlanError("path plan has no waypoints")
        if self.taylor_terms < 4:
            raise PathPlanError(f"Taylor degree must be at least 4, got {self.taylor_terms}")
        steps = self.segment_steps()
        if len(steps) != len(self.waypoints) or any(s < 1 for s in steps):
            raise PathPlanError(f"need one positive step count per segment, got {self.steps_per_segment}")
        points = [mp.convert(start)] + [mp.convert(w) for w in self.waypoints]
        for a, b in zip(points, points[1:]):
            if a == b:
                raise PathPlanError(f"consecutive waypoints coincide at {mp.nstr(a, 10)}")
            if not params.mu_is_nonneg_integer:
                if _segment_distance_to_origin(mp, a, b) < self.exclusion_radius:
                    raise BranchPointError(
                        f"segment {mp.nstr(a, 6)} -> {mp.nstr(b, 6)} enters the exclusion disk "
                        f"of radius {self.exclusion_radius} around the branch point x = 0"
                    )


@lru_cache(maxsize=32)
def _forcing_binomials(params: ProblemParams, M: int) -> Tuple:
    """C(μ, m) = (-1)^m (-μ)_m / m! for m = 0..M."""
    prec = params.prec
    mp = prec.mp
    return tuple((-1) ** m * pochhammer(-params.mu_mp, m, prec) / mp.factorial(m) for m in range(M + 1))


def _forcing_terms(x0, params: ProblemParams, M: int, log_x=None) -> List:
    """Taylor coefficients of x^μ about x0, up to degree M."""
    mp = params.prec.mp
    binom = _forcing_binomials(params, M)
    if params.mu_is_nonneg_integer:
        power = int(params.mu)
        out = []
        for m in range(M + 1):
            if m > power:
                out.append(mp.zero)
            elif m == power:
                out.append(binom[m])
            else:
                out.append(binom[m] * x0 ** (power - m))
        return out
    if x0 == 0:
        raise BranchPointError(f"x^mu with mu = {params.mu} needs a branch, cannot expand at x = 0")
    if log_x is None:
        log_x = mp.log(x0)
    term = mp.exp(params.mu_mp * log_x)
    inv = 1 / x0
    out = []
    for m in range(M + 1):
        out.append(binom[m] * term)
        term *= inv
    return out


def taylor_expand(state: SolutionState, M: int, params: ProblemParams, log_x=None) -> List:
    """Taylor coefficients b_0..b_M of the solution through ``state``."""
    if M < 2:
        raise PathPlanError(f"Taylor degree must be at least 2, got {M}")
    mp = params.prec.mp
    x0 = mp.convert(state.x)
    forcing = _forcing_terms(x0, params, M, log_x)
    b = [mp.convert(state.y), mp.convert(state.dy)] + [mp.zero] * (M - 1)
    for m in range(M - 1):
        conv = mp.fsum(b[l] * b[m - l] for l in range(m + 1))
        b[m + 2] = (6 * conv - forcing[m]) / ((m + 2) * (m + 1))
    return b


def radius_estimate(b: Sequence, prec: PrecisionContext):
    """Root-test radius min |b_m|^(-1/m) over the non-zero top quartile."""
    mp = prec.mp
    M = len(b) - 1
    start = max(1, (3 * M) // 4)
    values = [abs(b[m]) ** (mp.mpf(-1) / m) for m in range(start, M + 1) if b[m] != 0]
    return min(values) if values else mp.inf


def tail_estimate(b: Sequence, step, prec: PrecisionContext):
    mp = prec.mp
    M = len(b) - 1
    h = abs(mp.convert(step))
    return abs(b[M]) * h**M + abs(b[M - 1]) * h ** (M - 1)


def taylor_residual(b: Sequence, state: SolutionState, params: ProblemParams, log_x=None) -> List:
    """Coefficients of y'' - 6y² + x^μ for the polynomial Σ b_m t^m, degrees 0..M-2."""
    mp = params.prec.mp
    M = len(b) - 1
    forcing = _forcing_terms(mp.convert(state.x), params, M, log_x)
    out = []
    for m in range(M - 1):
        second = (m + 2) * (m + 1) * b[m + 2]
        square = mp.fsum(b[l] * b[m - l] for l in range(m + 1))
        out.append(second - 6 * square + forcing[m])
    return out


def _take_step(state: SolutionState, step, M: int, params: ProblemParams, log_x, tail_limit):
    prec = params.prec
    mp = prec.mp
    b = taylor_expand(state, M, params, log_x)
    rho = radius_estimate(b, prec)
    h = mp.convert(step)
    if abs(h) > rho / 3:
        raise StepTooLargeError(
            f"|step| = {mp.nstr(abs(h), 5)} exceeds a third of the estimated radius {mp.nstr(rho, 5)} "
            f"at x = {mp.nstr(state.x, 10)}"
        )
    scale = max(abs(b[0]), mp.one)
    tail = tail_estimate(b, h, prec) / scale
    if mp.isnan(tail) or mp.isinf(tail):
        raise SingularityProximityError(f"Taylor tail is not finite at x = {mp.nstr(state.x, 10)}")
    if tail > tail_limit:
        raise StepTooLargeError(
            f"relative tail {mp.nstr(tail, 5)} exceeds {mp.nstr(tail_limit, 3)} at x = {mp.nstr(state.x, 10)}"
        )
    coeffs = list(reversed(b))
    y, dy = mp.polyval(coeffs, h, derivative=True)
    new = SolutionState(state.x + h, y, dy).check(prec)
    return new, tail


def advance(state: SolutionState, step, M: int, params: ProblemParams, log_x=None) -> SolutionState:
    """State at x0 + step from the degree-M Taylor polynomial."""
    mp = params.prec.mp
    if mp.convert(step) == 0:
        return state
    new, _ = _take_step(state, step, M, params, log_x, default_tail_limit(params.prec))
    return new


def default_tail_limit(prec: PrecisionContext):
    return prec.mp.mpf(10) ** (-(prec.target_digits // 2))


class TaylorWalker:
    """Owns a solution state, the continued log x and the accumulated error bound."""

    def __init__(
        self,
        seed: SolutionState,
        params: ProblemParams,
        taylor_terms: int = 40,
        log_x=None,
        adaptive: bool = False,
        record_trace: bool = False,
    ):
        self.params = params
        self.prec = params.prec
        mp = self.prec.mp
        self.state = SolutionState(mp.convert(seed.x), mp.convert(seed.y), mp.convert(seed.dy))
        self.taylor_terms = taylor_terms
        self.adaptive = adaptive
        self.tail_limit = default_tail_limit(self.prec)
        self.error_bound = mp.zero
        self.steps_taken = 0
        self.trace: Optional[List[SolutionState]] = [self.state] if record_trace else None
        if params.mu_is_nonneg_integer:
            self.log_x = None
        elif log_x is not None:
            self.log_x = mp.convert(log_x)
        else:
            if self.state.x == 0:
                raise BranchPointError("cannot start a walk at the branch point x = 0")
            self.log_x = mp.log(self.state.x)

    def _accept(self, new: SolutionState, tail) -> None:
        mp = self.prec.mp
        if self.log_x is not None:
            if new.x == 0:
                raise BranchPointError("walk landed on the branch point x = 0")
            self.log_x += mp.log(new.x / self.state.x)
        self.state = new
        self.error_bound += tail
        self.steps_taken += 1
        if self.trace is not None:
            self.trace.append(new)

    def step(self, h) -> SolutionState:
        h = self.prec.mp.convert(h)
        if h == 0:
            return self.state
        if self.adaptive:
            self._adaptive_step(h, 0)
        else:
            new, tail = _take_step(self.state, h, self.taylor_terms, self.params, self.log_x, self.tail_limit)
            self._accept(new, tail)
        return self.state

    def _adaptive_step(self, h, depth: int) -> None:
        mp = self.prec.mp
        strict = mp.mpf(10) ** (-self.prec.working_digits)
        try:
            new, tail = _take_step(self.state, h, self.taylor_terms, self.params, self.log_x, strict)
        except StepTooLargeError:
            if depth >= MAX_HALVINGS:
                raise SingularityProximityError(
                    f"step halved {MAX_HALVINGS} times near x = {mp.nstr(self.state.x, 10)}; singularity too close"
                )
            self._adaptive_step(h / 2, depth + 1)
            self._adaptive_step(h / 2, depth + 1)
            return
        self._accept(new, tail)

    def walk_to(self, target, steps: int) -> SolutionState:
        """Uniform steps along the straight segment, landing exactly on ``target``."""
        mp = self.prec.mp
        target = mp.convert(target)
        for i in range(steps):
            self.step((target - self.state.x) / (steps - i))
        logger.debug(f"walked to {mp.nstr(target, 8)}: error bound {mp.nstr(self.error_bound, 3)}")
        return self.state

    def follow(self, plan: PathPlan) -> SolutionState:
        plan.validate(self.state.x, self.params)
        self.taylor_terms = plan.taylor_terms
        self.adaptive = plan.adaptive
        for waypoint, steps in zip(plan.waypoints, plan.segment_steps()):
            self.walk_to(waypoint, steps)
        return self.state


@dataclass
class WalkResult:
    state: SolutionState
    error_bound: object
    steps: int
    log_x: object = None
    trace: Optional[List[SolutionState]] = field(default=None, repr=False)


def walk(seed: SolutionState, plan: PathPlan, params: ProblemParams, log_x=None, record_trace: bool = False) -> WalkResult:
    """Continue ``seed`` through every waypoint of ``plan``."""
    walker = TaylorWalker(seed, params, plan.taylor_terms, log_x, plan.adaptive, record_trace)
    walker.follow(plan)
    mp = params.prec.mp
    logger.info(
        f"Walk mu={params.mu}: {walker.steps_taken} steps to x={mp.nstr(walker.state.x, 10)}, "
        f"error bound {mp.nstr(walker.error_bound, 3)}"
    )
    return WalkResult(walker.state, walker.error_bound, walker.steps_taken, walker.log_x, walker.trace)
