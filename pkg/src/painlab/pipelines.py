"""End-to-end reproduction runs compared digit by digit with stored values."""
import json
import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence

from painlab.asymptotics import eval_level0
from painlab.config import parse_complex
from painlab.continuation import TaylorWalker, taylor_expand
from painlab.errors import ConfigError
from painlab.hunter import (
    Functional,
    SingularityEstimate,
    Window,
    contour_locate,
    local_expansion_refine,
    log_corrected_locate,
    predict_singularities,
)
from painlab.pade import build_pade_robust, nearest_candidate, scan
from painlab.precision import DEFAULT_GUARD_DIGITS, PrecisionContext
from painlab.series import ProblemParams
from painlab.stokes import StokesResult, compute_stokes, exact_stokes_mu1

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"\d[\d.]*")


class ReferenceBook:
    """Stored reference values shipped in painlab/data/reference_values.json."""

    def __init__(self, data: Optional[dict] = None):
        if data is None:
            text = resources.files("painlab").joinpath("data/reference_values.json").read_text(encoding="utf-8")
            data = json.loads(text)
        self.version = data.get("version")
        self.cases: Dict[str, Dict[str, str]] = data["cases"]

    def text(self, family: str, key: str) -> str:
        try:
            return self.cases[family][key]
        except KeyError:
            raise ConfigError(f"no stored reference value {family}.{key}")

    def value(self, family: str, key: str, prec: PrecisionContext):
        return parse_complex(self.text(family, key), prec)


def printed_digits(text: str) -> int:
    """Significant digits of the longest number in ``text``."""
    best = 0
    for token in _NUMBER.findall(text):
        mantissa = token.replace(".", "").lstrip("0")
        best = max(best, len(mantissa))
    return best


def digits_agreement(computed, reference_text: str, prec: PrecisionContext) -> int:
    """Agreeing significant digits, capped at the digits printed in the reference."""
    mp = prec.mp
    reference = parse_complex(reference_text, prec)
    cap = printed_digits(reference_text)
    diff = abs(mp.convert(computed) - reference)
    if diff == 0:
        return cap
    scale = abs(reference)
    if scale == 0:
        return 0
    agreeing = int(math.floor(-float(mp.log10(diff / scale))))
    return max(0, min(cap, agreeing))


@dataclass
class Comparison:
    quantity: str
    computed: object
    reference: str
    digits: int

    def to_dict(self, prec: PrecisionContext) -> dict:
        return {
            "quantity": self.quantity,
            "computed": prec.fmt(self.computed),
            "reference": self.reference,
            "digits": self.digits,
        }


@dataclass
class CaseReport:
    case: str
    mu: Fraction
    prec: PrecisionContext = field(repr=False)
    comparisons: List[Comparison] = field(default_factory=list)
    extra: Dict[str, object] = field(default_factory=dict)

    def compare(self, quantity: str, computed, reference_text: str) -> Comparison:
        row = Comparison(quantity, computed, reference_text, digits_agreement(computed, reference_text, self.prec))
        self.comparisons.append(row)
        return row

    def worst_digits(self) -> int:
        return min((c.digits for c in self.comparisons), default=0)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "mu": str(self.mu),
            "digits": self.prec.target_digits,
            "guard_digits": self.prec.guard_digits,
            "comparisons": [c.to_dict(self.prec) for c in self.comparisons],
            "extra": {k: (v if isinstance(v, (str, int)) else self.prec.fmt(v)) for k, v in self.extra.items()},
        }


def approach(walker: TaylorWalker, center, r, steps: int) -> None:
    """Walk to center + 1/2 in ``steps`` steps, then in to center + r with steps of r/10."""
    mp = walker.prec.mp
    center = mp.convert(center)
    r = mp.convert(r)
    half = mp.mpf(1) / 2
    if r < half:
        walker.walk_to(center + half, steps)
        inner = max(1, math.ceil(float((half - r) / (r / 10))))
        walker.walk_to(center + r, inner)
    else:
        walker.walk_to(center + r, steps)


def refine_singularity(
    base: TaylorWalker,
    guess,
    radii,
    M: int,
    params: ProblemParams,
    approach_steps: int = 1000,
    functional: Functional = Functional.POLE,
) -> List[SingularityEstimate]:
    """Contour estimates for shrinking radii, recentring on each new estimate.

    Every pass restarts from the walker's current state.
    """
    out = []
    center = params.prec.mp.convert(guess)
    for r in radii:
        walker = TaylorWalker(base.state, params, base.taylor_terms, base.log_x)
        approach(walker, center, r, approach_steps)
        estimate = contour_locate(
            center, r, M, walker.state, params, functional, walker.taylor_terms, log_x=walker.log_x
        )
        out.append(estimate)
        center = estimate.location
    return out


def _params(mu: str, prec: PrecisionContext) -> ProblemParams:
    return ProblemParams(Fraction(mu), -1, prec)


def _mu1_origin_walker(params: ProblemParams, report: Optional[CaseReport], book: ReferenceBook) -> TaylorWalker:
    seed = eval_level0(33, params)
    if report is not None:
        report.compare("y(33)", seed.y, book.text("mu1", "y_33"))
        report.compare("y'(33)", seed.dy, book.text("mu1", "dy_33"))
    walker = TaylorWalker(seed, params, 40)
    walker.walk_to(0, 1000)
    return walker


def case_mu1_stokes(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("1", prec)
    report = CaseReport("mu1-stokes", params.mu, params.prec)
    stokes = compute_stokes(params, 100, 100)
    exact = exact_stokes_mu1(params.prec)
    report.compare("K-", stokes.k_minus, params.prec.fmt(exact, prec.target_digits))
    report.extra["est_err"] = params.prec.mp.nstr(stokes.estimated_error, 5)
    return report


def case_mu1_origin(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("1", prec)
    report = CaseReport("mu1-origin", params.mu, params.prec)
    walker = _mu1_origin_walker(params, report, book)
    report.compare("y(0)", walker.state.y, book.text("mu1", "y_0"))
    report.compare("y'(0)", walker.state.dy, book.text("mu1", "dy_0"))
    report.extra["error_bound"] = params.prec.mp.nstr(walker.error_bound, 5)
    return report


def case_mu1_zero(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("1", prec)
    mp = params.prec.mp
    report = CaseReport("mu1-zero", params.mu, params.prec)
    origin = _mu1_origin_walker(params, None, book)
    estimate = contour_locate(mp.mpf(-1) / 2, mp.mpf(1) / 2, 60, origin.state, params, Functional.ZERO, 40)
    report.compare("z1", estimate.location, book.text("mu1", "zero_1"))
    origin.walk_to(estimate.location, 10)
    report.compare("y'(z1)", origin.state.dy, book.text("mu1", "dy_zero_1"))
    report.extra["closure_gap"] = mp.nstr(estimate.closure_gap, 5)
    return report


def case_mu1_poles(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("1", prec)
    mp = params.prec.mp
    report = CaseReport("mu1-poles", params.mu, params.prec)
    origin = _mu1_origin_walker(params, None, book)
    at_origin = origin.state

    origin.walk_to(-2, 300)
    report.compare("y(-2)", origin.state.y, book.text("mu1", "y_m2"))
    report.compare("y'(-2)", origin.state.dy, book.text("mu1", "dy_m2"))
    p1 = contour_locate(mp.mpf(-5) / 2, mp.mpf(1) / 2, 200, origin.state, params, Functional.H_RESIDUE, 40)
    report.compare("p1", p1.location, book.text("mu1", "pole_1"))
    report.compare("h1", p1.h, book.text("mu1", "h_1"))

    center = mp.mpc(-4, "1.3")
    second = TaylorWalker(at_origin, params, 40)
    second.walk_to(center + mp.mpf(1) / 2, 300)
    p2 = contour_locate(center, mp.mpf(1) / 2, 200, second.state, params, Functional.POLE, 40)
    report.compare("Re p2", mp.re(p2.location), book.text("mu1", "pole_2_re"))
    report.compare("Im p2", mp.im(p2.location), book.text("mu1", "pole_2_im"))
    return report


def _mu157_walker_at_2(params: ProblemParams, report: Optional[CaseReport], book: ReferenceBook) -> TaylorWalker:
    seed = eval_level0(6, params)
    if report is not None:
        report.compare("y(6)", seed.y, book.text("mu157", "y_6"))
        report.compare("y'(6)", seed.dy, book.text("mu157", "dy_6"))
    walker = TaylorWalker(seed, params, 20)
    walker.walk_to(2, 100)
    return walker


def case_mu157_stokes(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("15/7", prec)
    report = CaseReport("mu157-stokes", params.mu, params.prec)
    stokes = compute_stokes(params, 15, 15)
    report.compare("K-", stokes.k_minus, book.text("mu157", "K_minus"))
    return report


def case_mu157_seed(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("15/7", prec)
    report = CaseReport("mu157-seed", params.mu, params.prec)
    walker = _mu157_walker_at_2(params, report, book)
    report.compare("y(2)", walker.state.y, book.text("mu157", "y_2"))
    report.compare("y'(2)", walker.state.dy, book.text("mu157", "dy_2"))
    return report


_RADII = (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100))


def _radii(prec: PrecisionContext):
    return [prec.real(r) for r in _RADII]


def case_mu157_p1(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("15/7", prec)
    prec = params.prec
    report = CaseReport("mu157-p1", params.mu, prec)
    base = _mu157_walker_at_2(params, None, book)

    guess = book.value("mu157", "pole_1_guess", prec)
    near = TaylorWalker(base.state, params, 20, base.log_x)
    near.walk_to(guess + prec.real(Fraction(1, 2)), 1000)
    report.compare("y(p1+1/2)", near.state.y, book.text("mu157", "y_pole_1_offset"))
    report.compare("y'(p1+1/2)", near.state.dy, book.text("mu157", "dy_pole_1_offset"))

    estimates = refine_singularity(base, guess, _radii(prec), 1000, params)
    for estimate, key in zip(estimates, ("pole_1_r2", "pole_1_r10", "pole_1_r100")):
        report.compare(f"p1 (r={prec.mp.nstr(estimate.radius, 3)})", estimate.location, book.text("mu157", key))
    corrected = log_corrected_locate(estimates[-1], params)
    report.extra["p1_log_corrected"] = corrected.location
    return report


def case_mu157_p2(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("15/7", prec)
    prec = params.prec
    report = CaseReport("mu157-p2", params.mu, prec)
    base = _mu157_walker_at_2(params, None, book)

    estimates = refine_singularity(base, book.value("mu157", "pole_2_guess", prec), _radii(prec), 1000, params)
    for estimate, key in zip(estimates, ("pole_2_r2", "pole_2_r10", "pole_2_r100")):
        report.compare(f"p2 (r={prec.mp.nstr(estimate.radius, 3)})", estimate.location, book.text("mu157", key))

    guess = book.value("mu157", "pole_2_near_guess", prec)
    near = TaylorWalker(base.state, params, 20, base.log_x)
    approach(near, guess, prec.real(Fraction(1, 100)), 1000)
    report.compare("y(p2+1/100)", near.state.y, book.text("mu157", "y_pole_2_near"))
    local = local_expansion_refine(near.state.x, near.state.y, guess, params)
    report.compare("p2 (local expansion)", local, book.text("mu157", "pole_2_local"))
    return report


def _prediction_report(
    case: str,
    params: ProblemParams,
    stokes: StokesResult,
    window: Window,
    family: str,
    confirmed: Sequence,
    book: ReferenceBook,
) -> CaseReport:
    """Predicted roots nearest each contour-confirmed location, with relative errors."""
    prec = params.prec
    mp = prec.mp
    report = CaseReport(case, params.mu, prec)
    roots = predict_singularities(params, stokes, "upper", window)
    for i, target in enumerate(confirmed, start=1):
        best = min(roots, key=lambda v: abs(v - target))
        report.compare(f"predicted p{i}", best, book.text(family, f"predicted_pole_{i}"))
        rel = abs(best - target) / abs(target)
        report.compare(f"relative error p{i}", rel, book.text(family, f"predicted_rel_err_{i}"))
        report.extra[f"rel_err_{i}"] = mp.nstr(rel, 3)
    return report


def case_mu157_predict(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("15/7", prec)
    mp = params.prec.mp
    stokes = compute_stokes(params, 15, 15)
    window = Window(mp.mpc(-3, "2.4"), mp.mpf(1))
    confirmed = [book.value("mu157", key, params.prec) for key in ("pole_1_r100", "pole_2_r100")]
    return _prediction_report("mu157-predict", params, stokes, window, "mu157", confirmed, book)


def case_mu1_predict(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("1", prec)
    mp = params.prec.mp
    exact = exact_stokes_mu1(params.prec)
    stokes = StokesResult(exact, mp.conj(exact), 0, 0, mp.zero)
    window = Window(mp.mpc("-3.2", "0.7"), mp.mpf("1.3"))
    second = book.value("mu1", "pole_2_re", params.prec) + mp.j * book.value("mu1", "pole_2_im", params.prec)
    confirmed = [book.value("mu1", "pole_1", params.prec), second]
    return _prediction_report("mu1-predict", params, stokes, window, "mu1", confirmed, book)


def case_mu4_stokes(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("4", prec)
    report = CaseReport("mu4-stokes", params.mu, params.prec)
    stokes = compute_stokes(params, 15, 15)
    report.compare("K-", stokes.k_minus, book.text("mu4", "K_minus"))
    return report


def case_mu4_scan(prec: PrecisionContext, book: ReferenceBook) -> CaseReport:
    params = _params("4", prec)
    prec = params.prec
    report = CaseReport("mu4-scan", params.mu, prec)
    seed = eval_level0(8, params)
    origin = TaylorWalker(seed, params, 40)
    origin.walk_to(0, 400)
    taylor = taylor_expand(origin.state, 119, params)
    approximant = build_pade_robust(taylor, 59, 60, prec)
    reports = scan(approximant)
    report.extra["pade_order"] = f"[{approximant.order[0]}/{approximant.order[1]}]"
    report.extra["doublets"] = sum(1 for r in reports if r.doublet and r.kind == "pole")
    for key in ("pole_0", "pole_1", "pole_2"):
        candidate = nearest_candidate(reports, book.value("mu4", key, prec))
        estimates = refine_singularity(origin, candidate.value, _radii(prec), 400, params, approach_steps=400)
        corrected = log_corrected_locate(estimates[-1], params)
        report.compare(f"{key.replace('_', ' ')} (Pade)", candidate.value, book.text("mu4", key))
        report.compare(f"{key.replace('_', ' ')} (contour)", corrected.location, book.text("mu4", key))
    return report


@dataclass(frozen=True)
class Case:
    name: str
    description: str
    default_digits: int
    run: Callable[[PrecisionContext, ReferenceBook], CaseReport]


CASES: Dict[str, Case] = {
    c.name: c
    for c in (
        Case("mu1-stokes", "K- for mu=1 from n=100, 100 terms, against the closed form", 60, case_mu1_stokes),
        Case("mu1-origin", "seed at x=33, walk 1000 steps to the origin", 60, case_mu1_origin),
        Case("mu1-zero", "first zero by contour, then y' there", 60, case_mu1_zero),
        Case("mu1-poles", "walk to -2, first real pole with h, first complex pole", 60, case_mu1_poles),
        Case("mu157-stokes", "K- for mu=15/7 from n=15, 15 terms", 10, case_mu157_stokes),
        Case("mu157-seed", "seed at x=6, walk 100 steps to x=2", 10, case_mu157_seed),
        Case("mu157-p1", "first pole by shrinking contours", 10, case_mu157_p1),
        Case("mu157-p2", "second pole by contours and local expansion", 10, case_mu157_p2),
        Case("mu157-predict", "resummed pole predictions for mu=15/7", 10, case_mu157_predict),
        Case("mu1-predict", "resummed pole predictions for mu=1", 30, case_mu1_predict),
        Case("mu4-stokes", "K- for mu=4 from n=15, 15 terms", 10, case_mu4_stokes),
        Case("mu4-scan", "Pade scan at the origin, contour-confirmed singularities", 30, case_mu4_scan),
    )
}


def run_case(
    name: str,
    digits: Optional[int] = None,
    book: Optional[ReferenceBook] = None,
    guard_digits: int = DEFAULT_GUARD_DIGITS,
) -> CaseReport:
    if name not in CASES:
        raise ConfigError(f"unknown case {name!r}; choose from {', '.join(CASES)}")
    case = CASES[name]
    book = book or ReferenceBook()
    digits = digits or case.default_digits
    logger.info(f"Reproducing {name} at {digits} digits (+{guard_digits} guard)")
    return case.run(PrecisionContext(digits, guard_digits), book)
