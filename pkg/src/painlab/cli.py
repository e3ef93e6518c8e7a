"""CLI for painlab"""
import logging
from contextlib import contextmanager
from typing import List, Optional, Tuple

from dotenv import load_dotenv

load_dotenv()
import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from painlab import __version__
from painlab.asymptotics import AsymptoticResult, eval_level0, evaluate, EvalRequest, seed_point
from painlab.borel import (
    SIGMA_CSV_HEADER,
    SIGMA_TILDE_CSV_HEADER,
    sigma_bound,
    sigma_curve,
    sigma_tilde_curve,
    verify_integral_equation,
)
from painlab.config import LabSettings, RunConfig, SettingsStore, parse_complex, parse_rational
from painlab.continuation import TRACE_HEADER, PathPlan, SolutionState, TaylorWalker, taylor_expand
from painlab.errors import ConfigError, PainlabError
from painlab.hunter import Functional, Window, contour_locate, local_expansion_refine, log_corrected_locate, predict_singularities
from painlab.pade import PADE_CSV_HEADER, build_pade_robust, scan
from painlab.pipelines import CASES, approach, run_case
from painlab.series import ProblemParams, transseries_table
from painlab.stokes import compute_stokes, stokes_sweep
from painlab.storage import ArtifactWriter

HELP_TEXT = """
# painlab 🧮

**Arbitrary-precision lab for the tri-tronquée solutions of y'' = 6y² − xᵘ.**

*   **coeffs**: transseries coefficient table.
*   **stokes**: Stokes multipliers from late coefficients.
*   **eval**: y₋ (or y₊) at large |x| by optimal truncation or hyperasymptotics.
*   **walk**: Taylor-series continuation along a polygonal path.
*   **pade-scan**: Padé zeros and poles with Froissart flags.
*   **locate**: contour-integral (or local-expansion) singularity location.
*   **predict**: singularity locations from the resummed transseries.
*   **borel-bound**: summability bounds σ(ν), σ̃(μ).
*   **reproduce**: named end-to-end runs checked digit by digit.

μ is given exactly, e.g. `--mu 15/7`. JSON goes to stdout unless `--output` is set.
"""

app = typer.Typer(
    help=HELP_TEXT,
    rich_markup_mode="markdown",
    context_settings={"help_option_names": ["-h", "--help"]},
)
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)


def version_callback(value: bool):
    if value:
        console.print(f"[bold blue]painlab[/bold blue] v{__version__}")
        raise typer.Exit()


def configure_logging(level: str, log_file: Optional[str] = None) -> None:
    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    root.setLevel(level)
    root.addHandler(RichHandler(console=err_console, show_path=False, markup=False))
    if log_file:
        fh = logging.FileHandler(log_file, mode="a", encoding="utf-8")
        fh.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))
        root.addHandler(fh)


@contextmanager
def numeric_errors():
    """Map painlab failures to exit code 1 with the originating module's message."""
    try:
        yield
    except PainlabError as e:
        err_console.print(f"[bold red]✗ {e}[/bold red]")
        raise typer.Exit(code=1)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None, "--version", "-v", help="Show the application version and exit.", callback=version_callback, is_eager=True
    ),
    settings: Optional[str] = typer.Option(None, "--settings", help="Settings file (default: painlab.json)."),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR."),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Also log to this file."),
):
    """
    painlab: high-precision numerics for the perturbed first Painlevé equation.
    """
    with numeric_errors():
        lab = SettingsStore(settings).settings
        if log_level:
            lab = LabSettings.from_dict({**lab.to_dict(), "log_level": log_level})
    configure_logging(lab.log_level, log_file)
    ctx.obj = lab
    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())


def _lab(ctx: typer.Context) -> LabSettings:
    return ctx.obj if isinstance(ctx.obj, LabSettings) else LabSettings()


def _config(ctx: typer.Context, command: str, mu: Optional[str], digits: Optional[int], output: Optional[str], **options) -> RunConfig:
    lab = _lab(ctx)
    return RunConfig(
        command=command,
        mu=mu,
        digits=digits or lab.digits,
        guard_digits=lab.guard_digits,
        options={k: v for k, v in options.items()},
        output_path=output,
    )


def _params(config: RunConfig) -> ProblemParams:
    return ProblemParams(config.mu_exact, -1, config.prec)


def _emit(config: RunConfig, result: dict) -> None:
    text = ArtifactWriter(config).write_json(result)
    if config.output_path:
        err_console.print(f"[green]✅ wrote {config.output_path}[/green]")
    else:
        typer.echo(text, nl=False)


def _seed_state(config: RunConfig, params: ProblemParams, start: Optional[str], seed_y: Optional[str], seed_dy: Optional[str]) -> SolutionState:
    prec = params.prec
    if (seed_y is None) != (seed_dy is None):
        raise ConfigError("--seed-y and --seed-dy must be given together")
    if start is None:
        if seed_y is not None:
            raise ConfigError("--seed-y/--seed-dy need an explicit --from")
        x0 = prec.real(seed_point(params))
        logger.info(f"No --from given; seeding at x = {float(x0):.4g}")
        return eval_level0(x0, params)
    x0 = parse_complex(start, prec)
    if seed_y is not None:
        return SolutionState(x0, parse_complex(seed_y, prec), parse_complex(seed_dy, prec))
    return eval_level0(x0, params)


@app.command()
def coeffs(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu", help="μ as a rational, e.g. 15/7."),
    n_max: int = typer.Option(20, "--n-max", help="Largest n."),
    k_max: int = typer.Option(2, "--k-max", help="Largest k."),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
    csv_path: Optional[str] = typer.Option(None, "--csv", help="Also write the (n, k, re, im) table as CSV."),
):
    """Transseries coefficients a(n,k)."""
    with numeric_errors():
        config = _config(ctx, "coeffs", mu, digits, output, n_max=n_max, k_max=k_max)
        params = _params(config)
        table = transseries_table(params, n_max, k_max)
        rows = table.export_rows()
        if csv_path:
            ArtifactWriter(config).write_csv(csv_path, ["n", "k", "re", "im"], rows)
        _emit(config, {"rows": rows})


@app.command()
def stokes(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    n: int = typer.Option(15, "--n", help="Use the relation for a(2n,0)."),
    terms: Optional[int] = typer.Option(None, "--terms", help="Level-one terms (default: n)."),
    sweep: Optional[str] = typer.Option(None, "--sweep", help="Comma-separated n values, e.g. 5,10,15."),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """Stokes multiplier K₋ (K₊ is its conjugate)."""
    with numeric_errors():
        config = _config(ctx, "stokes", mu, digits, output, n=n, terms=terms, sweep=sweep)
        params = _params(config)
        if sweep:
            try:
                ns = [int(v) for v in sweep.split(",") if v.strip()]
            except ValueError:
                raise ConfigError(f"--sweep must list integers, got {sweep!r}")
            result = stokes_sweep(params, ns, terms)
            table = Table(title=f"K₋ for μ = {params.mu}")
            table.add_column("n", justify="right")
            table.add_column("K₋")
            table.add_column("est. error")
            for r in result.results:
                table.add_row(str(r.n_used // 2), params.prec.fmt(r.k_minus, 20), params.prec.mp.nstr(r.estimated_error, 3))
            err_console.print(table)
            _emit(config, {"sweep": [r.to_dict(params) for r in result.results], "diverging": result.diverging})
            return
        result = compute_stokes(params, n, terms or n)
        _emit(config, result.to_dict(params))


@app.command("eval")
def eval_command(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    x: str = typer.Option(..., "--x", help="Evaluation point, e.g. 33 or 20+1i."),
    level: int = typer.Option(0, "--level", help="0: optimal truncation, 1: hyperasymptotic."),
    n: Optional[int] = typer.Option(None, "--n", help="Override the truncation index."),
    plus: bool = typer.Option(False, "--plus", help="Evaluate the rotated family y₊ instead."),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """y and y' from the asymptotic expansion."""
    with numeric_errors():
        config = _config(ctx, "eval", mu, digits, output, x=x, level=level, n=n, plus=plus)
        params = _params(config)
        point = parse_complex(x, params.prec)
        outcome: AsymptoticResult = evaluate(EvalRequest(point, params, level, n, plus))
        _emit(config, outcome.to_dict(params))


@app.command()
def walk(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    start: str = typer.Option(..., "--from", help="Start point; seeded by the asymptotic expansion unless --seed-y/--seed-dy."),
    to: str = typer.Option(..., "--to", help="End point."),
    via: List[str] = typer.Option([], "--via", help="Intermediate waypoint (repeatable)."),
    steps: Optional[int] = typer.Option(None, "--steps", help="Steps per segment."),
    terms: Optional[int] = typer.Option(None, "--terms", help="Taylor degree M."),
    adaptive: bool = typer.Option(False, "--adaptive", help="Halve steps until the tail is below working precision."),
    seed_y: Optional[str] = typer.Option(None, "--seed-y"),
    seed_dy: Optional[str] = typer.Option(None, "--seed-dy"),
    trace_csv: Optional[str] = typer.Option(None, "--trace-csv", help="Write every step as CSV."),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """Continue the solution along straight segments by the Taylor-series method."""
    with numeric_errors():
        lab = _lab(ctx)
        steps = steps or lab.walk_steps
        terms = terms or lab.taylor_terms
        config = _config(
            ctx, "walk", mu, digits, output,
            start=start, to=to, via=list(via), steps=steps, terms=terms, adaptive=adaptive,
            seed_y=seed_y, seed_dy=seed_dy,
        )
        params = _params(config)
        prec = params.prec
        seed = _seed_state(config, params, start, seed_y, seed_dy)
        waypoints = tuple(parse_complex(v, prec) for v in list(via) + [to])
        plan = PathPlan(waypoints, steps, terms, adaptive, lab.exclusion_radius)
        walker = TaylorWalker(seed, params, terms, record_trace=bool(trace_csv))
        walker.follow(plan)
        if trace_csv:
            ArtifactWriter(config).write_csv(trace_csv, TRACE_HEADER, (s.trace_row(prec) for s in walker.trace))
        result = walker.state.to_dict(prec)
        result.update({"steps": walker.steps_taken, "error_bound": prec.mp.nstr(walker.error_bound, 5)})
        _emit(config, result)


@app.command("pade-scan")
def pade_scan(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    start: Optional[str] = typer.Option(None, "--from", help="Seed point for the walk to --center (default: where level 0 reaches the target digits)."),
    at: str = typer.Option("0", "--center", "--at", help="Expansion point of the approximant."),
    n_coeffs: int = typer.Option(120, "--coeffs", help="Number of Taylor coefficients."),
    order: Tuple[int, int] = typer.Option((None, None), "--order", help="L M (default: near-diagonal)."),
    steps: Optional[int] = typer.Option(None, "--steps"),
    terms: Optional[int] = typer.Option(None, "--terms"),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
    csv_path: Optional[str] = typer.Option(None, "--csv"),
):
    """Zeros and poles of a Padé approximant, with Froissart doublets flagged."""
    with numeric_errors():
        lab = _lab(ctx)
        L, M = order
        if L is None or M is None:
            M = n_coeffs // 2
            L = n_coeffs - 1 - M
        config = _config(
            ctx, "pade-scan", mu, digits, output,
            start=start, center=at, coeffs=n_coeffs, order=[L, M], steps=steps or lab.walk_steps,
        )
        params = _params(config)
        prec = params.prec
        center = parse_complex(at, prec)
        walker = TaylorWalker(_seed_state(config, params, start, None, None), params, terms or lab.taylor_terms)
        if walker.state.x != center:
            walker.follow(PathPlan((center,), steps or lab.walk_steps, terms or lab.taylor_terms, False, lab.exclusion_radius))
        taylor = taylor_expand(walker.state, n_coeffs - 1, params, walker.log_x)
        reports = scan(build_pade_robust(taylor, L, M, prec, center))
        if csv_path:
            ArtifactWriter(config).write_csv(csv_path, PADE_CSV_HEADER, (r.csv_row(prec) for r in reports))
        rows = [dict(zip(PADE_CSV_HEADER, r.csv_row(prec))) for r in reports]
        _emit(config, {"roots": rows})


@app.command()
def locate(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    start: Optional[str] = typer.Option(None, "--from", help="Seed point (asymptotic expansion; default: where level 0 reaches the target digits)."),
    center: str = typer.Option(..., "--center", help="Contour centre or singularity guess."),
    radius: str = typer.Option("1/2", "--radius"),
    nodes: int = typer.Option(200, "--nodes", help="M; the contour has 2M nodes."),
    functional: Functional = typer.Option(Functional.POLE, "--functional"),
    method: str = typer.Option("contour", "--method", help="contour or local-expansion."),
    via: List[str] = typer.Option([], "--via", help="Waypoint before the approach (repeatable)."),
    steps: Optional[int] = typer.Option(None, "--steps", help="Steps per path segment."),
    terms: Optional[int] = typer.Option(None, "--terms"),
    seed_y: Optional[str] = typer.Option(None, "--seed-y"),
    seed_dy: Optional[str] = typer.Option(None, "--seed-dy"),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """Locate a pole, branch point or zero near --center."""
    with numeric_errors():
        lab = _lab(ctx)
        steps = steps or lab.walk_steps
        terms = terms or lab.taylor_terms
        config = _config(
            ctx, "locate", mu, digits, output,
            start=start, center=center, radius=radius, nodes=nodes, functional=functional.value,
            method=method, via=list(via), steps=steps, terms=terms,
        )
        if method not in ("contour", "local-expansion"):
            raise ConfigError(f"--method must be contour or local-expansion, got {method!r}")
        params = _params(config)
        prec = params.prec
        mp = prec.mp
        guess = parse_complex(center, prec)
        r = prec.real(parse_rational(radius, "radius"))
        walker = TaylorWalker(_seed_state(config, params, start, seed_y, seed_dy), params, terms)
        if via:
            walker.follow(PathPlan(tuple(parse_complex(v, prec) for v in via), steps, terms, False, lab.exclusion_radius))
        approach(walker, guess, r, steps)
        if method == "local-expansion":
            root = local_expansion_refine(walker.state.x, walker.state.y, guess, params)
            result = {"location_re": prec.fmt(mp.re(root)), "location_im": prec.fmt(mp.im(root)), "method": method}
        else:
            estimate = contour_locate(guess, r, nodes, walker.state, params, functional, terms, log_x=walker.log_x)
            result = estimate.to_dict(prec)
            if functional is not Functional.ZERO and params.mu not in (0, 1):
                corrected = log_corrected_locate(estimate, params)
                result["log_corrected_re"] = prec.fmt(mp.re(corrected.location))
                result["log_corrected_im"] = prec.fmt(mp.im(corrected.location))
        _emit(config, result)


@app.command()
def predict(
    ctx: typer.Context,
    mu: str = typer.Option(..., "--mu"),
    window: Tuple[str, float] = typer.Option((None, None), "--window", help="CENTER RADIUS of the search window."),
    center: Optional[str] = typer.Option(None, "--center", help="Window centre, when --window is not given."),
    radius: float = typer.Option(1.0, "--radius", help="Window radius, when --window is not given."),
    half: str = typer.Option("upper", "--half-plane", "--half", help="upper or lower half-plane equation."),
    n: int = typer.Option(15, "--n", help="Stokes multiplier from a(2n,0)."),
    terms: Optional[int] = typer.Option(None, "--terms"),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """Singularities predicted by the resummed transseries."""
    with numeric_errors():
        if window[0] is not None:
            center, radius = window
        if center is None:
            raise ConfigError("give the search window as --window CENTER RADIUS (or --center)")
        if half not in ("upper", "lower"):
            raise ConfigError(f"--half-plane must be upper or lower, got {half!r}")
        config = _config(ctx, "predict", mu, digits, output, center=center, radius=radius, half=half, n=n, terms=terms)
        params = _params(config)
        prec = params.prec
        mp = prec.mp
        multipliers = compute_stokes(params, n, terms or n)
        roots = predict_singularities(params, multipliers, half, Window(parse_complex(center, prec), mp.mpf(radius)))
        _emit(config, {"roots": [{"re": prec.fmt(mp.re(v)), "im": prec.fmt(mp.im(v))} for v in roots]})


@app.command("borel-bound")
def borel_bound(
    ctx: typer.Context,
    nu: Optional[str] = typer.Option(None, "--nu", help="ν as a rational or decimal."),
    mu: Optional[str] = typer.Option(None, "--mu", help="μ; converted to ν = 5μ/(2μ+8)."),
    c: str = typer.Option("optimal", "--c", help="'optimal' or a number such as 0.7."),
    curve: Tuple[float, float, int] = typer.Option((None, None, None), "--curve", help="nu_min nu_max points."),
    verify: Optional[int] = typer.Option(None, "--verify", help="Check the integral equation with N Borel coefficients."),
    t_max: float = typer.Option(1.0, "--t-max"),
    digits: Optional[int] = typer.Option(None, "--digits"),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
    csv_path: Optional[str] = typer.Option(None, "--csv", help="(nu, c, sigma) curve."),
    tilde_csv: Optional[str] = typer.Option(None, "--tilde-csv", help="(mu, sigma_tilde) curve."),
):
    """Summability bound σ(ν) and σ̃(μ) from the contraction inequalities."""
    with numeric_errors():
        config = _config(
            ctx, "borel-bound", mu, digits, output,
            nu=nu, c=c, curve=list(curve) if curve[0] is not None else None, verify=verify, t_max=t_max,
        )
        prec = config.prec
        writer = ArtifactWriter(config)
        result = {}
        if curve[0] is not None:
            bounds = sigma_curve(curve[0], curve[1], curve[2], c, prec)
            tilde = sigma_tilde_curve(bounds)
            if csv_path:
                writer.write_csv(csv_path, SIGMA_CSV_HEADER, (b.sigma_row(prec) for b in bounds))
            if tilde_csv:
                writer.write_csv(tilde_csv, SIGMA_TILDE_CSV_HEADER, (b.sigma_tilde_row(prec) for b in tilde))
            result["curve"] = [b.to_dict(prec) for b in bounds]
        else:
            if (nu is None) == (mu is None):
                raise ConfigError("give exactly one of --nu or --mu (or --curve)")
            mu_exact = config.mu_exact
            nu_value = parse_rational(nu, "nu") if nu is not None else 5 * mu_exact / (2 * mu_exact + 8)
            bound = sigma_bound(nu_value, c, prec)
            result["bound"] = bound.to_dict(prec)
            table = Table(title=f"σ(ν) at ν = {nu_value}")
            for key in ("c", "sigma", "sigma_tilde", "lhs1", "lhs2"):
                table.add_column(key)
            d = bound.to_dict(prec)
            table.add_row(*(str(d[k])[:14] if d[k] is not None else "-" for k in ("c", "sigma", "sigma_tilde", "lhs1", "lhs2")))
            err_console.print(table)
        if verify is not None:
            if mu is None:
                raise ConfigError("--verify needs --mu")
            check = verify_integral_equation(ProblemParams(config.mu_exact, -1, prec), t_max, verify)
            result["integral_equation"] = {
                "N": check.N,
                "determined": prec.mp.nstr(check.determined, 5),
                "tail": prec.mp.nstr(check.tail, 5),
                "total": prec.mp.nstr(check.total, 5),
            }
        _emit(config, result)


@app.command()
def reproduce(
    ctx: typer.Context,
    case: Optional[str] = typer.Argument(None, help="Case name; omit with --list."),
    list_cases: bool = typer.Option(False, "--list", help="List the available cases."),
    digits: Optional[int] = typer.Option(None, "--digits", help="Override the case's default precision."),
    output: Optional[str] = typer.Option(None, "--output", "-o"),
):
    """Run a named end-to-end computation and diff it against stored reference values."""
    if list_cases or case is None:
        table = Table(title="Reproduction cases")
        table.add_column("case", style="cyan")
        table.add_column("digits", justify="right")
        table.add_column("what")
        for c in CASES.values():
            table.add_row(c.name, str(c.default_digits), c.description)
        console.print(table)
        return
    with numeric_errors():
        if case not in CASES:
            raise ConfigError(f"unknown case {case!r}; choose from {', '.join(CASES)}")
        resolved = digits or CASES[case].default_digits
        config = RunConfig(command="reproduce", mu=None, digits=resolved, guard_digits=_lab(ctx).guard_digits,
                           options={"case": case}, output_path=output)
        err_console.print(Panel.fit(f"[bold blue]painlab[/bold blue] reproducing [cyan]{case}[/cyan] at {resolved} digits"))
        report = run_case(case, resolved, guard_digits=_lab(ctx).guard_digits)
        table = Table(title=f"{case} (μ = {report.mu})")
        table.add_column("quantity", style="cyan")
        table.add_column("computed")
        table.add_column("reference")
        table.add_column("digits", justify="right")
        for row in report.comparisons:
            table.add_row(row.quantity, report.prec.fmt(row.computed), row.reference, str(row.digits))
        err_console.print(table)
        _emit(config, report.to_dict())


if __name__ == "__main__":
    app()
