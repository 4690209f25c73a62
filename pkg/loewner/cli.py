"""Main CLI application for Loewner."""

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Tuple

import typer
from rich.console import Console

from . import __version__

app = typer.Typer(
    name="loewner",
    help="Multivariate matrix functional calculus and operator inequality checkers",
    add_completion=False,
)
check_app = typer.Typer(help="Search for violations of one operator inequality.")
app.add_typer(check_app, name="check")
console = Console()

EXIT_PASS, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2

FN = typer.Option(..., "--fn", help="Expression in r1..rk or a catalog name")
K = typer.Option(1, "--k", help="Number of variables")
L = typer.Option(2, "--l", help="Index l (length of decompositions and rows)")
J = typer.Option(0, "--j", help="Index j, 0 <= j < l")
DIMS = typer.Option("1", "--dims", help="Comma-separated operand dimensions")
TRIALS = typer.Option(200, "--trials", help="Number of random trials")
SEED = typer.Option(1, "--seed", help="Seed; fixes every sampled instance")
TOL = typer.Option(None, "--tol", help="Absolute violation floor")
OUT = typer.Option(None, "--out", help="Write the witness (or result) to this file")
FORMAT = typer.Option("text", "--format", help="Output format: text or json")
DOMAIN = typer.Option(None, "--domain", help="Interval such as '(0,inf)', or one per variable separated by ';'")
WORKERS = typer.Option(None, "--workers", help="Threads running trials")
VERBOSE = typer.Option(False, "--verbose", "-v", help="Show timing and dead-zone margins")


def version_callback(value: bool):
    """Show version and exit."""
    if value:
        console.print(f"Loewner v{__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None, "--version", callback=version_callback, is_eager=True, help="Show version and exit"
    ),
):
    """Loewner: functional calculus and certified checks of matrix inequalities."""
    pass


@contextmanager
def _exit_on_error(logger) -> Iterator[None]:
    """Convert library errors into exit code 2."""
    from .core.errors import LoewnerError

    try:
        yield
    except LoewnerError as e:
        logger.error(str(e))
        raise typer.Exit(EXIT_ERROR)


def _parse_floats(text: str, what: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        from .core.errors import ConfigurationError

        raise ConfigurationError(f"{what} must be comma-separated numbers, got '{text}'")


def _parse_dims(text: str, k: int) -> Tuple[int, ...]:
    from .core.errors import ConfigurationError

    values = _parse_floats(text, "--dims")
    dims = tuple(int(v) for v in values)
    if len(dims) == 1 and k > 1:
        dims = dims * k
    if len(dims) != k or any(n < 1 or n != v for n, v in zip(dims, values)):
        raise ConfigurationError(f"--dims must list {k} positive integers, got '{text}'")
    return dims


def _setup(
    tol: Optional[float], workers: Optional[int], output_format: str, verbose: bool
):
    """Centralized dependency creation."""
    from .core.config import LoewnerConfig
    from .core.errors import ConfigurationError
    from .core.logger import Logger

    logger = Logger(verbose, quiet=output_format == "json")
    with _exit_on_error(logger):
        if output_format not in ("text", "json"):
            raise ConfigurationError(f"--format must be text or json, got '{output_format}'")
        config = LoewnerConfig.default().with_overrides(tol=tol, workers=workers).validate()
    return logger, config


def _function(fn: str, k: int, domain: Optional[str], default):
    from .core.catalog import is_builtin, resolve_function
    from .core.exprlang import parse_domain

    if is_builtin(fn):
        return resolve_function(fn, k, parse_domain(domain, k) if domain else None)
    return resolve_function(fn, k, parse_domain(domain, k, default))


def _finish(report, logger, output_format: str, out: Optional[Path]):
    """Print the report, write the witness of a violation and exit with its code."""
    from .core.reporter import ReportPrinter
    from .core.serialization import WitnessStore

    ReportPrinter(logger, output_format).report(report)
    if report.passed:
        raise typer.Exit(EXIT_PASS)
    if out is not None and report.instance is not None:
        with _exit_on_error(logger):
            WitnessStore(logger).save_witness(out, report.instance)
    raise typer.Exit(EXIT_VIOLATION)


@check_app.command("monotone")
def check_monotone(
    fn: str = FN,
    k: int = K,
    l: int = L,
    j: int = J,
    dims: str = DIMS,
    trials: int = TRIALS,
    seed: int = SEED,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Search for a violation of the index (l, j) monotonicity inequality."""
    from .core.exprlang import POSITIVE
    from .core.models import MonotonicityIndex
    from .core.search import SearchRunner

    logger, config = _setup(tol, workers, output_format, verbose)
    with _exit_on_error(logger):
        orders = _parse_dims(dims, k)
        idx = MonotonicityIndex(l, j)
        config.guard_dimension(orders + (l ** (k - 1),))
        g = _function(fn, k, domain, POSITIVE)
        report = SearchRunner(config, logger).monotone_search(g, idx, orders, trials, seed)
    _finish(report, logger, output_format, out)


@check_app.command("convex")
def check_convex(
    fn: str = FN,
    k: int = K,
    dims: str = DIMS,
    trials: int = TRIALS,
    seed: int = SEED,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Search for a violation of matrix convexity of the given orders."""
    from .core.exprlang import NONNEGATIVE
    from .core.search import SearchRunner

    logger, config = _setup(tol, workers, output_format, verbose)
    with _exit_on_error(logger):
        orders = _parse_dims(dims, k)
        config.guard_dimension(orders)
        f = _function(fn, k, domain, NONNEGATIVE)
        report = SearchRunner(config, logger).convex_search(f, orders, trials, seed)
    _finish(report, logger, output_format, out)


def _jensen(
    projection: bool,
    fn,
    k,
    l,
    j,
    dims,
    trials,
    seed,
    tol,
    out,
    output_format,
    domain,
    workers,
    verbose,
):
    from .core.exprlang import NONNEGATIVE
    from .core.models import MonotonicityIndex
    from .core.search import SearchRunner

    logger, config = _setup(tol, workers, output_format, verbose)
    with _exit_on_error(logger):
        orders = _parse_dims(dims, k)
        idx = MonotonicityIndex(l, j)
        config.guard_dimension(orders + (l ** (k - 1),))
        f = _function(fn, k, domain, NONNEGATIVE)
        runner = SearchRunner(config, logger)
        search = runner.jensen_projection_search if projection else runner.jensen_unitary_search
        report = search(f, idx, orders, trials, seed)
    _finish(report, logger, output_format, out)


@check_app.command("jensen-unitary")
def check_jensen_unitary(
    fn: str = FN,
    k: int = K,
    l: int = L,
    j: int = J,
    dims: str = DIMS,
    trials: int = TRIALS,
    seed: int = SEED,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Search for a violation of the Jensen inequality over unitary rows."""
    _jensen(
        False, fn, k, l, j, dims, trials, seed, tol, out, output_format, domain, workers, verbose
    )


@check_app.command("jensen-projection")
def check_jensen_projection(
    fn: str = FN,
    k: int = K,
    l: int = L,
    j: int = J,
    dims: str = DIMS,
    trials: int = TRIALS,
    seed: int = SEED,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Search for a violation of the Jensen inequality over partitions of unity."""
    _jensen(
        True, fn, k, l, j, dims, trials, seed, tol, out, output_format, domain, workers, verbose
    )


@check_app.command("tensor-monotone")
def check_tensor_monotone(
    fn: str = FN,
    k: int = K,
    dims: str = DIMS,
    trials: int = TRIALS,
    seed: int = SEED,
    tol: Optional[float] = TOL,
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Search for f(x) > f(y) with 0 <= x_i <= y_i."""
    from .core.exprlang import NONNEGATIVE
    from .core.search import SearchRunner

    logger, config = _setup(tol, workers, output_format, verbose)
    with _exit_on_error(logger):
        orders = _parse_dims(dims, k)
        config.guard_dimension(orders)
        f = _function(fn, k, domain, NONNEGATIVE)
        report = SearchRunner(config, logger).tensor_monotone_search(f, orders, trials, seed)
    _finish(report, logger, output_format, out)


@check_app.command("growth")
def check_growth(
    fn: str = FN,
    k: int = K,
    box: str = typer.Option("1", "--box", help="Comma-separated upper bounds of the box"),
    c: float = typer.Option(1.0, "--C", help="Constant C >= 0 in g >= -C/(r1...rk)"),
    grid: int = typer.Option(25, "--grid", help="Grid points per axis"),
    tol: Optional[float] = TOL,
    output_format: str = FORMAT,
    domain: Optional[str] = DOMAIN,
    verbose: bool = VERBOSE,
):
    """Check the growth bound near the coordinate axes on a logarithmic grid."""
    from .core.checkers import growth_bound_check
    from .core.exprlang import POSITIVE

    logger, config = _setup(tol, None, output_format, verbose)
    with _exit_on_error(logger):
        bounds = _parse_floats(box, "--box")
        if len(bounds) == 1 and k > 1:
            bounds = bounds * k
        g = _function(fn, k, domain, POSITIVE)
        report = growth_bound_check(g, bounds, c, grid, config.tolerances)
    _finish(report, logger, output_format, None)


@app.command()
def funcalc(
    input_path: Path = typer.Option(..., "--input", help="JSON file with a 'matrices' list"),
    fn: Optional[str] = typer.Option(None, "--fn", help="Overrides the file's 'function'"),
    domain: Optional[str] = DOMAIN,
    commuting: bool = typer.Option(False, "--commuting", help="Commuting calculus on one space"),
    out: Optional[Path] = OUT,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Apply f to a tuple of Hermitian matrices."""
    from .core.errors import ConfigurationError
    from .core.exprlang import REAL_LINE
    from .core.funcalc import OperandTuple, apply_commuting, apply_multivariate, compression_check
    from .core.reporter import ReportPrinter, stdout
    from .core.serialization import compression_to_dict, dumps, matrix_to_json, WitnessStore

    logger, config = _setup(None, None, output_format, verbose)
    store = WitnessStore(logger)
    with _exit_on_error(logger):
        data = store.load_matrices(input_path)
        matrices = data["matrices"]
        source = fn or data.get("function")
        if not source:
            raise ConfigurationError("no function given (use --fn or a 'function' field)")
        f = _function(source, len(matrices), domain or data.get("domain"), REAL_LINE)
        metadata = {"function": f.source, "commuting": commuting}
        compression = None
        # both branches build the tensor-space result
        config.guard_dimension([len(m) for m in matrices])
        with logger.timing("functional calculus"):
            if commuting:
                result = apply_commuting(f, matrices, commute_rel=config.tolerances.commute_rel)
                compression = compression_check(f, matrices, commute_rel=config.tolerances.commute_rel)
                metadata["compression"] = compression_to_dict(compression)
            else:
                x = OperandTuple.of(matrices, config.tolerances.eigensolver)
                result = apply_multivariate(f, x, config.tolerances.cluster_rel)
        if out is not None:
            store.save_matrix(out, result, **metadata)
            logger.info(f"[green]✓[/green] Result written to {out}")
        elif output_format == "json":
            stdout.out(dumps({**metadata, "matrix": matrix_to_json(result)}), highlight=False)
        else:
            stdout.print(result)

    if compression is not None:
        if output_format == "text":
            ReportPrinter(logger, output_format).compression(compression)
        if not compression.passed:
            raise typer.Exit(EXIT_VIOLATION)


@app.command("verify-paper")
def verify_paper(
    seed: int = SEED,
    trials: int = typer.Option(200, "--trials", help="Trials per search"),
    tol: Optional[float] = TOL,
    output_format: str = FORMAT,
    workers: Optional[int] = WORKERS,
    verbose: bool = VERBOSE,
):
    """Run the full reproduction battery; exit 1 if any item fails."""
    from .core.battery import PaperBattery
    from .core.reporter import ReportPrinter

    logger, config = _setup(tol, workers, output_format, verbose)
    with _exit_on_error(logger):
        summary = PaperBattery(config, logger, trials=trials).run(seed)
    ReportPrinter(logger, output_format).battery(summary)
    if not summary.passed:
        raise typer.Exit(EXIT_VIOLATION)


@app.command()
def replay(
    witness_path: Path = typer.Argument(..., help="Witness or report JSON file"),
    tol: Optional[float] = TOL,
    output_format: str = FORMAT,
    verbose: bool = VERBOSE,
):
    """Re-run the instance check recorded in a witness file."""
    from dataclasses import replace

    from .core.checkers import replay as replay_witness
    from .core.serialization import WitnessStore

    logger, config = _setup(tol, None, output_format, verbose)
    with _exit_on_error(logger):
        witness = WitnessStore(logger).load_witness(witness_path)
        report = replay_witness(witness, config.tolerances)
    drift = abs(report.margin - witness.margin)
    if drift > 1e-9:
        logger.warning(f"replayed margin differs from the recorded one by {drift:.3e}")
    report = replace(report, seed=witness.seed, notes=(f"recorded margin {witness.margin!r}",))
    _finish(report, logger, output_format, None)
