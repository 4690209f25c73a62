"""Report output for Loewner."""

from typing import Any, Dict

from rich.console import Console
from rich.table import Table

from .battery import BatterySummary
from .constants import TEXT_SIGNIFICANT_DIGITS
from .logger import Logger
from .models import CheckReport, CompressionReport
from .serialization import compression_to_dict, dumps, report_to_dict

# results go to stdout, diagnostics to the logger's stderr console
stdout = Console(highlight=False, soft_wrap=True)


def fmt(value: float) -> str:
    return f"{value:.{TEXT_SIGNIFICANT_DIGITS}g}"


class ReportPrinter:
    """Prints check, search and battery results as text or JSON."""

    def __init__(self, logger: Logger, output_format: str = "text"):
        """Initialize with a logger instance and an output format."""
        self.logger = logger
        self.output_format = output_format

    def _json(self, data: Dict[str, Any]):
        stdout.out(dumps(data), highlight=False)

    def report(self, report: CheckReport):
        if self.output_format == "json":
            self._json(report_to_dict(report))
            return

        colour = "green" if report.passed else "red"
        stdout.print(f"[{colour}]{report.verdict.value}[/{colour}] {report.kind}")
        stdout.print(f"  margin     {fmt(report.margin)}")
        stdout.print(f"  tolerance  {fmt(report.tolerance_used)}")
        if report.trials_run > 1 or report.seed is not None:
            stdout.print(f"  trials     {report.trials_run} (seed {report.seed})")
        if report.location is not None:
            stdout.print(f"  location   ({', '.join(fmt(v) for v in report.location)})")
        witness = report.instance
        if witness is not None:
            stdout.print(f"  function   {witness.function}")
            if witness.index is not None:
                stdout.print(f"  index      {witness.index}")
            if witness.lam is not None:
                stdout.print(f"  lambda     {fmt(witness.lam)}")
            stdout.print(f"  orders     {witness.orders}")
            if witness.trial is not None:
                stdout.print(f"  trial      {witness.trial}")
        for note in report.notes:
            stdout.print(f"  [dim]{note}[/dim]")
        if report.in_dead_zone:
            self.logger.debug(f"negative margin {fmt(report.margin)} within tolerance")

    def compression(self, report: CompressionReport):
        if self.output_format == "json":
            self._json(compression_to_dict(report))
            return
        colour = "green" if report.passed else "red"
        stdout.print(
            f"[{colour}]compression deviation {fmt(report.max_deviation)}[/{colour}] "
            f"(tolerance {fmt(report.tolerance)}, dimension {report.dimension})"
        )

    def battery(self, summary: BatterySummary):
        if self.output_format == "json":
            self._json(
                {
                    "seed": summary.seed,
                    "passed": summary.passed,
                    "items": [
                        {"name": item.name, "passed": item.passed, "detail": item.detail}
                        for item in summary.items
                    ],
                }
            )
            return

        table = Table(title=f"Verification battery (seed {summary.seed})")
        table.add_column("Item")
        table.add_column("Result")
        table.add_column("Detail")
        for item in summary.items:
            result = "[green]pass[/green]" if item.passed else "[red]FAIL[/red]"
            table.add_row(item.name, result, item.detail)
        stdout.print(table)
        self.logger.debug(f"Battery finished in {summary.elapsed:.2f}s")
