"""Randomized searches for violations of the checked inequalities."""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import replace
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .checkers import (
    check_convex_instance,
    check_monotone_instance,
    check_tensor_monotone,
    jensen_projection_check,
    jensen_unitary_check,
)
from .config import LoewnerConfig
from .decomp import sample_decomposition, sample_partition_of_unity, sample_unitary_row
from .errors import ConfigurationError, DimensionMismatchError
from .exprlang import ScalarFunction
from .logger import Logger
from .models import CheckReport, MonotonicityIndex, Verdict
from .sampling import sample_dominating, sample_operand, sample_spectrum, trial_rng

Trial = Callable[[np.random.Generator], CheckReport]


class SearchRunner:
    """Runs seeded trials of one instance check and merges them deterministically."""

    def __init__(self, config: LoewnerConfig, logger: Logger):
        """Initialize with configuration and a logger instance."""
        self.config = config
        self.logger = logger
        self.tolerances = config.tolerances

    @contextmanager
    def _mapper(self) -> Iterator[Callable]:
        workers = self.config.search.workers
        if workers == 1:
            yield map
            return
        with ThreadPoolExecutor(max_workers=workers) as executor:
            yield executor.map

    def _run(self, kind: str, trials: int, seed: int, trial: Trial) -> CheckReport:
        """
        Run trials 0..trials-1, trial t on the stream (seed, t).

        The first violation by trial index wins; otherwise the pass carries the
        smallest margin, ties going to the lowest trial index.
        """
        if trials < 1:
            raise ConfigurationError(f"trials must be positive, got {trials}")
        chunk = 1 if self.config.search.workers == 1 else 4 * self.config.search.workers
        best: Optional[Tuple[int, CheckReport]] = None

        with self.logger.timing(f"{kind} search over {trials} trials"), self._mapper() as run:
            for start in range(0, trials, chunk):
                batch = range(start, min(trials, start + chunk))
                for t, report in zip(batch, run(lambda t: trial(trial_rng(seed, t)), batch)):
                    if report.in_dead_zone:
                        self.logger.debug(
                            f"{kind} trial {t}: margin {report.margin:.3e} within tolerance "
                            f"{report.tolerance_used:.1e}"
                        )
                    if not report.passed:
                        self.logger.debug(f"{kind} violation at trial {t}, margin {report.margin:.6g}")
                        return self._stamp(report, seed, t, t + 1)
                    if best is None or report.margin < best[1].margin:
                        best = (t, report)

        t, report = best
        return replace(
            self._stamp(report, seed, t, trials),
            notes=(f"no violation found in {trials} trials",),
        )

    @staticmethod
    def _stamp(report: CheckReport, seed: int, t: int, trials_run: int) -> CheckReport:
        instance = replace(report.instance, seed=seed, trial=t) if report.instance else None
        return replace(report, instance=instance, seed=seed, trials_run=trials_run)

    def _operands(self, f: ScalarFunction, orders: Sequence[int], rng: np.random.Generator) -> List[np.ndarray]:
        if len(orders) != f.arity:
            raise DimensionMismatchError(f"{len(orders)} orders given for {f.arity} variables")
        return [sample_operand(n, interval, rng) for n, interval in zip(orders, f.domain)]

    def monotone_search(
        self, g: ScalarFunction, idx: MonotonicityIndex, orders: Sequence[int], trials: int, seed: int
    ) -> CheckReport:
        """Random operands with random decompositions of length l."""
        def trial(rng: np.random.Generator) -> CheckReport:
            x = self._operands(g, orders, rng)
            decompositions = [
                sample_decomposition(m, idx.l, rng, pd_floor_rel=self.tolerances.pd_floor_rel)
                for m in x
            ]
            return check_monotone_instance(g, x, decompositions, idx, self.tolerances)

        return self._run("monotone", trials, seed, trial)

    def convex_search(
        self, f: ScalarFunction, orders: Sequence[int], trials: int, seed: int
    ) -> CheckReport:
        def trial(rng: np.random.Generator) -> CheckReport:
            x = self._operands(f, orders, rng)
            y = self._operands(f, orders, rng)
            return check_convex_instance(f, x, y, float(rng.uniform()), self.tolerances)

        return self._run("convex", trials, seed, trial)

    def jensen_unitary_search(
        self, f: ScalarFunction, idx: MonotonicityIndex, orders: Sequence[int], trials: int, seed: int
    ) -> CheckReport:
        """Rows are first block rows of Haar unitaries, not only rows of decompositions."""
        def trial(rng: np.random.Generator) -> CheckReport:
            x = self._operands(f, orders, rng)
            rows = [sample_unitary_row(n, idx.l, rng, self.tolerances.pd_floor_rel) for n in orders]
            return jensen_unitary_check(f, x, rows, idx, self.tolerances)

        return self._run("jensen-unitary", trials, seed, trial)

    def jensen_projection_search(
        self, f: ScalarFunction, idx: MonotonicityIndex, orders: Sequence[int], trials: int, seed: int
    ) -> CheckReport:
        def trial(rng: np.random.Generator) -> CheckReport:
            x = self._operands(f, orders, rng)
            partitions = [sample_partition_of_unity(n, idx.l, rng) for n in orders]
            return jensen_projection_check(f, x, partitions, idx, self.tolerances)

        return self._run("jensen-projection", trials, seed, trial)

    def tensor_monotone_search(
        self, f: ScalarFunction, orders: Sequence[int], trials: int, seed: int
    ) -> CheckReport:
        def trial(rng: np.random.Generator) -> CheckReport:
            x = self._operands(f, orders, rng)
            y = [sample_dominating(m, interval, rng) for m, interval in zip(x, f.domain)]
            return check_tensor_monotone(f, x, y, self.tolerances)

        return self._run("tensor-monotone", trials, seed, trial)

    def separate_monotonicity_check(
        self, g: ScalarFunction, idx: MonotonicityIndex, orders: Sequence[int], trials: int, seed: int
    ) -> List[CheckReport]:
        """
        One-variable monotone searches on the slices of g.

        Slice i fixes every other variable at an interior point sampled from
        its domain on a stream kept apart from the trial streams.
        """
        reports = []
        for i in range(1, g.arity + 1):
            rng = np.random.default_rng([seed or 0, 2**31 + i])
            point = [float(sample_spectrum(1, interval, rng)[0]) for interval in g.domain]
            section = g.freeze(i, point)
            self.logger.debug(f"slice r{i} of {g.source}: {section.source}")
            reports.append(self.monotone_search(section, idx, (orders[i - 1],), trials, seed))
        return reports


def verdicts_agree(reports: Sequence[CheckReport]) -> bool:
    return len({report.verdict for report in reports}) <= 1


def all_passed(reports: Sequence[CheckReport]) -> bool:
    return all(report.verdict is Verdict.PASS for report in reports)
