"""Desk-scale reproduction battery for the functional calculus and its inequalities."""

from dataclasses import dataclass, field
from itertools import product
from time import perf_counter
from typing import Callable, List, Sequence, Tuple

import numpy as np

from .catalog import builtin, resolve_function
from .checkers import (
    axis_sign_check,
    check_monotone_instance,
    growth_bound_check,
    ordinary_convexity_check,
)
from .config import LoewnerConfig
from .decomp import Decomposition, projection_identities
from .exprlang import NONNEGATIVE, POSITIVE, parse
from .funcalc import OperandTuple, apply_multivariate
from .linalg import kron_all, matrix_function, scale_of
from .logger import Logger
from .models import MonotonicityIndex
from .multiindex import enumerate_multi_indices
from .sampling import sample_operand
from .search import SearchRunner, all_passed, verdicts_agree
from .timing import PipelineTimer

BatteryCheck = Callable[[], Tuple[bool, str]]

ONE_VARIABLE_INDICES = ((2, 0), (2, 1), (3, 0), (3, 2))
ALL_SMALL_INDICES = ((2, 0), (2, 1), (3, 0), (3, 1), (3, 2))

# (convex f, its g = f / (r1 ... rk), k)
IMPLICATION_PAIRS = (
    ("square1", "r1", 1),
    ("neg_sqrt1", "neg_inv_sqrt1", 1),
    ("constant(-1)", "neg_inv_product", 2),
    ("koranyi_f", "koranyi_g", 2),
)

KNOWN_SETS = {
    (2, 2, 0): ((1, 1), (2, 2)),
    (2, 2, 1): ((1, 2), (2, 1)),
    (2, 3, 0): ((1, 2), (2, 1), (3, 3)),
    (3, 2, 0): ((1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 2)),
}


@dataclass(frozen=True)
class BatteryItem:
    """Outcome of one battery item."""
    name: str
    passed: bool
    detail: str
    elapsed: float


@dataclass
class BatterySummary:
    seed: int
    items: List[BatteryItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    @property
    def elapsed(self) -> float:
        return sum(item.elapsed for item in self.items)


def halves(x: float) -> Decomposition:
    """Scalar decomposition of x into two equal parts."""
    half = np.array([[x / 2]], dtype=complex)
    return Decomposition(x=np.array([[x]], dtype=complex), parts=(half, half))


class PaperBattery:
    """Runs every reproduction item and reports each verdict."""

    def __init__(
        self,
        config: LoewnerConfig,
        logger: Logger,
        trials: int = 200,
        independence_trials: int = 2000,
    ):
        """Initialize battery; rejects tolerances that would mask violations."""
        self.config = config.validate()
        self.logger = logger
        self.trials = trials
        self.independence_trials = independence_trials
        self.seed = 1
        self.runner = SearchRunner(config, logger)
        self.timer = PipelineTimer(logger)

    def items(self) -> List[Tuple[str, BatteryCheck]]:
        return [
            ("separable product identity", self.separable_product),
            ("multi-index classes", self.multi_index_classes),
            ("root-of-unity projections", self.projections),
            ("one-variable consistency", self.one_variable),
            ("-1/(r1*r2) monotone, 1 not monotone", self.inverse_product),
            ("Koranyi counterexamples", self.koranyi),
            ("Jensen consistency", self.jensen),
            ("convexity and index monotonicity implications", self.implication),
            ("growth bound", self.growth),
            ("separate monotonicity", self.separate),
            ("index independence", self.index_independence),
        ]

    def run(self, seed: int) -> BatterySummary:
        """Run every item; an item that raises counts as failed."""
        self.seed = seed
        summary = BatterySummary(seed=seed)
        with self.timer.pipeline("Verification battery"):
            for name, check in self.items():
                start = perf_counter()
                try:
                    with self.logger.timing(name):
                        passed, detail = check()
                except Exception as e:
                    self.logger.error(f"{name}: {e}")
                    passed, detail = False, f"error: {e}"
                item = BatteryItem(name, passed, detail, perf_counter() - start)
                mark = "[green]✓[/green]" if passed else "[red]✗[/red]"
                self.logger.info(f"{mark} {name}: {detail}")
                summary.items.append(item)
        return summary

    # Items

    def separable_product(self) -> Tuple[bool, str]:
        factors = (("sqrt(r{i})", np.sqrt), ("log(1+r{i})", np.log1p), ("r{i}^2", np.square))
        worst = 0.0
        for s in range(50):
            rng = np.random.default_rng([self.seed, 1000 + s])
            k = 2 + s % 2
            dims = rng.integers(1, 5, size=k)
            chosen = [factors[(s + i) % len(factors)] for i in range(k)]
            f = parse("*".join(text.format(i=i + 1) for i, (text, _) in enumerate(chosen)), k)
            x = [sample_operand(int(n), POSITIVE, rng) for n in dims]
            result = apply_multivariate(f, OperandTuple.of(x))
            oracle = kron_all([matrix_function(m, fn) for m, (_, fn) in zip(x, chosen)])
            worst = max(worst, np.linalg.norm(result - oracle) / scale_of(oracle))
        return worst <= 1e-9, f"max relative residual {worst:.2e} over 50 tuples"

    def multi_index_classes(self) -> Tuple[bool, str]:
        for (k, l, j), expected in KNOWN_SETS.items():
            if enumerate_multi_indices(k, l, j).indices != expected:
                return False, f"class (k={k}, l={l}, j={j}) differs from {expected}"
        checked = 0
        for l in range(2, 7):
            for k in range(1, 5):
                for j in range(l):
                    brute = [t for t in product(range(1, l + 1), repeat=k) if sum(t) % l == j]
                    found = enumerate_multi_indices(k, l, j)
                    if list(found.indices) != brute or len(found) != l ** (k - 1):
                        return False, f"class (k={k}, l={l}, j={j}) has {len(found)} members"
                    checked += 1
        return True, f"listed classes match; {checked} class sizes equal l^(k-1)"

    def projections(self) -> Tuple[bool, str]:
        rng = np.random.default_rng([self.seed, 2000])
        cases = [(l, k) for l in (2, 3) for k in (2, 3)] + [(4, 1), (5, 1)]
        worst = max(projection_identities(l, k, rng=rng).worst for l, k in cases)
        return worst <= 1e-10, f"worst identity residual {worst:.2e}"

    def _search_monotone(self, g, index, orders, trials=None):
        report = self.runner.monotone_search(
            g, MonotonicityIndex(*index), orders, trials or self.trials, self.seed
        )
        self.timer.log_processing_stats(f"monotone {g.source} {index}", report.trials_run, report.margin)
        return report

    def one_variable(self) -> Tuple[bool, str]:
        sqrt = builtin("sqrt1")
        passes = [self._search_monotone(sqrt, index, (3,)) for index in ONE_VARIABLE_INDICES]
        if not all_passed(passes):
            return False, "sqrt(t) violated an index inequality"
        square = self._search_monotone(builtin("square1"), (2, 0), (2,))
        if square.passed or square.margin > -1e-6:
            return False, f"no violation for t^2 (margin {square.margin:.3g})"
        return True, f"sqrt passes 4 indices; t^2 witness margin {square.margin:.3g}"

    def inverse_product(self) -> Tuple[bool, str]:
        g = builtin("neg_inv_product", 2)
        for index in ALL_SMALL_INDICES:
            for orders in ((2, 2), (3, 3)):
                report = self._search_monotone(g, index, orders)
                if not report.passed:
                    return False, f"-1/(r1*r2) violated at {index}, orders {orders}"
        one = parse("1", 2)
        found = self._search_monotone(one, (2, 0), (1, 1), trials=50)
        if found.passed:
            return False, "g = 1 passed 50 trials"
        exact = check_monotone_instance(
            one, [np.eye(1), np.eye(1)], [halves(1.0), halves(1.0)], MonotonicityIndex(2, 0)
        )
        if abs(exact.margin + 1.0) > 1e-9:
            return False, f"scalar instance margin {exact.margin!r}, expected -1"
        return True, f"-1/(r1*r2) passes 10 searches; g = 1 margin {exact.margin:.6g}"

    def koranyi(self) -> Tuple[bool, str]:
        f = builtin("koranyi_f")
        report = self.runner.convex_search(f, (2, 2), 500, self.seed)
        if report.passed or report.margin > -1e-6:
            return False, f"no convexity violation for the Koranyi f (margin {report.margin:.3g})"
        # the scalar instance sits at r = 1, outside the open unit box, where the formula still holds
        g = builtin("koranyi_g").with_domain((POSITIVE, POSITIVE))
        exact = check_monotone_instance(
            g, [np.eye(1), np.eye(1)], [halves(1.0), halves(1.0)], MonotonicityIndex(2, 0)
        )
        if abs(exact.margin + 1.0 / 9.0) > 1e-9:
            return False, f"Koranyi g scalar margin {exact.margin!r}, expected -1/9"
        return True, (
            f"convexity witness margin {report.margin:.3g} at trial {report.instance.trial}; "
            f"g margin {exact.margin:.6g}"
        )

    def jensen(self) -> Tuple[bool, str]:
        cases = (
            (builtin("constant(-1)", 2).with_domain((NONNEGATIVE, NONNEGATIVE)), (3, 3)),
            (builtin("square1"), (3,)),
        )
        runs = 0
        for f, orders in cases:
            for l in (2, 3):
                index = MonotonicityIndex(l, 0)
                for search in (self.runner.jensen_unitary_search, self.runner.jensen_projection_search):
                    report = search(f, index, orders, self.trials, self.seed)
                    runs += 1
                    if not report.passed:
                        return False, f"{report.kind} violated for {f.source} at l={l}"
        product_f = builtin("product", 2)
        report = self.runner.jensen_unitary_search(
            product_f, MonotonicityIndex(2, 0), (2, 2), self.trials, self.seed
        )
        if report.passed:
            return False, "no Jensen violation for r1*r2"
        return True, f"{runs} searches pass; r1*r2 violates with margin {report.margin:.3g}"

    def implication(self) -> Tuple[bool, str]:
        """
        Both directions at n = 1, l = 2: convexity of f at order l*n against index
        monotonicity of g at order n, and index monotonicity of g at order l*n
        against convexity of f at order n with f <= 0 on the axes.
        """
        n, l = 1, 2
        budget = self.trials // 2
        rng = np.random.default_rng([self.seed, 3000])
        findings = []
        for f_name, g_name, k in IMPLICATION_PAIRS:
            f = builtin(f_name, k)
            g = resolve_function(g_name, k)
            wide, narrow = (l * n,) * k, (n,) * k

            convex = self.runner.convex_search(f, wide, budget, self.seed)
            monotone = [self._search_monotone(g, (l, j), narrow, budget) for j in range(l)]
            if convex.passed and not all_passed(monotone):
                return False, f"{f_name} passes convexity but {g_name} violates monotonicity"

            interior = rng.uniform(0.05, 0.95, size=(l, k))
            midpoint = ordinary_convexity_check(f, interior, self.config.tolerances)
            if not midpoint.passed and convex.passed:
                return False, f"{f_name} fails the scalar midpoint check yet passed convexity"

            monotone_wide = [self._search_monotone(g, (l, j), wide, budget) for j in range(l)]
            if all_passed(monotone_wide):
                convex_narrow = self.runner.convex_search(f, narrow, budget, self.seed)
                if not convex_narrow.passed:
                    return False, (
                        f"{g_name} passes monotonicity at order {l * n} "
                        f"but {f_name} violates convexity at order {n}"
                    )
                axes = axis_sign_check(f, interior, self.config.tolerances)
                if not axes.passed:
                    return False, f"{g_name} passes monotonicity but {f_name} > 0 at {axes.location}"
            findings.append(
                f"{f_name}:{'convex' if convex.passed else 'not convex'}/"
                f"{g_name}:{'monotone' if all_passed(monotone_wide) else 'not monotone'}"
            )
        return True, ", ".join(findings)

    def growth(self) -> Tuple[bool, str]:
        g = builtin("neg_inv_product", 2)
        report = growth_bound_check(g, (1.0, 1.0), 1.0, tolerances=self.config.tolerances)
        ok = report.passed and abs(report.margin) <= self.config.tolerances.violation_rel
        return ok, f"min relative slack {report.margin:.3g} at {report.location}"

    def separate(self) -> Tuple[bool, str]:
        g = builtin("neg_inv_product", 2)
        index = MonotonicityIndex(2, 0)
        joint = self.runner.monotone_search(g, index, (2, 2), self.trials // 2, self.seed)
        slices = self.runner.separate_monotonicity_check(g, index, (2, 2), self.trials // 2, self.seed)
        if joint.passed and not all_passed(slices):
            return False, "a one-variable slice violates while the joint search passes"
        return True, f"{len(slices)} slices pass"

    def index_independence(self) -> Tuple[bool, str]:
        cases: Sequence[Tuple[str, int, Tuple[int, ...]]] = (
            ("sqrt1", 1, (1,)),
            ("neg_inv_product", 2, (1, 1)),
            ("constant(1)", 2, (1, 1)),
        )
        findings = []
        for name, k, orders in cases:
            g = builtin(name, k)
            reports = [
                self._search_monotone(g, index, orders, self.independence_trials)
                for index in ALL_SMALL_INDICES
            ]
            if not verdicts_agree(reports):
                verdicts = ", ".join(f"{i}:{r.verdict.value}" for i, r in zip(ALL_SMALL_INDICES, reports))
                return False, f"finding: {name} verdicts depend on the index ({verdicts})"
            findings.append(f"{name}:{reports[0].verdict.value}")
        return True, ", ".join(findings)
