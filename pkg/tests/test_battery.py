"""Tests for the reproduction battery."""

import json
from dataclasses import replace

import pytest

from loewner.core.battery import BatteryItem, BatterySummary, PaperBattery
from loewner.core.config import LoewnerConfig
from loewner.core.errors import ConfigurationError
from loewner.core.models import Verdict
from loewner.core.reporter import ReportPrinter


@pytest.fixture
def battery(config, logger):
    return PaperBattery(config, logger, trials=50, independence_trials=50)


def test_masking_tolerance_is_rejected(logger):
    with pytest.raises(ConfigurationError):
        PaperBattery(LoewnerConfig().with_overrides(tol=1e2), logger)


@pytest.mark.parametrize(
    "item", ["separable_product", "multi_index_classes", "projections", "growth", "separate"]
)
def test_cheap_items_pass(battery, item):
    passed, detail = getattr(battery, item)()
    assert passed, detail


def test_implication_item_checks_both_directions(config, logger):
    passed, detail = PaperBattery(config, logger).implication()
    assert passed, detail
    assert "neg_inv_sqrt1:monotone" in detail
    assert "koranyi_g:not monotone" in detail


def test_implication_item_flags_missing_convexity(battery, monkeypatch):
    convex_search = battery.runner.convex_search

    def narrow_order_fails(f, orders, trials, seed):
        report = convex_search(f, orders, trials, seed)
        return replace(report, verdict=Verdict.VIOLATION) if orders == (1,) else report

    monkeypatch.setattr(battery.runner, "convex_search", narrow_order_fails)
    passed, detail = battery.implication()
    assert not passed
    assert detail == "r1 passes monotonicity at order 2 but square1 violates convexity at order 1"


def test_failing_item_is_reported(battery, monkeypatch):
    def broken():
        raise RuntimeError("boom")

    monkeypatch.setattr(battery, "items", lambda: [("broken", broken), ("growth", battery.growth)])
    summary = battery.run(1)
    assert not summary.passed
    assert [(item.name, item.passed, item.detail) for item in summary.items][0] == (
        "broken",
        False,
        "error: boom",
    )
    assert summary.items[1].passed


def test_summary_json(capsys, logger):
    summary = BatterySummary(seed=2, items=[BatteryItem("growth", True, "min slack 0", 0.5)])
    ReportPrinter(logger, "json").battery(summary)
    data = json.loads(capsys.readouterr().out)
    assert data == {
        "seed": 2,
        "passed": True,
        "items": [{"name": "growth", "passed": True, "detail": "min slack 0"}],
    }


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2])
def test_full_battery_passes(config, logger, seed):
    summary = PaperBattery(config, logger).run(seed)
    assert summary.passed, [(item.name, item.detail) for item in summary.items if not item.passed]
    assert len(summary.items) == 11
