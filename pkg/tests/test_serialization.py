"""Tests for witness and matrix files."""

import json

import numpy as np
import pytest

from loewner.core.catalog import builtin
from loewner.core.checkers import replay
from loewner.core.errors import WitnessFormatError
from loewner.core.models import MonotonicityIndex
from loewner.core.serialization import (
    WitnessStore,
    matrix_from_json,
    matrix_to_json,
    report_to_dict,
    witness_from_dict,
    witness_to_dict,
)

WITNESS_KEYS = {
    "version",
    "command",
    "function",
    "k",
    "domain",
    "index",
    "lambda",
    "orders",
    "seed",
    "trial",
    "margin",
    "operands",
    "second_operands",
    "decompositions",
    "partitions",
    "rows",
    "ordering",
}


@pytest.fixture
def monotone_violation(runner):
    return runner.monotone_search(builtin("square1"), MonotonicityIndex(2, 0), (2,), 200, 1)


def test_matrix_json_layout():
    m = np.array([[1.0, 2.0 - 1.0j], [2.0 + 1.0j, 3.0]])
    data = matrix_to_json(m)
    assert data[0][1] == [2.0, -1.0]
    np.testing.assert_array_equal(matrix_from_json(data), m)


@pytest.mark.parametrize("data", [[[1.0, 2.0]], [[[1.0, 0.0], [2.0, 0.0]]], "text", []])
def test_malformed_matrices(data):
    with pytest.raises(WitnessFormatError):
        matrix_from_json(data)


def test_witness_schema(monotone_violation):
    data = witness_to_dict(monotone_violation.instance)
    assert set(data) == WITNESS_KEYS
    assert data["ordering"] == "lex-1based"
    assert data["index"] == {"l": 2, "j": 0}
    assert data["command"] == "monotone"
    json.dumps(data)


def test_witness_reloads_and_replays(monotone_violation):
    data = json.loads(json.dumps(witness_to_dict(monotone_violation.instance)))
    witness = witness_from_dict(data)
    assert witness.trial == monotone_violation.instance.trial
    replayed = replay(witness)
    assert not replayed.passed
    assert replayed.margin == pytest.approx(monotone_violation.margin, abs=1e-9)


def test_convex_witness_replays(runner):
    report = runner.convex_search(builtin("koranyi_f"), (2, 2), 500, 1)
    witness = witness_from_dict(json.loads(json.dumps(witness_to_dict(report.instance))))
    assert witness.lam == report.instance.lam
    assert replay(witness).margin == pytest.approx(report.margin, abs=1e-9)


def test_jensen_witness_replays(runner):
    report = runner.jensen_unitary_search(
        builtin("product", 2), MonotonicityIndex(2, 0), (2, 2), 200, 1
    )
    witness = witness_from_dict(json.loads(json.dumps(witness_to_dict(report.instance))))
    assert replay(witness).margin == pytest.approx(report.margin, abs=1e-9)


def test_unknown_ordering_is_rejected(monotone_violation):
    data = witness_to_dict(monotone_violation.instance)
    data["ordering"] = "colex"
    with pytest.raises(WitnessFormatError):
        witness_from_dict(data)


def test_missing_fields_are_rejected(monotone_violation):
    data = witness_to_dict(monotone_violation.instance)
    del data["operands"]
    with pytest.raises(WitnessFormatError):
        witness_from_dict(data)
    data = witness_to_dict(monotone_violation.instance)
    data["index"] = {"l": 2, "j": 5}
    with pytest.raises(WitnessFormatError):
        witness_from_dict(data)


def test_store_round_trip(tmp_path, logger, monotone_violation):
    store = WitnessStore(logger)
    path = tmp_path / "nested" / "witness.json"
    store.save_witness(path, monotone_violation.instance)
    witness = store.load_witness(path)
    assert witness.margin == monotone_violation.instance.margin
    assert witness.function == "r1^2"


def test_store_unwraps_reports(tmp_path, logger, monotone_violation):
    path = tmp_path / "report.json"
    path.write_text(json.dumps(report_to_dict(monotone_violation)))
    witness = WitnessStore(logger).load_witness(path)
    assert witness.command == "monotone"


def test_store_errors(tmp_path, logger):
    store = WitnessStore(logger)
    with pytest.raises(WitnessFormatError):
        store.load_witness(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(WitnessFormatError):
        store.load_witness(bad)
    with pytest.raises(WitnessFormatError):
        store.load_matrices(bad)


def test_store_matrices(tmp_path, logger):
    store = WitnessStore(logger)
    path = tmp_path / "input.json"
    path.write_text(json.dumps({"matrices": [matrix_to_json(np.eye(2))], "function": "r1^2"}))
    data = store.load_matrices(path)
    np.testing.assert_array_equal(data["matrices"][0], np.eye(2))
    assert data["function"] == "r1^2"

    out = tmp_path / "out.json"
    store.save_matrix(out, np.eye(2), function="r1^2")
    saved = json.loads(out.read_text())
    assert saved["function"] == "r1^2"
    np.testing.assert_array_equal(matrix_from_json(saved["matrix"]), np.eye(2))
