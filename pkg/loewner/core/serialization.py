"""JSON encoding of matrices, witnesses and reports."""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

from .constants import WITNESS_ORDERING
from .errors import InvalidIndexError, WitnessFormatError
from .logger import Logger
from .models import CheckReport, CompressionReport, MonotonicityIndex, Witness


def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    """Row-major nested [re, im] pairs."""
    array = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in array]


def matrix_from_json(data: Any) -> np.ndarray:
    try:
        array = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise WitnessFormatError(f"matrix is not a nested array of numbers: {e}") from e
    if array.ndim != 3 or array.shape[2] != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise WitnessFormatError(f"expected an n x n x 2 array of [re, im] pairs, got shape {array.shape}")
    return array[..., 0] + 1j * array[..., 1]


def _matrices(data: Sequence[Any]) -> tuple:
    return tuple(matrix_from_json(m) for m in data)


def witness_to_dict(witness: Witness) -> Dict[str, Any]:
    return {
        "version": witness.version,
        "command": witness.command,
        "function": witness.function,
        "k": witness.k,
        "domain": list(witness.domain),
        "index": {"l": witness.index.l, "j": witness.index.j} if witness.index else None,
        "lambda": witness.lam,
        "orders": list(witness.orders),
        "seed": witness.seed,
        "trial": witness.trial,
        "margin": witness.margin,
        "operands": [matrix_to_json(m) for m in witness.operands],
        "second_operands": [matrix_to_json(m) for m in witness.second_operands],
        "decompositions": [[matrix_to_json(m) for m in parts] for parts in witness.decompositions],
        "partitions": [[matrix_to_json(m) for m in ps] for ps in witness.partitions],
        "rows": [[matrix_to_json(m) for m in row] for row in witness.rows],
        "ordering": witness.ordering,
    }


def witness_from_dict(data: Dict[str, Any]) -> Witness:
    """
    Rebuild a witness.

    Raises:
        WitnessFormatError: missing fields, malformed matrices or an unknown ordering.
    """
    try:
        ordering = data.get("ordering", WITNESS_ORDERING)
        if ordering != WITNESS_ORDERING:
            raise WitnessFormatError(f"unsupported multi-index ordering '{ordering}'")
        index = data.get("index")
        return Witness(
            command=str(data["command"]),
            function=str(data["function"]),
            k=int(data["k"]),
            domain=tuple(str(d) for d in data["domain"]),
            margin=float(data["margin"]),
            operands=_matrices(data["operands"]),
            index=MonotonicityIndex(int(index["l"]), int(index["j"])) if index else None,
            lam=None if data.get("lambda") is None else float(data["lambda"]),
            orders=tuple(int(n) for n in data.get("orders", [])),
            seed=data.get("seed"),
            trial=data.get("trial"),
            second_operands=_matrices(data.get("second_operands", [])),
            decompositions=tuple(_matrices(parts) for parts in data.get("decompositions", [])),
            partitions=tuple(_matrices(ps) for ps in data.get("partitions", [])),
            rows=tuple(_matrices(row) for row in data.get("rows", [])),
            ordering=ordering,
            version=str(data.get("version", "")),
        )
    except (KeyError, TypeError, ValueError, InvalidIndexError) as e:
        raise WitnessFormatError(f"malformed witness: {e}") from e


def report_to_dict(report: CheckReport) -> Dict[str, Any]:
    return {
        "kind": report.kind,
        "verdict": report.verdict.value,
        "margin": report.margin,
        "tolerance_used": report.tolerance_used,
        "trials_run": report.trials_run,
        "seed": report.seed,
        "location": list(report.location) if report.location is not None else None,
        "notes": list(report.notes),
        "witness": witness_to_dict(report.instance) if report.instance else None,
    }


def compression_to_dict(report: CompressionReport) -> Dict[str, Any]:
    return {
        "max_deviation": report.max_deviation,
        "tolerance": report.tolerance,
        "dimension": report.dimension,
        "passed": report.passed,
    }


def dumps(data: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(data, indent=2, sort_keys=True)


class WitnessStore:
    """Reads and writes witness, matrix and report files."""

    def __init__(self, logger: Logger):
        """Initialize with a logger instance."""
        self.logger = logger

    def _read(self, path: Path) -> Any:
        try:
            return json.loads(Path(path).read_text())
        except OSError as e:
            raise WitnessFormatError(f"cannot read {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise WitnessFormatError(f"{path} is not valid JSON: {e}") from e

    def _write(self, path: Path, data: Any):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(dumps(data) + "\n")
        except OSError as e:
            raise WitnessFormatError(f"cannot write {path}: {e}") from e
        self.logger.debug(f"Wrote {path}")

    def load_witness(self, path: Path) -> Witness:
        data = self._read(path)
        # a full report wraps its witness
        if isinstance(data, dict) and "witness" in data and "command" not in data:
            data = data["witness"]
        if not isinstance(data, dict):
            raise WitnessFormatError(f"{path} does not hold a witness object")
        return witness_from_dict(data)

    def save_witness(self, path: Path, witness: Witness):
        self._write(path, witness_to_dict(witness))
        self.logger.info(f"[blue]Witness written to {path}[/blue]")

    def load_matrices(self, path: Path) -> Dict[str, Any]:
        """
        Read a funcalc input file: {"matrices": [...], "function"?: str, "domain"?: str}.
        """
        data = self._read(path)
        if not isinstance(data, dict) or "matrices" not in data:
            raise WitnessFormatError(f"{path} must hold an object with a 'matrices' list")
        return {**data, "matrices": list(_matrices(data["matrices"]))}

    def save_matrix(self, path: Path, matrix: np.ndarray, **metadata: Any):
        self._write(path, {**metadata, "matrix": matrix_to_json(matrix)})
