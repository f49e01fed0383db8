"""File input and output with reproducibility metadata.

JSON outputs wrap their result as ``{"tool", "version", "seed", "config",
"result"}`` with sorted keys and no timestamps. CSV outputs keep their plain
column layout and carry the same metadata in a ``<file>.meta.json`` sidecar.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from .. import __version__
from ..core.models import SweepResult
from ..core.state import StateMatrix, make_state_matrix
from ..exceptions import InputFormatError

logger = logging.getLogger(__name__)

TOOL_NAME = "group-phi"
SIDECAR_SUFFIX = ".meta.json"

PathLike = Union[str, Path]


def output_metadata(seed: Optional[int], config: Optional[Mapping[str, Any]]) -> dict[str, Any]:
    """Tool, version, seed and config echo embedded in every output."""
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "seed": seed,
        "config": dict(config or {}),
    }


def json_ready(value: Any) -> Any:
    """Convert models, arrays and non-finite floats to plain JSON values.

    NaN and infinities become ``null``; paths become file names.
    """
    if isinstance(value, BaseModel):
        return json_ready(value.model_dump())
    if isinstance(value, Mapping):
        return {str(k): json_ready(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist())
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [json_ready(v) for v in items]
    if isinstance(value, np.generic):
        return json_ready(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return value.name
    return value


def dumps_json(payload: Any) -> str:
    return json.dumps(json_ready(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write_text(path: PathLike, text: str) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
    return target


def write_json(
    path: PathLike,
    result: Any,
    seed: Optional[int] = None,
    config: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write ``result`` wrapped in output metadata."""
    payload = output_metadata(seed, config)
    payload["result"] = result
    target = _write_text(path, dumps_json(payload))
    logger.info(f"Wrote {target}")
    return target


def sidecar_path(path: PathLike) -> Path:
    target = Path(path)
    return target.with_name(target.name + SIDECAR_SUFFIX)


def write_table(
    frame: pd.DataFrame,
    path: PathLike,
    seed: Optional[int] = None,
    config: Optional[Mapping[str, Any]] = None,
    extra: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write a CSV table and its metadata sidecar.

    Args:
        frame: Table to write; the index is not written.
        path: CSV path.
        seed: Seed of the run.
        config: Parameters of the run.
        extra: Additional sidecar entries.
    """
    target = _write_text(path, frame.to_csv(index=False, lineterminator="\n"))
    metadata = output_metadata(seed, config)
    metadata.update(extra or {})
    _write_text(sidecar_path(target), dumps_json(metadata))
    logger.info(f"Wrote {target}")
    return target


def read_sidecar(path: PathLike) -> dict[str, Any]:
    """Metadata written next to a CSV, or ``{}`` if there is none."""
    meta = sidecar_path(path)
    if not meta.is_file():
        return {}
    try:
        return json.loads(meta.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputFormatError(f"Invalid metadata sidecar: {e}", str(meta)) from e


def write_state_matrix(
    matrix: StateMatrix,
    path: PathLike,
    seed: Optional[int] = None,
    config: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write a state matrix as ``t,<label1>,...,<labelN>`` CSV.

    Step duration and origin time go to the sidecar, so
    :func:`read_state_matrix` restores an equal matrix.
    """
    frame = pd.DataFrame(matrix.values, columns=list(matrix.node_labels))
    frame.insert(0, "t", np.arange(matrix.n_steps))
    return write_table(
        frame,
        path,
        seed,
        config,
        extra={
            "step_duration_ms": matrix.step_duration_ms,
            "origin_time": matrix.origin_time,
        },
    )


def read_state_matrix(path: PathLike) -> StateMatrix:
    """Read a state matrix CSV (and its sidecar, if present).

    Raises:
        FileNotFoundError: If the file does not exist.
        InputFormatError: If the header or step column is malformed.
        RaggedRows, NonBinaryValue, DuplicateLabel, TooFewSteps: As
            :func:`make_state_matrix`.
    """
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"State matrix not found: {source}")
    try:
        cells = pd.read_csv(
            source, header=None, dtype=str, keep_default_na=False, encoding="utf-8"
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputFormatError(f"Cannot parse state matrix: {e}", str(source)) from e

    header = cells.iloc[0].tolist()
    if not header or header[0] != "t":
        raise InputFormatError("State matrix header must start with 't'", str(source))
    body = cells.iloc[1:]
    if body.isna().to_numpy().any() or (body == "").to_numpy().any():
        raise InputFormatError("State matrix has missing or empty cells", str(source))
    try:
        steps = body.iloc[:, 0].astype(np.int64).to_numpy()
        values = body.iloc[:, 1:].apply(pd.to_numeric).to_numpy()
    except ValueError as e:
        raise InputFormatError(f"Non-numeric state entry: {e}", str(source)) from e
    if not np.array_equal(steps, np.arange(len(steps))):
        raise InputFormatError("Step column must count 0, 1, 2, ...", str(source))

    meta = read_sidecar(source)
    step = meta.get("step_duration_ms")
    return make_state_matrix(
        values,
        header[1:],
        step_duration_ms=None if step is None else float(step),
        origin_time=meta.get("origin_time"),
    )


def write_sweep(
    result: SweepResult,
    path: PathLike,
    seed: Optional[int] = None,
    config: Optional[Mapping[str, Any]] = None,
) -> Path:
    """Write a sweep as ``parameter,mean_phi,stderr`` CSV."""
    values: Sequence[float] = result.parameter_values
    if result.parameter == "tau":
        values = [int(v) for v in values]
    frame = pd.DataFrame(
        {
            "parameter": values,
            "mean_phi": result.mean_phi,
            "stderr": result.stderr_phi,
        }
    )
    return write_table(
        frame,
        path,
        seed,
        config,
        extra={
            "parameter": result.parameter,
            "argmax": result.argmax,
            "n_valid": result.n_valid,
        },
    )


def read_columns(path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    """Read named columns of a CSV table.

    Raises:
        FileNotFoundError: If the file does not exist.
        InputFormatError: If it cannot be parsed or lacks a column.
    """
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"Input file not found: {source}")
    try:
        frame = pd.read_csv(source, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise InputFormatError(f"Cannot parse table: {e}", str(source)) from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise InputFormatError(f"Missing columns {missing}", str(source))
    return frame[list(columns)]


def write_node_sets(samples: Sequence[Sequence[str]], directory: PathLike) -> list[Path]:
    """Write one ``replicate_###.txt`` per sample, one node id per line."""
    target = Path(directory)
    written = [
        _write_text(target / f"replicate_{i:03d}.txt", "".join(f"{n}\n" for n in sample))
        for i, sample in enumerate(samples)
    ]
    logger.info(f"Wrote {len(written)} node sets to {target}")
    return written


def read_node_set(path: PathLike) -> tuple[str, ...]:
    """Node ids of a node-set file, skipping blank lines."""
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(f"Node set not found: {source}")
    lines = source.read_text(encoding="utf-8").splitlines()
    return tuple(line.strip() for line in lines if line.strip())
