"""Channel/state files and CSV output.

File schema (JSON, complex entries as [re, im] pairs):

    {
      "dim_out": 2,
      "inputs": [
        {"label": "0", "state": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        {"label": "1", "state": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]}
      ]
    }

A state file is the same document with exactly one input.
"""
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Sequence, TextIO, Union

import numpy as np

from core.cq_channel import CQChannel
from core.exceptions import ParseError, ValidationError
from core.operators import DensityOperator

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _load_json(path: PathLike) -> Any:
    path = str(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read file: {e.strerror}", path=path) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, line=e.lineno, column=e.colno) from e


def _parse_matrix(raw: Any, dim: int, path: str, where: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != dim:
        raise ParseError(f"expected {dim} rows", path=path, field=where)
    m = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"expected {dim} entries", path=path, field=f"{where}[{i}]")
        for j, entry in enumerate(row):
            ok = (
                isinstance(entry, list)
                and len(entry) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
            )
            if not ok:
                raise ParseError("expected a [re, im] pair of numbers", path=path, field=f"{where}[{i}][{j}]")
            m[i, j] = complex(entry[0], entry[1])
    return m


def parse_channel(doc: Any, path: str = "<input>") -> CQChannel:
    """Build a CQChannel from a decoded channel document."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", path=path)
    dim = doc.get("dim_out")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("dim_out must be a positive integer", path=path, field="dim_out")
    inputs = doc.get("inputs")
    if not isinstance(inputs, list) or not inputs:
        raise ParseError("inputs must be a non-empty list", path=path, field="inputs")

    labels: List[str] = []
    states: List[DensityOperator] = []
    for k, item in enumerate(inputs):
        where = f"inputs[{k}]"
        if not isinstance(item, dict):
            raise ParseError("input must be an object", path=path, field=where)
        label = item.get("label")
        if not isinstance(label, str) or not label:
            raise ParseError("label must be a non-empty string", path=path, field=f"{where}.label")
        if label in labels:
            raise ParseError(f"duplicate label {label!r}", path=path, field=f"{where}.label")
        matrix = _parse_matrix(item.get("state"), dim, path, f"{where}.state")
        try:
            states.append(DensityOperator(matrix))
        except ValidationError as e:
            raise ParseError(str(e), path=path, field=f"{where}.state") from e
        labels.append(label)
    return CQChannel.from_states(labels, states)


def load_channel(path: PathLike) -> CQChannel:
    ch = parse_channel(_load_json(path), str(path))
    logger.debug(f"loaded channel {ch!r} from {path}")
    return ch


def load_state(path: PathLike) -> DensityOperator:
    ch = parse_channel(_load_json(path), str(path))
    if ch.size != 1:
        raise ParseError(f"state file must have exactly one input, found {ch.size}", path=str(path), field="inputs")
    return ch.output(ch.labels[0])


def channel_document(ch: CQChannel) -> dict:
    """Inverse of parse_channel, used to write fixtures."""
    return {
        "dim_out": ch.dim_b,
        "inputs": [
            {
                "label": str(x),
                "state": [[[float(v.real), float(v.imag)] for v in row] for row in ch.output(x).matrix],
            }
            for x in ch.labels
        ],
    }


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

def format_value(value: Any) -> str:
    """12 significant digits for floats; inf / -inf / nan spelled out."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if v == 0:
            return "0"
        return f"{v:.12g}"
    return str(value)


def write_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str], out: TextIO) -> None:
    """Header plus one line per row in the given column order."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
