"""Deterministic JSON and CSV rendering of results."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np
from pydantic import BaseModel

from .types import ConvergenceRow, ExactMoment
from .utils import fraction_str, round_significant

CSV_FIELDS = ("label", "X", "observed", "predicted", "ratio", "residual_scaled", "flags")


def to_jsonable(value: Any) -> Any:
    """Plain JSON data with reals at 15 significant digits and rationals as 'num/den'."""

    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        if isinstance(value, ExactMoment):
            return str(value)
        return {field.name: to_jsonable(getattr(value, field.name)) for field in dataclasses.fields(value)}
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return round_significant(value) if math.isfinite(value) else None
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(item) for item in value]
    return value


def render_json(config: Any, results: Any, diagnostics: Mapping[str, Any] | None = None) -> str:
    payload = {
        "config": to_jsonable(config),
        "results": to_jsonable(results),
        "diagnostics": to_jsonable(diagnostics or {}),
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render_csv(rows: Sequence[ConvergenceRow]) -> str:
    """RFC 4180 table of convergence rows; flags are joined with ';'."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        record = to_jsonable(row)
        writer.writerow(
            [
                record["label"],
                _csv_number(record["X"]),
                _csv_number(record["observed"]),
                _csv_number(record["predicted"]),
                _csv_number(record["ratio"]),
                _csv_number(record["residual_scaled"]),
                ";".join(record["flags"]),
            ]
        )
    return buffer.getvalue()


def _csv_number(value: float | None) -> str:
    return "" if value is None else repr(value)
