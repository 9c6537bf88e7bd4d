"""Check records and deterministic JSON / CSV report emission.

Floats are written with 17 significant digits and nothing time-dependent is
recorded, so a fixed seed gives byte-identical files.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError

LOGGER = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"


@dataclasses.dataclass(frozen=True)
class CheckRecord:
    """One scalar result: ``passed`` is ``value <= tolerance``.

    ``anchor`` names the identity or estimate the check exercises.
    """

    name: str
    value: float
    tolerance: float
    anchor: str
    passed: bool | None = None

    def __post_init__(self) -> None:
        value = float(self.value)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "tolerance", float(self.tolerance))
        if self.passed is None:
            object.__setattr__(self, "passed", bool(math.isfinite(value) and value <= self.tolerance))

    def as_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "anchor": self.anchor,
        }


def format_float(x: float) -> str:
    """17 significant digits; non-finite values become quoted strings in JSON."""
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, FLOAT_FORMAT)


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.as_dict() if hasattr(obj, "as_dict") else dataclasses.asdict(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, complex):
        return _encode({"re": obj.real, "im": obj.imag}, indent, level)
    raise InvalidInputError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with floats at 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def records_to_rows(records: Iterable[CheckRecord]) -> list[list[str]]:
    rows = [["name", "value", "tolerance", "pass", "anchor"]]
    for r in records:
        rows.append([r.name, format(r.value, FLOAT_FORMAT), format(r.tolerance, FLOAT_FORMAT), str(bool(r.passed)).lower(), r.anchor])
    return rows


def rows_to_csv(rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([format(v, FLOAT_FORMAT) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def emit_report(
    results: Sequence[CheckRecord] | Mapping[str, Any],
    fmt: str,
    out_dir: str | Path,
    stem: str = "report",
    config: Mapping[str, Any] | None = None,
) -> Path:
    """Write ``results`` as ``<out_dir>/<stem>.<fmt>`` and return the path.

    A sequence of :class:`CheckRecord` becomes ``{"config": ..., "records": [...]}``
    in JSON (the bare record array when ``config`` is None) and one row per
    record in CSV. A mapping (an experiment report)
    is written as a JSON document, or flattened to ``key,value`` rows in CSV.
    """
    if fmt not in ("json", "csv"):
        raise InvalidInputError(f"unknown report format {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{stem}.{fmt}"
    if isinstance(results, Mapping):
        doc = dict(results)
        if config is not None:
            doc = {"config": dict(config), **doc}
        text = dumps(doc) if fmt == "json" else rows_to_csv([["key", "value"], *flatten(doc)])
    else:
        records = list(results)
        if fmt == "json":
            rec = [r.as_dict() for r in records]
            # without a config echo the document is the bare record array
            text = dumps(rec if config is None else {"config": dict(config), "records": rec})
        else:
            text = rows_to_csv(records_to_rows(records))
    path.write_text(text, encoding="utf-8")
    LOGGER.info("wrote %s", path)
    return path


def flatten(obj: Any, prefix: str = "") -> list[list[Any]]:
    """``key,value`` rows for every scalar leaf, keys joined with dots."""
    rows: list[list[Any]] = []
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = obj.as_dict() if hasattr(obj, "as_dict") else dataclasses.asdict(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, Mapping):
        for k, v in obj.items():
            rows.extend(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            rows.extend(flatten(v, f"{prefix}[{i}]"))
    elif isinstance(obj, (float, np.floating)):
        rows.append([prefix, float(obj)])
    elif isinstance(obj, (bool, np.bool_)):
        rows.append([prefix, str(bool(obj)).lower()])
    elif obj is None:
        rows.append([prefix, ""])
    else:
        rows.append([prefix, obj])
    return rows
