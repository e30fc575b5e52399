"""Grid interchange documents (JSON) and result tables (CSV).

Document layout::

    {
      "schema_version": "1.0",
      "metadata": {"name": ..., "source": ...},
      "substations": [...], "buses": [...], "branches": [...],
      "transformers": [...], "generators": [...]
    }

Record fields mirror the :mod:`gicflow.grid` dataclasses by name. An
ungrounded substation carries ``"grounding_resistance": null``. Fields the
schema does not know are kept in each record's ``extra`` mapping and written
back out unchanged.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import fields
from pathlib import Path
from typing import Any, Union

from .grid import (Branch, Bus, Generator, GridModel, Substation, Transformer,
                   TransformerConfig, ValidationReport, validate)

SCHEMA_VERSION = "1.0"
SUPPORTED_VERSIONS = ("1.0",)

_RECORDS = {
    "substations": Substation,
    "buses": Bus,
    "branches": Branch,
    "transformers": Transformer,
    "generators": Generator,
}
_TOP_LEVEL = {"schema_version", "metadata", *_RECORDS}


class GridFormatError(ValueError):
    """Malformed document. ``position`` is ``line:col`` or a JSON path."""

    def __init__(self, message: str, position: str = ""):
        self.position = position
        super().__init__(f"{position}: {message}" if position else message)


class SchemaVersionError(GridFormatError):
    pass


class GridValidationError(GridFormatError):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(str(v) for v in report.violations)
        super().__init__(f"grid failed validation: {lines}")


def _required(cls) -> dict[str, bool]:
    from dataclasses import MISSING
    return {f.name: (f.default is MISSING and f.default_factory is MISSING)
            for f in fields(cls) if f.name != "extra"}


def _check_type(name: str, value: Any, path: str) -> Any:
    numeric = {"latitude", "longitude", "grounding_resistance", "nominal_kv", "voltage_pu",
               "resistance_per_phase", "length_north_km", "length_east_km", "r_winding_high",
               "r_winding_low", "k_factor", "mw_capacity"}
    flags = {"in_service", "is_gsu"}
    if name in numeric:
        if value is None and name != "nominal_kv":
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise GridFormatError(f"expected a number, got {value!r}", path)
        return float(value)
    if name in flags:
        if not isinstance(value, bool):
            raise GridFormatError(f"expected true/false, got {value!r}", path)
        return value
    if name == "configuration":
        try:
            return TransformerConfig(value)
        except ValueError:
            choices = ", ".join(c.value for c in TransformerConfig)
            raise GridFormatError(f"unknown configuration {value!r} (expected one of {choices})", path) from None
    if value is None and name in ("area", "neutral_substation"):
        return None
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise GridFormatError(f"expected an identifier/text, got {value!r}", path)
    return str(value)


def _record(cls, raw: Any, path: str):
    if not isinstance(raw, dict):
        raise GridFormatError("record must be an object", path)
    req = _required(cls)
    kwargs: dict[str, Any] = {}
    extra: dict[str, Any] = {}
    for key, value in raw.items():
        if key in req:
            kwargs[key] = _check_type(key, value, f"{path}.{key}")
        else:
            extra[key] = value
    missing = [k for k, r in req.items() if r and k not in kwargs]
    if missing:
        raise GridFormatError(f"missing field(s) {', '.join(missing)}", path)
    if cls is Substation and kwargs.get("grounding_resistance", 0.0) is None:
        kwargs["grounding_resistance"] = math.inf
    return cls(**kwargs, extra=extra)


def parse_grid(data: Union[bytes, str]) -> GridModel:
    """Parse and validate a grid document; never returns a partial model."""
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(exc.msg, f"line {exc.lineno} col {exc.colno}") from None
    if not isinstance(doc, dict):
        raise GridFormatError("document root must be an object", "$")
    version = doc.get("schema_version")
    if version not in SUPPORTED_VERSIONS:
        raise SchemaVersionError(f"unsupported schema_version {version!r}", "$.schema_version")
    meta = doc.get("metadata", {}) or {}
    if not isinstance(meta, dict):
        raise GridFormatError("metadata must be an object", "$.metadata")
    colls: dict[str, tuple] = {}
    for name, cls in _RECORDS.items():
        raw = doc.get(name, [])
        if not isinstance(raw, list):
            raise GridFormatError("expected a list", f"$.{name}")
        colls[name] = tuple(_record(cls, r, f"$.{name}[{i}]") for i, r in enumerate(raw))
    extra = {k: v for k, v in doc.items() if k not in _TOP_LEVEL}
    meta_extra = {k: v for k, v in meta.items() if k not in ("name", "source")}
    if meta_extra:
        extra["metadata"] = meta_extra
    model = GridModel(**colls, name=str(meta.get("name", "")), source=str(meta.get("source", "")),
                      extra=extra)
    report = validate(model)
    if not report.ok:
        raise GridValidationError(report)
    return model


def _record_dict(rec) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in fields(rec):
        if f.name == "extra":
            continue
        v = getattr(rec, f.name)
        if isinstance(v, TransformerConfig):
            v = v.value
        elif isinstance(v, float) and math.isinf(v):
            v = None
        out[f.name] = v
    for k in sorted(rec.extra):
        if k not in out:
            out[k] = rec.extra[k]
    return out


def model_to_document(model: GridModel) -> dict[str, Any]:
    meta = {"name": model.name, "source": model.source}
    meta.update(model.extra.get("metadata", {}))
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "metadata": meta}
    for name in _RECORDS:
        doc[name] = [_record_dict(r) for r in sorted(getattr(model, name), key=lambda r: r.id)]
    for k in sorted(model.extra):
        if k != "metadata" and k not in doc:
            doc[k] = model.extra[k]
    return doc


def serialize_grid(model: GridModel) -> bytes:
    """Deterministic UTF-8 JSON; floats use shortest round-trip repr."""
    text = json.dumps(model_to_document(model), indent=2, allow_nan=False, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def load_grid(path: Union[str, os.PathLike]) -> GridModel:
    return parse_grid(Path(path).read_bytes())


def save_grid(model: GridModel, path: Union[str, os.PathLike]) -> None:
    Path(path).write_bytes(serialize_grid(model))


TRANSFORMER_COLUMNS = ("id", "neutral_gic_a", "effective_gic_a_per_phase", "qloss_mvar", "in_service")
BRANCH_COLUMNS = ("id", "from_bus", "to_bus", "gic_a_per_phase")
NODE_COLUMNS = ("node_id", "kind", "dc_voltage_v")


def _num(x: float) -> str:
    # fixed precision keeps -0.0 / 1e-17 noise out of golden files
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def solution_tables(solution) -> dict[str, str]:
    """The three result tables as CSV text keyed by file name."""
    def table(header, rows) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()

    xf_rows = [(t, _num(solution.neutral_gic[t]), _num(solution.effective_gic_per_phase[t]),
                _num(solution.qloss_mvar[t]), str(solution.transformer_in_service[t]).lower())
               for t in sorted(solution.neutral_gic)]
    br_rows = [(b, *solution.branch_ends[b], _num(solution.branch_gic_per_phase[b]))
               for b in sorted(solution.branch_gic_per_phase)]
    nd_rows = [(nid, kind, _num(v)) for (kind, nid), v in
               sorted(solution.node_voltages.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
    return {
        "transformers.csv": table(TRANSFORMER_COLUMNS, xf_rows),
        "branches.csv": table(BRANCH_COLUMNS, br_rows),
        "nodes.csv": table(NODE_COLUMNS, nd_rows),
    }


def write_solution_csv(solution, target: Union[str, os.PathLike]) -> list[Path]:
    """Write transformers.csv, branches.csv and nodes.csv into directory ``target``."""
    out = Path(target)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in solution_tables(solution).items():
        p = out / name
        p.write_text(text, encoding="utf-8", newline="")
        written.append(p)
    return written
