"""Dataset CSV, parameter JSON and report serialization."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyDataset, ParseError, SchemaError
from .model import ACTIVATIONS, Activation, Dataset, NetworkParams, NoHidden, OneHidden, Unit


def load_dataset(path) -> Dataset:
    """Read a CSV with header ``t1,...,td,f``; one row per discretisation point."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EmptyDataset(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[-1] != "f":
        raise ParseError("header must be t1,...,td,f", row=1)
    width = len(header)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} cells, found {len(row)}", row=lineno)
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r}", row=lineno, column=col) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite cell {cell!r}", row=lineno, column=col)
            parsed.append(v)
        values.append(parsed)
    if not values:
        raise EmptyDataset(f"{path}: no data rows")
    data = np.array(values)
    return Dataset(data[:, :-1], data[:, -1])


def save_dataset(dataset: Dataset, path) -> None:
    d = dataset.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"t{k + 1}" for k in range(d)] + ["f"])
        for point, target in zip(dataset.points, dataset.targets):
            writer.writerow([repr(float(v)) for v in point] + [repr(float(target))])


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("expected a number", path)
    if not math.isfinite(value):
        raise SchemaError("must be finite", path)
    return float(value)


def params_from_dict(doc) -> tuple:
    """Validate a parameter document; returns ``(params, activation)``."""
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    arch = doc.get("architecture")
    if arch not in ("no_hidden", "one_hidden"):
        raise SchemaError("must be 'no_hidden' or 'one_hidden'", "architecture")
    act_name = doc.get("activation")
    if act_name not in ACTIVATIONS:
        raise SchemaError(f"must be one of {sorted(ACTIVATIONS)}", "activation")
    units = doc.get("units")
    if not isinstance(units, list) or not units:
        raise SchemaError("must be a non-empty list", "units")
    parsed = []
    for j, unit in enumerate(units):
        where = f"units[{j}]"
        if not isinstance(unit, dict):
            raise SchemaError("must be an object", where)
        for key in ("w", "w0", "a"):
            if key not in unit:
                raise SchemaError("missing field", f"{where}.{key}")
        w = unit["w"]
        if not isinstance(w, list) or not w:
            raise SchemaError("must be a non-empty array", f"{where}.w")
        w = [_number(v, f"{where}.w[{k}]") for k, v in enumerate(w)]
        parsed.append((w, _number(unit["w0"], f"{where}.w0"), _number(unit["a"], f"{where}.a")))
    if len({len(w) for w, _, _ in parsed}) != 1:
        raise SchemaError("all units must share the input dimension", "units")
    if arch == "no_hidden":
        if len(parsed) != 1:
            raise SchemaError("no_hidden takes exactly one unit", "units")
        w, w0, a = parsed[0]
        if a != 1.0:
            raise SchemaError("a must equal 1", "units[0].a")
        params: NetworkParams = NoHidden(w=w, w0=w0)
    else:
        params = OneHidden(tuple(Unit(w=w, w0=w0, a=a) for w, w0, a in parsed))
    return params, ACTIVATIONS[act_name]


def params_to_dict(params: NetworkParams, act: Activation) -> dict:
    if isinstance(params, NoHidden):
        units = [{"w": list(params.w), "w0": params.w0, "a": 1.0}]
        arch = "no_hidden"
    else:
        units = [{"w": list(u.w), "w0": u.w0, "a": u.a} for u in params.units]
        arch = "one_hidden"
    return {"architecture": arch, "activation": act.kind, "units": units}


def load_params(path) -> tuple:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return params_from_dict(doc)


def save_params(params: NetworkParams, act: Activation, path) -> None:
    Path(path).write_text(dumps(params_to_dict(params, act)))


def plain(value):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def dumps(doc) -> str:
    # shortest repr floats: exact round trip
    return json.dumps(plain(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


@dataclass
class Report:
    command: str
    status: str
    result: dict = field(default_factory=dict)
    classification: dict | None = None
    certificate: dict | None = None
    kkt_residual_norm: float | None = None
    config: dict = field(default_factory=dict)
    timings: dict | None = None

    def __post_init__(self):
        for name in ("result", "classification", "certificate", "kkt_residual_norm", "config", "timings"):
            setattr(self, name, plain(getattr(self, name)))

    def to_json(self) -> str:
        return dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls(**json.loads(text))

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def read(cls, path) -> "Report":
        return cls.from_json(Path(path).read_text())
