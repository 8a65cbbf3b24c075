"""Problem and report files (JSON, versioned by ``schema_version``)."""

import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .errors import IvexpError

SCHEMA_VERSION = 1

_number_array = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_matrix = {"type": "array", "items": _number_array, "minItems": 1}

PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "dimension", "lower", "upper", "horizon"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "dimension": {"type": "integer", "minimum": 1},
        "lower": _matrix,
        "upper": _matrix,
        "constraints": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["row", "kind", "coefficients", "rhs"],
                "additionalProperties": False,
                "properties": {
                    "row": {"type": "integer", "minimum": 0},
                    "kind": {"enum": ["eq", "le"]},
                    "coefficients": _number_array,
                    "rhs": {"type": "number"},
                },
            },
        },
        "zero_row_sums": {"type": "boolean"},
        "metzler_expected": {"type": "boolean"},
        "initial": {
            "type": "object",
            "required": ["lower", "upper"],
            "additionalProperties": False,
            "properties": {"lower": _number_array, "upper": _number_array},
        },
        "horizon": {"type": "number", "minimum": 0},
        "steps": {"type": "integer", "minimum": 1},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
    },
    "not": {"required": ["steps", "tolerance"]},
}


class ProblemError(IvexpError, ValueError):
    pass


@dataclass
class Problem:
    raw: dict
    lower: np.ndarray
    upper: np.ndarray
    extra: dict
    horizon: float
    steps: int | None
    tolerance: float | None
    zero_row_sums: bool
    metzler_expected: bool
    initial: tuple | None

    @property
    def n(self):
        return self.lower.shape[0]


def _path(error):
    out = "$"
    for p in error.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def parse_problem(data, source="<problem>"):
    """Validate a decoded problem document and return a :class:`Problem`."""
    validator = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        if e.validator == "not":
            msg = "exactly one of 'steps' and 'tolerance' may be given, not both"
        else:
            msg = e.message
        raise ProblemError(f"{source}: {_path(e)}: {msg}")
    n = data["dimension"]
    lo = np.array(data["lower"], dtype=float)
    hi = np.array(data["upper"], dtype=float)
    for key, m in (("lower", lo), ("upper", hi)):
        if m.shape != (n, n):
            raise ProblemError(f"{source}: $.{key}: expected a {n}x{n} matrix, got shape {m.shape}")
    bad = np.argwhere(lo > hi)
    if bad.size:
        i, j = bad[0]
        raise ProblemError(f"{source}: $.lower[{i}][{j}]: exceeds $.upper[{i}][{j}]")
    extra = {}
    for k, c in enumerate(data.get("constraints", [])):
        if c["row"] >= n:
            raise ProblemError(f"{source}: $.constraints[{k}].row: {c['row']} out of range")
        if len(c["coefficients"]) != n:
            raise ProblemError(f"{source}: $.constraints[{k}].coefficients: expected {n} entries")
        extra.setdefault(c["row"], []).append(
            (c["kind"], np.array(c["coefficients"], dtype=float), float(c["rhs"])))
    initial = None
    if "initial" in data:
        il = np.array(data["initial"]["lower"], dtype=float)
        iu = np.array(data["initial"]["upper"], dtype=float)
        if il.shape != (n,) or iu.shape != (n,):
            raise ProblemError(f"{source}: $.initial: vectors must have {n} entries")
        if np.any(il > iu):
            raise ProblemError(f"{source}: $.initial: lower exceeds upper")
        initial = (il, iu)
    metzler_expected = bool(data.get("metzler_expected", False))
    if metzler_expected:
        off = ~np.eye(n, dtype=bool)
        if np.any(lo[off] < 0):
            i, j = np.argwhere((lo < 0) & off)[0]
            raise ProblemError(f"{source}: $.lower[{i}][{j}]: negative off-diagonal bound "
                               "but metzler_expected is true")
    return Problem(raw=data, lower=lo, upper=hi, extra=extra, horizon=float(data["horizon"]),
                   steps=data.get("steps"), tolerance=data.get("tolerance"),
                   zero_row_sums=bool(data.get("zero_row_sums", False)),
                   metzler_expected=metzler_expected, initial=initial)


def load_problem(path):
    try:
        with open(path) as f:
            text = f.read()
    except OSError as exc:
        raise ProblemError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_problem(data, str(path))


def dump_report(report, path):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        return text
    with open(path, "w") as f:
        f.write(text)
    return text
