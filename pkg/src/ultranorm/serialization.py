"""JSON wire formats for spaces, sections, metrics, and adelic data.

All numbers travel as exact rational strings ("num/den" or "num"); every
schema rejects unknown keys so malformed configs fail loudly with a
JSON-pointer path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, List, Sequence

import jsonschema

from .fields import Magnitude, ValuedField
from .sections import Section, Subvariety
from .spaces import NormedSpace, PreconditionError

RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[1-9][0-9]*)?$"}

MAGNITUDE_SCHEMA = {
    "type": "object",
    "properties": {"q": RATIONAL, "n": {"type": "integer"}},
    "required": ["q", "n"],
    "additionalProperties": False,
}

FIELD_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["padic", "trivial", "laurent"]},
        "p": {"type": "integer", "minimum": 2},
        "base_prime": {"type": "integer", "minimum": 2},
    },
    "required": ["type"],
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"type": {"const": "padic"}}},
         "then": {"required": ["p"]}},
        {"if": {"properties": {"type": {"const": "laurent"}}},
         "then": {"required": ["base_prime"]}},
    ],
}

MATRIX_SCHEMA = {
    "type": "array",
    "items": {"type": "array", "items": RATIONAL, "minItems": 1},
    "minItems": 1,
}

VECTOR_SCHEMA = {"type": "array", "items": RATIONAL, "minItems": 1}

NORM_SCHEMA = {
    "type": "object",
    "properties": {
        "field": FIELD_SCHEMA,
        "basis": MATRIX_SCHEMA,
        "weights": {"type": "array", "items": MAGNITUDE_SCHEMA},
    },
    "required": ["field", "basis", "weights"],
    "additionalProperties": False,
}

SECTION_SCHEMA = {
    "type": "object",
    "properties": {
        "degree": {"type": "integer", "minimum": 0},
        "variables": {"type": "integer", "minimum": 1},
        "coeffs": {
            "type": "object",
            "patternProperties": {r"^[0-9]+(,[0-9]+)*$": RATIONAL},
            "additionalProperties": False,
        },
    },
    "required": ["degree", "variables", "coeffs"],
    "additionalProperties": False,
}

SUBVARIETY_SCHEMA = {
    "type": "object",
    "properties": {
        "points": {"type": "array", "items": VECTOR_SCHEMA, "minItems": 1},
        "linear": MATRIX_SCHEMA,
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}

POINTS_SCHEMA = {
    "type": "object",
    "properties": {
        "points": {"type": "array", "items": VECTOR_SCHEMA, "minItems": 1},
    },
    "required": ["points"],
    "additionalProperties": False,
}

ADELIC_SCHEMA = {
    "type": "object",
    "properties": {
        "dim": {"type": "integer", "minimum": 0},
        "places": {
            "type": "object",
            "patternProperties": {r"^[0-9]+$": NORM_SCHEMA},
            "additionalProperties": False,
        },
        "arch_functionals": MATRIX_SCHEMA,
    },
    "required": ["dim", "arch_functionals"],
    "additionalProperties": False,
}

LATTICE_SCHEMA = {
    "type": "object",
    "properties": {"columns": MATRIX_SCHEMA},
    "required": ["columns"],
    "additionalProperties": False,
}

FUNCTIONALS_SCHEMA = {
    "type": "object",
    "properties": {"functionals": MATRIX_SCHEMA},
    "required": ["functionals"],
    "additionalProperties": False,
}

GRADED_SCHEMA = {
    "type": "object",
    "properties": {
        "degrees": {
            "type": "object",
            "patternProperties": {r"^[1-9][0-9]*$": ADELIC_SCHEMA},
            "additionalProperties": False,
            "minProperties": 1,
        },
    },
    "required": ["degrees"],
    "additionalProperties": False,
}

METRIC_SCHEMA = {
    "type": "object",
    "properties": {
        "space": NORM_SCHEMA,
        "subvariety": SUBVARIETY_SCHEMA,
        "representative": SECTION_SCHEMA,
    },
    "required": ["space"],
    "additionalProperties": False,
}


class SchemaViolation(Exception):
    """Config failed validation; carries a JSON-pointer path."""

    def __init__(self, path: str, message: str):
        super().__init__(message)
        self.path = path
        self.message = message


def validate(instance: Any, schema: Dict[str, Any]) -> None:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance),
                    key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(part) for part in err.absolute_path)
        if pointer == "/":
            pointer = ""
        raise SchemaViolation(pointer, err.message)


# ----------------------------------------------------------------------
# rational / magnitude codecs
# ----------------------------------------------------------------------


def rational_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rational_from_str(s: str) -> Fraction:
    return Fraction(s)


def matrix_to_json(rows: Sequence[Sequence[Fraction]]) -> List[List[str]]:
    return [[rational_to_str(x) for x in row] for row in rows]


def matrix_from_json(rows: Sequence[Sequence[str]]) -> List[List[Fraction]]:
    return [[rational_from_str(x) for x in row] for row in rows]


def magnitude_to_json(m: Magnitude) -> Dict[str, Any]:
    return {"q": rational_to_str(m.q), "n": m.n}


def magnitude_from_json(data: Dict[str, Any], field: ValuedField) -> Magnitude:
    q = rational_from_str(data["q"])
    return Magnitude(field.rho, q, int(data["n"]))


# ----------------------------------------------------------------------
# structured codecs
# ----------------------------------------------------------------------


def space_to_json(space: NormedSpace) -> Dict[str, Any]:
    return {
        "field": space.field.to_json(),
        "basis": matrix_to_json(space.basis),
        "weights": [magnitude_to_json(w) for w in space.weights],
    }


def space_from_json(data: Dict[str, Any]) -> NormedSpace:
    field = ValuedField.from_json(data["field"])
    basis = matrix_from_json(data["basis"])
    weights = [magnitude_from_json(w, field) for w in data["weights"]]
    return NormedSpace(field, basis, weights)


def section_to_json(s: Section) -> Dict[str, Any]:
    coeffs = {}
    for exp in sorted(s.coeffs):
        c = s.coeffs[exp]
        if hasattr(c, "is_constant"):
            if not c.is_constant():
                raise PreconditionError(
                    "only constant-coefficient sections serialize to JSON")
            c = c.constant_value()
        coeffs[",".join(str(e) for e in exp)] = rational_to_str(Fraction(c))
    return {"degree": s.degree, "variables": s.num_vars, "coeffs": coeffs}


def section_from_json(data: Dict[str, Any], field: ValuedField) -> Section:
    num_vars = int(data["variables"])
    degree = int(data["degree"])
    coeffs = {}
    for key, val in data["coeffs"].items():
        exp = tuple(int(e) for e in key.split(","))
        if len(exp) != num_vars:
            raise SchemaViolation(f"/coeffs/{key}",
                                  f"exponent arity {len(exp)} != {num_vars}")
        if sum(exp) != degree:
            raise SchemaViolation(f"/coeffs/{key}",
                                  f"exponent degree {sum(exp)} != {degree}")
        coeffs[exp] = field.from_rational(rational_from_str(val))
    return Section(field, num_vars, degree, coeffs)


def subvariety_to_json(Y: Subvariety) -> Dict[str, Any]:
    if Y.points is not None:
        return {"points": matrix_to_json(Y.points)}
    return {"linear": matrix_to_json(Y.linear_forms)}


def subvariety_from_json(data: Dict[str, Any], field: ValuedField,
                         num_vars: int) -> Subvariety:
    if "points" in data:
        return Subvariety(field, num_vars,
                          points=matrix_from_json(data["points"]))
    return Subvariety(field, num_vars,
                      linear_forms=matrix_from_json(data["linear"]))
