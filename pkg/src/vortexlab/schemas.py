"""JSON schemas of the serialized reports, checked with ``jsonschema``."""
from __future__ import annotations

import jsonschema

_num = {"type": "number"}
_complex = {"type": "object", "required": ["re", "im"],
            "properties": {"re": _num, "im": _num}}
_poly = {"type": "object", "required": ["re", "im"],
         "properties": {"re": {"type": "array", "items": _num},
                        "im": {"type": "array", "items": _num}}}

EQUATION = {
    "type": "object",
    "required": ["coefficients", "L", "canonical"],
    "properties": {
        "coefficients": {"type": "array", "items": _num},
        "L": {"type": "integer", "minimum": -1},
        "canonical": {"type": "boolean"},
    },
}

DIVISOR = {
    "type": "object",
    "required": ["points", "infinity", "degree"],
    "properties": {
        "points": {"type": "array", "items": {
            "type": "object", "required": ["re", "im", "N"],
            "properties": {"re": _num, "im": _num, "N": {"type": "number", "exclusiveMinimum": 0}}}},
        "infinity": {"type": "number", "minimum": 0},
        "degree": {"type": "number", "minimum": 0},
    },
}

CLOSED_FORM = {
    "type": "object",
    "required": ["equation", "map", "n", "K0", "divisor"],
    "properties": {
        "equation": EQUATION,
        "map": {"type": "object", "required": ["numerator", "denominator", "degree"],
                "properties": {"numerator": _poly, "denominator": _poly,
                               "degree": {"type": "integer", "minimum": 1}}},
        "n": {"type": "integer", "minimum": 1},
        "K0": _num,
        "divisor": DIVISOR,
    },
}

SOLVE_REPORT = {
    "type": "object",
    "required": ["converged", "iterations", "residual", "tol", "flux", "n_points", "trace", "warnings"],
    "properties": {
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer", "minimum": 0},
        "residual": _num,
        "tol": _num,
        "flux": _num,
        "n_points": {"type": "integer", "minimum": 8},
        "trace": {"type": "array", "items": _num},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "wall_time": _num,
        "profile": {"type": "object", "required": ["r", "u", "phisq", "residual"]},
    },
}

_maybe_seq = {"anyOf": [_num, {"type": "object", "required": ["limit_estimate", "trend", "converged"]}]}

VOLUME_REPORT = {
    "type": "object",
    "required": ["volumes", "flux", "vortex_number", "relation_residual", "relation", "bound", "domain"],
    "properties": {
        "volumes": {"type": "object", "additionalProperties": _maybe_seq},
        "flux": _maybe_seq,
        "vortex_number": _num,
        "relation_residual": _maybe_seq,
        "relation": {"type": "string"},
        "bound": {"type": "string"},
        "domain": {"type": "string"},
    },
}

CONE_REPORT = {
    "type": "object",
    "required": ["center", "n", "cone_angle", "fitted_multiplicity", "fit_residual", "low_confidence"],
    "properties": {
        "center": _complex,
        "n": {"type": "integer", "minimum": 1},
        "cone_angle": {"type": "number", "exclusiveMinimum": 0},
        "fitted_multiplicity": _num,
        "fit_residual": _num,
        "low_confidence": {"type": "boolean"},
    },
}

SCHEMAS = {
    "EquationSpec": EQUATION,
    "ClosedFormSolution": CLOSED_FORM,
    "SolveReport": SOLVE_REPORT,
    "VolumeReport": VOLUME_REPORT,
    "ConeReport": CONE_REPORT,
}


def validate(obj: dict, name: str) -> None:
    """Raise ``jsonschema.ValidationError`` if ``obj`` does not match schema ``name``."""
    jsonschema.validate(obj, SCHEMAS[name])
