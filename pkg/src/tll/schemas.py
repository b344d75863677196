"""JSON Schemas for every file format the command line reads or writes.

``validate`` reports the first violation with a JSON pointer into the
document; ``docs/schemas/`` holds the same schemas as standalone files.
"""

from __future__ import annotations

import jsonschema

__all__ = ["SCHEMAS", "SchemaError", "validate"]

_NUM = {"type": "number"}
_COMPLEX = {"type": "object", "required": ["re"], "properties": {"re": _NUM, "im": _NUM}}
_NESTED2 = {"type": "array", "items": {"type": "array", "items": _NUM}}
_NESTED3 = {"type": "array", "items": _NESTED2}

JET = {
    "$id": "jet",
    "type": "object",
    "required": ["vars", "order", "terms"],
    "properties": {
        "vars": {"type": "integer", "minimum": 1},
        "order": {"type": "integer", "minimum": 0},
        "exact": {"type": "boolean"},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exp"],
                "properties": {
                    "exp": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "re": {"type": ["number", "string"]},
                    "im": {"type": ["number", "string"]},
                },
            },
        },
    },
}

LAURENT_SYMBOL = {
    "$id": "laurent_symbol",
    "type": "object",
    "required": ["n", "terms"],
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "terms": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "object", "required": ["degree", "jet"],
                      "properties": {"degree": {"type": "integer"}, "jet": JET}},
        },
    },
}

PHASE_KERNEL = {
    "$id": "phase_kernel",
    "type": "object",
    "required": ["phase", "amplitude", "dims", "n"],
    "properties": {
        "phase": JET,
        "amplitude": LAURENT_SYMBOL,
        "dims": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "density": JET,
    },
}

# square matrices: either {re: [[...]], im: [[...]]} or a row-major array of numbers / {re, im}
MATRIX = {
    "$id": "matrix",
    "oneOf": [
        {"type": "object", "required": ["re"], "properties": {"re": _NESTED2, "im": _NESTED2}},
        {"type": "array", "minItems": 1,
         "items": {"type": "array", "minItems": 1, "items": {"oneOf": [_NUM, _COMPLEX]}}},
    ],
}

SPLIT_INPUT = {
    "$id": "split_input",
    "type": "object",
    "required": ["omega", "q"],
    "properties": {"omega": MATRIX, "q": MATRIX},
}

SYMBOL_ON_C = {
    "$id": "symbol_on_c",
    "type": "object",
    "required": ["re"],
    "properties": {"re": _NESTED3, "im": _NESTED3, "normalized": {"type": "boolean"}},
}

_SPLINE = {
    "type": "object",
    "required": ["phi", "values"],
    "properties": {"phi": {"type": "array", "items": _NUM, "minItems": 4},
                   "values": {"type": "array", "items": _NUM, "minItems": 4}},
}

CONTACT_FORM = {
    "$id": "contact_form",
    "oneOf": [
        {"type": "object", "required": ["family"],
         "properties": {"family": {"enum": ["lambda_n", "lambda_st", "lambda_st_tilde", "lambda_0"]},
                        "n": {"type": "integer", "minimum": 0}},
         "if": {"properties": {"family": {"const": "lambda_n"}}},
         "then": {"required": ["n"]}},
        {"type": "object", "required": ["a_spline", "b_spline"],
         "properties": {"a_spline": _SPLINE, "b_spline": _SPLINE}},
    ],
}

SCENARIO = {
    "$id": "scenario",
    "type": "object",
    "required": ["name", "kind"],
    "properties": {
        "name": {"type": "string"},
        "kind": {"enum": ["sphere", "conformal", "broken", "constant", "chain"]},
        "params": {"type": "object"},
    },
}

CONFIG = {
    "$id": "config",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "order": {"type": "integer", "minimum": 1},
        "n_phi": {"type": "integer", "minimum": 1},
        "n_theta": {"type": "integer", "minimum": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "out": {"type": ["string", "null"]},
        "seed": {"type": "integer", "minimum": 0},
    },
}

REPORT = {
    "$id": "report",
    "type": "object",
    "required": ["command", "provenance", "result"],
    "properties": {
        "command": {"type": "string"},
        "provenance": {"type": "object", "required": ["config", "version"]},
        "result": {},
        "ok": {"type": "boolean"},
    },
}

SCHEMAS = {
    "jet": JET,
    "laurent_symbol": LAURENT_SYMBOL,
    "phase_kernel": PHASE_KERNEL,
    "matrix": MATRIX,
    "split_input": SPLIT_INPUT,
    "symbol_on_c": SYMBOL_ON_C,
    "contact_form": CONTACT_FORM,
    "scenario": SCENARIO,
    "config": CONFIG,
    "report": REPORT,
}


class SchemaError(ValueError):
    def __init__(self, message: str, pointer: str):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer or "/"
        self.detail = message


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


def validate(doc, name: str):
    """Raise ``SchemaError`` for the most relevant violation of schema ``name``."""
    validator = jsonschema.Draft202012Validator(SCHEMAS[name])
    err = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    # descend into oneOf/anyOf branches for a concrete message
    while err is not None and err.context:
        err = jsonschema.exceptions.best_match(err.context)
    if err is not None:
        raise SchemaError(err.message, _pointer(err.absolute_path))
    return doc
