"""Problem documents: JSON schemas, loading, and construction of engine objects.

Rationals are always strings ``"p/q"`` or ``"p"``.  Indices in documents
are 1-based.  A coefficient of a torus matrix may also be the object
``{"liouville": J}``, standing for the exact truncation of depth J.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema

from .exactlin import GaussianRational, parse_rational
from .liealg import Metric, StructureConstants, Subalgebra
from .torus_arena import TorusStructure, liouville_slope
from .tube_perturb import FourierOneForm, TubeSystem


class ConfigError(ValueError):
    """Raised for documents that are malformed or describe invalid objects."""


RATIONAL = {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]*[1-9][0-9]*)?$"}
COMPLEX = {
    "oneOf": [
        RATIONAL,
        {"type": "object", "properties": {"re": RATIONAL, "im": RATIONAL},
         "additionalProperties": False},
    ]
}
RAT_ROW = {"type": "array", "items": RATIONAL, "minItems": 1}
INT_ROW = {"type": "array", "items": {"type": "integer"}, "minItems": 1}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["kind", "dim"],
    "additionalProperties": False,
    "properties": {
        "kind": {"const": "algebra"},
        "name": {"type": "string"},
        "dim": {"type": "integer", "minimum": 1},
        "brackets": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [
                {"type": "integer", "minimum": 1}, {"type": "integer", "minimum": 1},
                {"type": "integer", "minimum": 1}, RATIONAL], "minItems": 4, "maxItems": 4},
        },
        "metric": {"oneOf": [{"const": "identity"},
                             {"type": "array", "items": RAT_ROW, "minItems": 1}]},
        "subalgebras": {
            "type": "array",
            "items": {"type": "object", "required": ["name", "basis"],
                      "additionalProperties": False,
                      "properties": {"name": {"type": "string"},
                                     "basis": {"type": "array", "items": RAT_ROW, "minItems": 1},
                                     "expect_cohomology": {"type": "array",
                                                           "items": {"type": "integer"}}}},
        },
        "random_forms": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
    },
}

LIOUVILLE_ENTRY = {"type": "object", "required": ["liouville"], "additionalProperties": False,
                   "properties": {"liouville": {"type": "integer", "minimum": 1, "maximum": 9}}}

TORUS_SCHEMA = {
    "type": "object",
    "required": ["kind", "A"],
    "additionalProperties": False,
    "properties": {
        "kind": {"const": "torus"},
        "name": {"type": "string"},
        "A": {"type": "array", "minItems": 1,
              "items": {"type": "array", "minItems": 1,
                        "items": {"oneOf": [RATIONAL, LIOUVILLE_ENTRY]}}},
        "radius": {"type": "integer", "minimum": 0},
        "nu_max": {"type": "integer", "minimum": 1},
        "profile_radius": {"type": "integer", "minimum": 0},
        "eigenvalues": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "homotopy_samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "chain": {
            "type": "object", "required": ["q", "count"], "additionalProperties": False,
            "properties": {
                "q": {"type": "integer", "minimum": 0},
                "count": {"type": "integer", "minimum": 1},
                "denominators": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "liouville_denominators": {"type": "integer", "minimum": 1, "maximum": 9},
            },
        },
    },
}

TUBE_SCHEMA = {
    "type": "object",
    "required": ["kind", "base", "d", "forms"],
    "additionalProperties": False,
    "properties": {
        "kind": {"const": "tube"},
        "name": {"type": "string"},
        "base": {"const": "torus"},
        "d": {"type": "integer", "minimum": 1},
        "forms": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["constant"], "additionalProperties": False,
                      "properties": {
                          "constant": RAT_ROW,
                          "modes": {"type": "array", "items": {
                              "type": "object", "required": ["eta", "coeff"],
                              "additionalProperties": False,
                              "properties": {"eta": INT_ROW,
                                             "coeff": {"type": "array", "items": COMPLEX,
                                                       "minItems": 1}}}}}},
        },
        "radius": {"type": "integer", "minimum": 0},
    },
}

SCHEMAS = {"algebra": ALGEBRA_SCHEMA, "torus": TORUS_SCHEMA, "tube": TUBE_SCHEMA}


def bundled_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("invcohom.data").iterdir()
                  if p.name.endswith(".json"))


def load_document(source: str | Path) -> dict:
    """Read a JSON document from a path, or a bundled example by name."""
    path = Path(source)
    try:
        if path.is_file():
            text = path.read_text(encoding="utf-8")
        elif str(source) in bundled_names():
            text = resources.files("invcohom.data").joinpath(f"{source}.json").read_text("utf-8")
        else:
            raise ConfigError(f"no such file or bundled example: {source}")
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc


def validate(doc, kind: str | None = None) -> dict:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("document must be an object with a 'kind' field")
    if kind is not None and doc["kind"] != kind:
        raise ConfigError(f"expected kind '{kind}', got '{doc['kind']}'")
    schema = SCHEMAS.get(doc["kind"])
    if schema is None:
        raise ConfigError(f"unknown kind '{doc['kind']}'")
    if doc["kind"] == "tube" and doc.get("base") != "torus":
        raise ConfigError("only torus bases are supported")
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema violation at {where}: {exc.message}") from exc
    return doc


def load(source: str | Path, kind: str | None = None) -> dict:
    return validate(load_document(source), kind)


def build_algebra(doc: dict):
    """``(structure, metric, subalgebra entries)``; a missing list means the full algebra."""
    dim = doc["dim"]
    try:
        sc = StructureConstants.from_brackets(
            dim, [(i - 1, j - 1, k - 1, c) for i, j, k, c in doc.get("brackets", [])])
        metric_doc = doc.get("metric", "identity")
        metric = Metric.identity(dim) if metric_doc == "identity" else Metric.from_rows(metric_doc)
        if len(metric.gram) != dim:
            raise ConfigError("metric size does not match the algebra")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    subs = doc.get("subalgebras") or [
        {"name": "full", "basis": [[str(int(i == j)) for j in range(dim)] for i in range(dim)]}]
    return sc, metric, subs


def make_subalgebra(sc: StructureConstants, entry: dict) -> Subalgebra:
    try:
        return Subalgebra(sc, tuple(tuple(parse_rational(x) for x in row) for row in entry["basis"]))
    except ValueError as exc:
        raise ConfigError(f"subalgebra '{entry['name']}': {exc}") from exc


def _torus_entry(x):
    if isinstance(x, dict):
        return liouville_slope(x["liouville"])
    return parse_rational(x)


def build_torus(doc: dict) -> TorusStructure:
    try:
        return TorusStructure([[_torus_entry(x) for x in row] for row in doc["A"]],
                              doc.get("name"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def liouville_depth(doc: dict) -> int | None:
    depths = [x["liouville"] for row in doc["A"] for x in row if isinstance(x, dict)]
    return max(depths) if depths else None


def _complex(x) -> GaussianRational:
    if isinstance(x, str):
        return GaussianRational(parse_rational(x))
    return GaussianRational(parse_rational(x.get("re", "0")), parse_rational(x.get("im", "0")))


def build_tube(doc: dict) -> TubeSystem:
    d = doc["d"]
    forms = []
    try:
        for entry in doc["forms"]:
            modes = {}
            for item in entry.get("modes", []):
                eta = tuple(item["eta"])
                if eta in modes:
                    raise ConfigError(f"mode {list(eta)} listed twice")
                modes[eta] = [_complex(c) for c in item["coeff"]]
            forms.append(FourierOneForm(d, [parse_rational(a) for a in entry["constant"]], modes))
        return TubeSystem(tuple(forms))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
