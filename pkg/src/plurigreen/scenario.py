"""JSON scenarios: schema, presets and complex-number (de)serialization."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from ._base import DomainError, ParameterRangeError
from .indicators import PSI_0, Indicator, PoleSystem, s_system, simple_system

SCHEMA_VERSION = 1
GRID_CAP = 10_000
PRESETS = ("one_pole", "thm51", "a0bv", "avbv", "nocoman", "thm63", "thm55")

_COMPLEX = {
    "type": "object",
    "properties": {"re": {"type": "number"}, "im": {"type": "number"}},
    "required": ["re", "im"],
    "additionalProperties": False,
}
_POINT = {"type": "array", "items": _COMPLEX, "minItems": 1}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "dim": {"type": "integer", "minimum": 1},
        "preset": {"enum": list(PRESETS)},
        "poles": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "point": _POINT,
                    "indicator": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
                },
                "required": ["point", "indicator"],
                "additionalProperties": False,
            },
        },
        "points": {"type": "array", "items": _POINT},
        "grid": {
            "type": "object",
            "properties": {
                "base": _POINT,
                "vary": {"type": "integer", "minimum": 0},
                "n_radial": {"type": "integer", "minimum": 0},
                "n_angular": {"type": "integer", "minimum": 0},
                "radius": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.9},
            },
            "required": ["n_radial", "n_angular"],
            "additionalProperties": False,
        },
        "optimizer": {
            "type": "object",
            "properties": {
                "enabled": {"type": "boolean"},
                "budget": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer", "minimum": 0},
                "degree": {"type": ["integer", "null"], "minimum": 1},
                "restarts": {"type": "integer", "minimum": 1},
                "workers": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "eps": {"type": "array", "items": _COMPLEX},
        "a": {"type": "number"},
        "gamma": _COMPLEX,
    },
    "required": ["version"],
    "additionalProperties": False,
}


def cx_to_json(x) -> dict:
    x = complex(x)
    return {"re": x.real, "im": x.imag}


def cx_from_json(d) -> complex:
    return complex(d["re"], d["im"])


def point_to_json(p) -> list[dict]:
    return [cx_to_json(x) for x in p]


def point_from_json(p) -> tuple[complex, ...]:
    return tuple(cx_from_json(d) for d in p)


@dataclass
class Scenario:
    """A validated scenario; ``raw`` is the normalized JSON echo."""

    raw: dict
    system: PoleSystem | None
    points: list[tuple[complex, ...]]
    grid: dict | None
    optimizer: dict = field(default_factory=dict)
    eps: list[complex] = field(default_factory=list)
    preset: str | None = None
    a: float = 0.5
    gamma: complex | None = None


def validate(data: Any) -> dict:
    """Schema check; an output document with a ``scenario`` echo is unwrapped first."""
    if isinstance(data, dict) and "scenario" in data and "rows" in data:
        data = data["scenario"]
    jsonschema.validate(data, SCHEMA)
    return data


def preset_system(name: str, a: float = 0.5, eps: complex = 1e-3) -> PoleSystem:
    """Pole systems behind the named presets (``b = -a`` throughout)."""
    a = float(a)
    if not 0.0 < abs(a) < 1.0:
        raise ParameterRangeError("a must satisfy 0 < |a| < 1")
    b = -a
    if name == "one_pole":
        return PoleSystem((((0.3 + 0.1j, -0.2), Indicator((1, 2))),))
    if name == "thm51":
        return PoleSystem((((a, 0), PSI_0), ((b, 0), PSI_0)))
    if name == "a0bv":
        return s_system(a, b, "0V")
    if name == "avbv":
        return s_system(a, b, "VV")
    if eps == 0 or abs(eps) > 0.1:
        raise DomainError("eps must be nonzero with |eps| <= 0.1")
    if name in ("nocoman", "thm63"):
        return simple_system([(a, 0), (b, 0), (b, eps), (a, eps)])
    if name == "thm55":
        return simple_system([(a, 0), (b, 0), (b, eps)])
    raise DomainError(f"unknown preset {name!r}")


def default_gamma(preset: str | None) -> complex:
    return 0.3 if preset == "thm63" else 0.4


def default_point(preset: str | None) -> tuple[complex, ...]:
    if preset == "one_pole":
        return (0.1, 0.4)
    return (0j, default_gamma(preset))


def grid_points(grid: dict, dim: int, default_base) -> list[tuple[complex, ...]]:
    """Polar grid in coordinate ``vary`` (default last): radii ``k R / n_radial``, ``k = 1..n_radial``."""
    nr, na = int(grid["n_radial"]), int(grid["n_angular"])
    if nr * na > GRID_CAP:
        raise DomainError(f"grid has {nr * na} points; the cap is {GRID_CAP}")
    base = point_from_json(grid["base"]) if "base" in grid else tuple(default_base)
    if len(base) != dim:
        raise DomainError("grid base has the wrong dimension")
    vary = int(grid.get("vary", dim - 1))
    if vary >= dim:
        raise DomainError("grid coordinate index out of range")
    R = float(grid.get("radius", 0.9))
    out = []
    for k in range(1, nr + 1):
        for j in range(na):
            w = R * k / nr * np.exp(2j * math.pi * j / na)
            p = list(base)
            p[vary] = complex(w)
            out.append(tuple(p))
    return out


def load(data: Any, overrides: dict | None = None) -> Scenario:
    """Validate ``data`` (a dict or JSON text) and apply command-line overrides."""
    if isinstance(data, str):
        data = json.loads(data)
    data = validate(data)
    raw = json.loads(json.dumps(data))
    for k, v in (overrides or {}).items():
        if v is None:
            continue
        if k in ("budget", "seed", "degree", "restarts", "workers", "enabled"):
            raw.setdefault("optimizer", {})[k] = v
        elif k == "gamma":
            raw["gamma"] = cx_to_json(v)
        else:
            raw[k] = v
    jsonschema.validate(raw, SCHEMA)

    preset = raw.get("preset")
    a = float(raw.get("a", 0.5))
    eps = [cx_from_json(e) for e in raw.get("eps", [])]
    gamma = cx_from_json(raw["gamma"]) if "gamma" in raw else None
    if "poles" in raw:
        poles = []
        for p in raw["poles"]:
            pt = point_from_json(p["point"])
            if len(pt) != len(p["indicator"]):
                raise DomainError("pole point and indicator lengths differ")
            poles.append((pt, Indicator(tuple(p["indicator"]))))
        system = PoleSystem(tuple(poles))
    elif preset is not None:
        system = preset_system(preset, a, eps[0] if eps else 1e-3)
    else:
        system = None
    if system is not None and "dim" in raw and raw["dim"] != system.dim:
        raise DomainError("dim does not match the pole points")
    dim = system.dim if system is not None else raw.get("dim", 2)
    if "points" in raw:
        points = [point_from_json(p) for p in raw["points"]]
    elif gamma is not None:
        points = [(0j, gamma)]
    else:
        points = [default_point(preset)]
    for p in points:
        if len(p) != dim:
            raise DomainError("evaluation point has the wrong dimension")
    return Scenario(raw, system, points, raw.get("grid"), raw.get("optimizer", {}), eps, preset, a, gamma)


def preset_scenario(name: str) -> dict:
    """Minimal scenario document for a preset."""
    return {"version": SCHEMA_VERSION, "preset": name}
