"""Scenario files: JSON in, JSON out."""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .errors import ScenarioValidationError
from .geometry import Field, Scenario, Trajectory


def _number(x, exact: bool, where: str):
    if isinstance(x, bool) or not isinstance(x, (int, float, Decimal)):
        raise ScenarioValidationError(f"expected a number, got {x!r}", where)
    if exact:
        return Fraction(x) if isinstance(x, Decimal) else Fraction(x)
    return float(x)


def scenario_from_dict(obj: dict) -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioValidationError("top level must be an object")
    for key in ("dimension", "domain", "sensors"):
        if key not in obj:
            raise ScenarioValidationError("missing required key", key)
    try:
        field = Field(obj.get("field", "gf2"))
    except ValueError:
        raise ScenarioValidationError(f"unknown field {obj.get('field')!r}", "field") from None
    exact = field is Field.RATIONAL
    d = obj["dimension"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise ScenarioValidationError("must be an integer", "dimension")
    dom = obj["domain"]
    if not isinstance(dom, dict) or "min" not in dom or "max" not in dom:
        raise ScenarioValidationError("must be an object with min and max", "domain")
    lo = tuple(_number(x, exact, "domain.min") for x in dom["min"])
    hi = tuple(_number(x, exact, "domain.max") for x in dom["max"])
    sensors = []
    for k, s in enumerate(obj["sensors"]):
        where = f"sensors[{k}]"
        if not isinstance(s, dict):
            raise ScenarioValidationError("must be an object", where)
        for key in ("id", "radius", "waypoints"):
            if key not in s:
                raise ScenarioValidationError(f"missing {key!r}", where)
        wps = []
        for j, w in enumerate(s["waypoints"]):
            if not isinstance(w, list) or len(w) != d + 1:
                raise ScenarioValidationError(f"waypoint must be [t, x_1..x_{d}]", f"{where}.waypoints[{j}]")
            vals = [_number(x, exact, f"{where}.waypoints[{j}]") for x in w]
            wps.append((vals[0], tuple(vals[1:])))
        sensors.append(Trajectory(str(s["id"]), _number(s["radius"], exact, f"{where}.radius"),
                                  bool(s.get("fence", False)), tuple(wps)))
    grid = obj.get("grid")
    if grid is not None and (not isinstance(grid, int) or isinstance(grid, bool)):
        raise ScenarioValidationError("must be an integer", "grid")
    return Scenario(d, lo, hi, tuple(sensors), field, grid)


def loads_scenario(text: str) -> Scenario:
    try:
        obj = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(obj)


def load_scenario(path) -> Scenario:
    return loads_scenario(Path(path).read_text())


def _plain(x):
    if isinstance(x, Fraction):
        return float(x) if x.denominator != 1 else int(x)
    return x


def scenario_to_dict(sc: Scenario) -> dict:
    out = {
        "dimension": sc.dimension,
        "domain": {"min": [_plain(x) for x in sc.domain_min], "max": [_plain(x) for x in sc.domain_max]},
        "field": sc.field.value,
        "sensors": [{"id": s.sensor_id, "radius": _plain(s.radius), "fence": s.fence,
                     "waypoints": [[_plain(t)] + [_plain(x) for x in p] for t, p in s.waypoints]}
                    for s in sc.sensors],
    }
    if sc.grid is not None:
        out["grid"] = sc.grid
    return out


def dump_scenario(sc: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2))
