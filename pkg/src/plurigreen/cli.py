"""Command-line front end.

Usage::

    plurigreen green --preset thm51 --gamma 0.4
    plurigreen lempert --scenario s.json --format csv
    plurigreen tilde --preset avbv --seed 3
    plurigreen collide --preset thm63 --a 0.5 --gamma 0.3
    plurigreen counterexample --a 0.5 --gamma 0.4
    plurigreen grid --preset avbv --out grid.csv

Exit codes: 0 success, 2 schema or validation error, 3 unsupported
configuration, 4 parameter out of range. Errors are reported on stderr as
one JSON line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

import jsonschema

from ._base import (
    DomainError,
    ParameterRangeError,
    PlurigreenError,
    UnsupportedConfiguration,
    is_neg_inf,
)
from .collisions import (
    DEFAULT_SCHEDULE,
    counterexample_report,
    four_pole_scenario,
    sweep,
    three_pole_scenario,
)
from .green import green_value
from .lempert import LempertOptions, lempert_upper, sandwich, tilde_upper
from .scenario import (
    PRESETS,
    SCHEMA_VERSION,
    Scenario,
    cx_to_json,
    default_point,
    grid_points,
    load,
    preset_scenario,
)

EXIT_OK, EXIT_FAIL, EXIT_SCHEMA, EXIT_UNSUPPORTED, EXIT_RANGE = 0, 1, 2, 3, 4


# ---------------------------------------------------------------------------
# formatting


def _num(x) -> float | None:
    if x is None or is_neg_inf(x):
        return None
    return float(x)


def _flatten(row: dict) -> dict:
    # complex entries become <name>_re / <name>_im columns
    out = {}
    for k, v in row.items():
        if isinstance(v, complex):
            out[k + "_re"], out[k + "_im"] = v.real, v.imag
        else:
            out[k] = v
    return out


def _fmt(v, digits: int) -> str:
    if v is None:
        return "n/a"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.{digits}g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, complex):
        return cx_to_json(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def render(command: str, scenario_raw: dict, rows: Sequence[dict], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        doc = {"command": command, "scenario": scenario_raw, "rows": [_jsonable(r) for r in rows]}
        if extra:
            doc.update(_jsonable(extra))
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    flat = [_flatten(r) for r in rows]
    header = list(flat[0]) if flat else list(_flatten(_empty_row(command)))
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(header)
        for r in flat:
            w.writerow([_fmt(r.get(h), 15) for h in header])
        return buf.getvalue()
    cells = [header] + [[_fmt(r.get(h), 8) for h in header] for r in flat]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c[i].ljust(widths[i]) for i in range(len(header))).rstrip() for c in cells]
    if extra:
        for k, v in extra.items():
            lines.append(f"# {k}: {_fmt(v, 8) if not isinstance(v, (dict, list)) else json.dumps(_jsonable(v))}")
    return "\n".join(lines) + "\n"


def _empty_row(command: str) -> dict:
    if command == "grid":
        return {"z1": 0j, "z2": 0j, "green": None, "lempert_upper": None, "tilde_upper": None, "gap": None, "region": ""}
    return {"z1": 0j, "z2": 0j}


# ---------------------------------------------------------------------------
# commands


def _options(scn: Scenario, enabled_default: bool = True, restarts_default: int = 6) -> LempertOptions:
    o = scn.optimizer
    return LempertOptions(
        optimizer=o.get("enabled", enabled_default),
        budget=o.get("budget", 3000),
        restarts=o.get("restarts", restarts_default),
        seed=o.get("seed", 0),
        degree=o.get("degree"),
        workers=o.get("workers", 1),
    )


def _z_cols(z) -> dict:
    return {f"z{k + 1}": complex(x) for k, x in enumerate(z)}


def _need_system(scn: Scenario):
    if scn.system is None:
        raise DomainError("scenario needs 'poles' or a 'preset'")
    return scn.system


def cmd_green(scn: Scenario) -> list[dict]:
    system = _need_system(scn)
    rows = []
    for z in scn.points:
        g = green_value(z, system)
        rows.append({**_z_cols(z), "green": _num(g.value), "branch": "pole" if is_neg_inf(g.value) else g.active_branch})
    return rows


def _green_cols(z, system):
    try:
        g = green_value(z, system)
    except UnsupportedConfiguration:
        return None, "n/a"
    return _num(g.value), g.active_branch


def cmd_lempert(scn: Scenario) -> list[dict]:
    system = _need_system(scn)
    opts = _options(scn)
    rows = []
    for z in scn.points:
        rep = lempert_upper(z, system, opts)
        g, branch = _green_cols(z, system)
        res = rep.best.info["feasibility"].residual if rep.best is not None else None
        rows.append(
            {
                **_z_cols(z),
                "green": g,
                "branch": branch,
                "lempert_upper": rep.value,
                "method": rep.method,
                "residual": res,
                "gap": None if g is None or rep.value is None else rep.value - g,
            }
        )
    return rows


def cmd_tilde(scn: Scenario) -> list[dict]:
    system = _need_system(scn)
    opts = _options(scn)
    rows = []
    for z in scn.points:
        rep = tilde_upper(z, system, opts)
        g, branch = _green_cols(z, system)
        res = rep.best.info["feasibility"].residual if rep.best is not None else None
        rows.append(
            {
                **_z_cols(z),
                "green": g,
                "branch": branch,
                "tilde_upper": rep.value,
                "method": rep.method,
                "residual": res,
                "gap": None if g is None or rep.value is None else rep.value - g,
            }
        )
    return rows


def _region(z, a: float) -> str:
    # hypothesis region of the four-pole counterexample, for points (0, gamma)
    if len(z) == 2 and z[0] == 0 and abs(a) ** 1.5 < abs(z[1]) < abs(a):
        return "a^1.5<|gamma|<a"
    return ""


def cmd_grid(scn: Scenario) -> list[dict]:
    system = _need_system(scn)
    grid = scn.grid or {"n_radial": 20, "n_angular": 20}
    opts = _options(scn, enabled_default=False)
    rows = []
    for z in grid_points(grid, system.dim, default_point(scn.preset)):
        row = _z_cols(z)
        if any(all(x == y for x, y in zip(z, p)) for p in system.points):
            row.update({"green": None, "lempert_upper": None, "tilde_upper": None, "gap": None, "region": "pole"})
            rows.append(row)
            continue
        g, tilde, own = sandwich(z, system, opts)
        gv = None if g is None else _num(g.value)
        row.update(
            {
                "green": gv,
                "lempert_upper": own.value,
                "tilde_upper": tilde.value,
                "gap": None if gv is None or own.value is None else own.value - gv,
                "region": _region(z, scn.a) if scn.preset in ("avbv", "nocoman", "thm63") else "",
            }
        )
        rows.append(row)
    return rows


def cmd_collide(scn: Scenario) -> list[dict]:
    if scn.preset not in ("thm55", "thm63", "nocoman"):
        raise DomainError("collide needs preset thm55 (three poles), thm63 or nocoman (four poles)")
    eps = tuple(scn.eps) if scn.eps else DEFAULT_SCHEDULE
    for e in eps:
        if e == 0:
            raise DomainError("eps = 0 is not allowed in a collision schedule")
    opts = _options(scn)
    if scn.preset == "thm55":
        z = scn.points[0] if "points" in scn.raw else (0j, scn.gamma if scn.gamma is not None else 0.4)
        col = three_pole_scenario(scn.a, -scn.a, z, eps, opts)
    else:
        gamma = scn.gamma if scn.gamma is not None else (0.3 if scn.preset == "thm63" else 0.4)
        col = four_pole_scenario(scn.a, gamma, eps, opts)
    rows = []
    for r in sweep(col, opts.workers):
        rows.append(
            {
                "eps": r.eps,
                "r": r.r,
                "objective": r.objective,
                "correction_objective": r.correction_objective,
                "residual": r.residual,
                "green_eps": _num(r.green_eps.value),
                "gap": r.gap,
                "method": r.method,
                "notice": r.notice or "",
            }
        )
    return rows


def cmd_counterexample(scn: Scenario) -> tuple[list[dict], dict]:
    gamma = scn.gamma if scn.gamma is not None else 0.4
    eps = tuple(scn.eps) if scn.eps else (1e-2, 1e-3)
    opts = _options(scn, restarts_default=50)
    rep = counterexample_report(scn.a, gamma, eps, opts)
    rows = []
    for r in rep.rows:
        rows.append(
            {
                "eps": r.eps,
                "green_eps": _num(r.green_eps.value),
                "best_upper": r.best_objective,
                "best_method": r.best_method,
                "candidates": r.n_candidates,
                "min_objective": r.min_objective,
                "chain_holds": r.chain_holds,
                "pattern_candidates": len(r.certificates),
                "certificates_hold": r.certificates_hold,
                "gap": r.gap,
            }
        )
    extra = {
        "green_limit": rep.green_limit,
        "tilde_reference": rep.tilde_reference,
        "statement": rep.statement,
    }
    return rows, extra


COMMANDS = {
    "green": cmd_green,
    "lempert": cmd_lempert,
    "tilde": cmd_tilde,
    "collide": cmd_collide,
    "counterexample": cmd_counterexample,
    "grid": cmd_grid,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plurigreen", description="Green and Lempert functions with poles in the polydisc.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--scenario", help="JSON scenario file")
        s.add_argument("--preset", choices=PRESETS)
        s.add_argument("--format", choices=("human", "csv", "json"), default="csv" if name == "grid" else "human")
        s.add_argument("--seed", type=int)
        s.add_argument("--budget", type=int, help="function evaluations per restart")
        s.add_argument("--restarts", type=int)
        s.add_argument("--degree", type=int, help="cap on the degree of optimizer discs")
        s.add_argument("--workers", type=int)
        s.add_argument("--a", type=float)
        s.add_argument("--gamma", type=float, help="z = (0, gamma) for preset commands")
        s.add_argument("--out", help="write output here instead of stdout")
        if name == "grid":
            s.add_argument("--optimize", action="store_true", help="add the node search to the constructors")
        else:
            s.add_argument("--no-optimize", action="store_true", help="constructors only")
    return p


def _error(code: int, kind: str, msg: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit": code, "reason": " ".join(str(msg).split())}) + "\n")
    return code


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario:
            with open(args.scenario, encoding="utf-8") as fh:
                data: Any = json.load(fh)
        else:
            data = preset_scenario(args.preset) if args.preset else {"version": SCHEMA_VERSION}
        enabled = None
        if getattr(args, "optimize", False):
            enabled = True
        if getattr(args, "no_optimize", False):
            enabled = False
        overrides = {
            "preset": args.preset,
            "a": args.a,
            "gamma": args.gamma,
            "seed": args.seed,
            "budget": args.budget,
            "restarts": args.restarts,
            "degree": args.degree,
            "workers": args.workers,
            "enabled": enabled,
        }
        scn = load(data, overrides)
        out = COMMANDS[args.command](scn)
        rows, extra = out if isinstance(out, tuple) else (out, None)
        text = render(args.command, scn.raw, rows, args.format, extra)
    except (jsonschema.ValidationError, json.JSONDecodeError) as exc:
        return _error(EXIT_SCHEMA, "schema", getattr(exc, "message", str(exc))), ""
    except ParameterRangeError as exc:
        return _error(EXIT_RANGE, "range", exc), ""
    except UnsupportedConfiguration as exc:
        return _error(EXIT_UNSUPPORTED, "unsupported", exc), ""
    except (DomainError, OSError) as exc:
        return _error(EXIT_SCHEMA, "validation", exc), ""
    except PlurigreenError as exc:
        return _error(EXIT_FAIL, type(exc).__name__, exc), ""
    return EXIT_OK, text


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code, text = run(argv)
    if code == EXIT_OK:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
