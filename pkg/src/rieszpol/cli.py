"""Command-line front end.

Config handling, experiment orchestration, and deterministic report files.
Flags and config files share one key grammar and one validator, so a
diagnostic always names the offending key (and line, for files).  Reports
are JSON with a fixed schema; tables additionally go out as CSV and as
two-column plot data.  Wall time is printed to stdout only: report files
must be byte-identical across repeated runs and thread counts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from . import asymptotics, density, energymin, geometry, polarization
from .geometry import descriptor_hash, format_set_spec, parse_set_spec
from .seeds import derive_seed

SCHEMA = "rieszpol-report/1"

_STOCHASTIC = {"solve", "energy", "equidist", "bound-check"}

# key -> commands that accept it; "required" handled per command below
_KEYS = {
    "command": None,
    "set": {"solve", "energy", "oracle", "asymptotics", "equidist", "alpha"},
    "n": {"solve", "energy", "oracle", "asymptotics", "equidist"},
    "s": {"solve", "energy", "oracle", "asymptotics"},
    "seed": {"solve", "energy", "oracle", "asymptotics", "equidist",
             "bound-check"},
    "strategy": {"solve", "equidist"},
    "restarts": {"solve", "energy", "asymptotics", "equidist"},
    "grid": {"solve", "oracle"},
    "source": {"asymptotics"},
    "quantity": {"asymptotics"},
    "family": {"equidist"},
    "epsilons": {"alpha"},
    "mode": {"alpha"},
    "samples": {"alpha", "bound-check"},
    "rtol": {"bound-check"},
    "output": set(_STOCHASTIC) | {"oracle", "asymptotics", "alpha"},
    "csv": {"asymptotics"},
    "plotdata": {"asymptotics"},
}

_REQUIRED = {
    "solve": ("set", "n"),
    "energy": ("set", "n"),
    "oracle": ("set", "n", "grid"),
    "asymptotics": ("set", "n"),
    "equidist": ("set", "n"),
    "alpha": ("set",),
    "bound-check": (),
}

COMMANDS = tuple(sorted(_REQUIRED))


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated inputs of one CLI run (one command plus its keys)."""

    command: str
    set_spec: str | None = None
    n: tuple | None = None
    s: float | None = None
    seed: int | None = None
    strategy: str | None = None
    restarts: int | None = None
    grid: int | None = None
    source: str | None = None
    quantity: str | None = None
    family: str | None = None
    epsilons: tuple | None = None
    mode: str | None = None
    samples: int | None = None
    rtol: float | None = None
    output: str | None = None
    csv: str | None = None
    plotdata: str | None = None


# field name <-> config key ("set" is a Python builtin-ish name, keep both)
_FIELD_OF_KEY = {"set": "set_spec"}
_KEY_OF_FIELD = {"set_spec": "set"}


def _where(line: int | None) -> str:
    return f" (line {line})" if line is not None else ""


def _parse_int(key: str, text: str, line, low: int = 0) -> int:
    try:
        v = int(text)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got "
                          f"{text!r}{_where(line)}") from None
    if v < low:
        raise ConfigError(f"key '{key}': must be >= {low}{_where(line)}")
    return v


def _parse_float(key: str, text: str, line, positive: bool = False) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got "
                          f"{text!r}{_where(line)}") from None
    if positive and not v > 0:
        raise ConfigError(f"key '{key}': must be positive{_where(line)}")
    return v


def _parse_n(key: str, text: str, line) -> tuple:
    """N values: '8', '64,128,256' (ascending), or '64..8192' (doubling)."""
    text = text.strip()
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo = _parse_int(key, lo_s, line, low=1)
        hi = _parse_int(key, hi_s, line, low=1)
        vals, v = [], lo
        while v < hi:
            vals.append(v)
            v *= 2
        if v != hi:
            raise ConfigError(f"key '{key}': range end {hi} is not reached "
                              f"by doubling from {lo}{_where(line)}")
        vals.append(hi)
        return tuple(vals)
    vals = tuple(_parse_int(key, p, line, low=1) for p in text.split(","))
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"key '{key}': values must be strictly "
                          f"ascending{_where(line)}")
    return vals


def _parse_epsilons(key: str, text: str, line) -> tuple:
    vals = tuple(_parse_float(key, p, line, positive=True)
                 for p in text.split(","))
    if any(b >= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"key '{key}': schedule must be strictly "
                          f"decreasing{_where(line)}")
    return vals


def _one_of(key: str, text: str, line, options) -> str:
    if text not in options:
        raise ConfigError(f"key '{key}': expected one of "
                          f"{', '.join(sorted(options))}; got "
                          f"{text!r}{_where(line)}")
    return text


def _validate(items) -> RunConfig:
    """items: list of (key, raw value, line number or None)."""
    seen: dict[str, tuple] = {}
    for key, raw, line in items:
        if key not in _KEYS:
            raise ConfigError(f"unknown key '{key}'{_where(line)}")
        if key in seen:
            raise ConfigError(f"duplicate key '{key}'{_where(line)}")
        seen[key] = (raw, line)
    if "command" not in seen:
        raise ConfigError("missing required key 'command'")
    command, cline = seen.pop("command")
    if command not in _REQUIRED:
        raise ConfigError(f"unknown command {command!r}; expected one of "
                          f"{', '.join(COMMANDS)}{_where(cline)}")

    for key, (_raw, line) in seen.items():
        if command not in _KEYS[key]:
            raise ConfigError(f"key '{key}' does not apply to command "
                              f"'{command}'{_where(line)}")
    for key in _REQUIRED[command]:
        if key not in seen:
            raise ConfigError(f"command '{command}' requires key '{key}'")
    if command in _STOCHASTIC and "seed" not in seen:
        raise ConfigError(f"command '{command}' is stochastic: "
                          "key 'seed' is required")

    out: dict = {"command": command}
    for key, (raw, line) in seen.items():
        field_name = _FIELD_OF_KEY.get(key, key)
        if key == "set":
            try:
                desc = parse_set_spec(raw)
            except ValueError as e:
                raise ConfigError(f"key 'set': {e}{_where(line)}") from None
            out[field_name] = format_set_spec(desc)
        elif key == "n":
            out[field_name] = _parse_n(key, raw, line)
        elif key in ("seed", "restarts", "grid", "samples"):
            low = {"restarts": 1, "grid": 2, "samples": 1}.get(key, 0)
            out[field_name] = _parse_int(key, raw, line, low=low)
        elif key == "s":
            out[field_name] = _parse_float(key, raw, line, positive=True)
        elif key == "rtol":
            out[field_name] = _parse_float(key, raw, line, positive=True)
        elif key == "epsilons":
            out[field_name] = _parse_epsilons(key, raw, line)
        elif key == "strategy":
            out[field_name] = _one_of(key, raw, line, polarization.STRATEGIES)
        elif key == "source":
            out[field_name] = _one_of(key, raw, line, ("analytic", "solver"))
        elif key == "quantity":
            out[field_name] = _one_of(key, raw, line,
                                      ("polarization", "energy", "chebyshev"))
        elif key == "mode":
            out[field_name] = _one_of(key, raw, line,
                                      ("auto", "grid", "exact"))
        elif key == "family":
            out[field_name] = raw
        else:                       # output / csv / plotdata paths
            out[field_name] = raw

    cfg = RunConfig(**out)
    if cfg.command in ("solve", "energy", "oracle") and len(cfg.n) != 1:
        raise ConfigError(f"command '{cfg.command}' takes a single n, got "
                          f"{len(cfg.n)} values")
    if cfg.command == "asymptotics":
        if (cfg.source or "solver") == "solver" and cfg.seed is None:
            raise ConfigError("asymptotics with source=solver is "
                              "stochastic: key 'seed' is required")
        if cfg.s is not None and (cfg.quantity or "polarization") != "chebyshev":
            raise ConfigError("key 's' applies only to quantity=chebyshev; "
                              "polarization and energy tables run at s = d")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse 'key = value' lines ('#' comments) into a validated RunConfig."""
    items = []
    for ln, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ConfigError(f"expected 'key = value' (line {ln}): "
                              f"{rawline.strip()!r}")
        items.append((key.strip(), value.strip(), ln))
    return _validate(items)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical config text; parse_config(serialize_config(c)) == c."""
    lines = [f"command = {cfg.command}"]
    for f in fields(RunConfig):
        if f.name == "command":
            continue
        v = getattr(cfg, f.name)
        if v is None:
            continue
        key = _KEY_OF_FIELD.get(f.name, f.name)
        if f.name in ("n", "epsilons"):
            v = ",".join(repr(x) if isinstance(x, float) else str(x)
                         for x in v)
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# report plumbing


def _sanitize(obj):
    """JSON-safe copy: numpy to native, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__} in a report")


def render_report(cfg: RunConfig, payload: dict) -> str:
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": cfg.command,
        "config": serialize_config(cfg),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "payload": payload,
    }
    return json.dumps(_sanitize(report), indent=2, sort_keys=True,
                      allow_nan=False) + "\n"


def _fmt(x: float) -> str:
    return asymptotics._fmt(x)


def emit_plotdata(table) -> str:
    """Two-column (N, ratio) lines plus a final target line.

    An infinite target has no horizontal asymptote to draw; its row is
    replaced by a comment saying so.
    """
    if not table.rows:
        raise ValueError("empty table has no plot data")
    lines = [f"{n} {_fmt(ratio)}" for n, _v, ratio in table.rows]
    if math.isinf(table.target):
        lines.append("# target omitted: the normalized limit is infinite")
    else:
        lines.append(f"target {_fmt(table.target)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# command runners: each returns (payload, converged, extra files)


def _circle_gaps(desc, X) -> list:
    """Sorted angular gaps of a configuration on a circle."""
    ts = sorted(geometry.param_of(desc, x)[-1] for x in np.asarray(X))
    gaps = [b - a for a, b in zip(ts, ts[1:])]
    gaps.append(ts[0] + 2.0 * math.pi - ts[-1])
    return sorted(gaps)


def _solve_payload(rep) -> dict:
    payload = {
        "set": format_set_spec(rep.home),
        "set_hash": descriptor_hash(rep.home),
        "n": rep.n,
        "s": rep.s,
        "strategy": rep.strategy,
        "seed": rep.seed,
        "restarts": rep.restarts,
        "value": rep.value,
        "witness": list(rep.witness),
        "points": np.asarray(rep.config),
        "restart_values": list(rep.restart_values),
        "iterations": rep.iterations,
        "converged": rep.converged,
        "grid_restricted": rep.grid_restricted,
    }
    if rep.home.kind == "circle":
        payload["gaps"] = _circle_gaps(rep.home, rep.config)
    return payload


def _run_solve(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    kw = dict(strategy=cfg.strategy or "smoothed_ascent", seed=cfg.seed,
              restarts=cfg.restarts or 16)
    if cfg.grid is not None:
        kw["grid"] = geometry.sample(desc, cfg.grid)
    rep = polarization.solve(desc, cfg.n[0], cfg.s, **kw)
    return _solve_payload(rep), rep.converged, {}


def _run_oracle(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    grid = geometry.sample(desc, cfg.grid)
    rep = polarization.oracle_solve(desc, cfg.n[0],
                                    cfg.s if cfg.s is not None else float(desc.d),
                                    grid)
    payload = _solve_payload(rep)
    payload["grid_size"] = cfg.grid
    return payload, True, {}


def _run_energy(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    rep = energymin.minimize(desc, cfg.n[0], cfg.s, seed=cfg.seed,
                             restarts=cfg.restarts or 4)
    payload = {
        "set": format_set_spec(desc),
        "set_hash": descriptor_hash(desc),
        "n": rep.n,
        "s": rep.s,
        "seed": rep.seed,
        "restarts": rep.restarts,
        "value": rep.value,
        "points": rep.config.points,
        "restart_values": list(rep.restart_values),
        "iterations": rep.iterations,
        "converged": rep.converged,
    }
    return payload, rep.converged, {}


def _table_payload(table) -> dict:
    payload = {
        "set": format_set_spec(table.home),
        "set_hash": descriptor_hash(table.home),
        "s": table.s,
        "normalization": table.normalization,
        "source": table.source,
        "seed": table.seed,
        "target": table.target,
        "rows": [list(r) for r in table.rows],
        "lower_bound": table.lower_bound,
        "liminf_estimate": table.liminf_estimate,
        "limsup_estimate": table.limsup_estimate,
        "fit": table.extrapolated,
        "consistency": asymptotics.lower_bound_report(table),
    }
    return payload


def _run_asymptotics(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    quantity = cfg.quantity or "polarization"
    source = cfg.source or "solver"
    lib_source = "analytic_circle" if source == "analytic" else "solver"
    seed = cfg.seed if cfg.seed is not None else 0
    opts = {"restarts": cfg.restarts} if cfg.restarts else None
    try:
        if quantity == "polarization":
            table = asymptotics.polarization_ratio_table(
                desc, cfg.n, lib_source, seed, solver_opts=opts)
        elif quantity == "energy":
            table = energymin.energy_ratio_table(
                desc, cfg.n, lib_source, seed,
                restarts=cfg.restarts or 4)
        else:
            table = asymptotics.chebyshev_ratio_table(
                desc, cfg.s if cfg.s is not None else float(desc.d),
                cfg.n, lib_source, seed, solver_opts=opts)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    payload = _table_payload(table)
    payload["quantity"] = quantity
    extra = {}
    stem = _output_path(cfg)
    stem = stem[:-5] if stem.endswith(".json") else stem
    extra[cfg.csv or stem + ".csv"] = asymptotics.to_csv(table)
    if cfg.plotdata:
        extra[cfg.plotdata] = emit_plotdata(table)
    return payload, True, extra


def _run_equidist(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    reports = []
    for n in cfg.n:
        reports.append(polarization.solve(
            desc, n, strategy=cfg.strategy or "smoothed_ascent",
            seed=derive_seed(cfg.seed, n), restarts=cfg.restarts or 8))
    out = density.equidistribution_report(
        reports, family=cfg.family or "partition:32", seed=cfg.seed)
    out["counts"] = [
        {"n": c.n, "max_deviation": c.max_deviation,
         "rows": [list(row) for row in c.rows]}
        for c in out["counts"]
    ]
    payload = {
        "set": format_set_spec(desc),
        "set_hash": descriptor_hash(desc),
        "seed": cfg.seed,
        "values": {str(r.n): r.value for r in reports},
    }
    payload.update(out)
    return payload, all(r.converged for r in reports), {}


def _run_alpha(cfg: RunConfig):
    desc = parse_set_spec(cfg.set_spec)
    samples = cfg.samples or 64
    out = density.alpha_limit_check(
        desc, schedule=cfg.epsilons or (0.5, 0.1, 0.01),
        x_samples=samples, r_samples=samples, mode=cfg.mode or "auto")
    payload = {"set": format_set_spec(desc),
               "set_hash": descriptor_hash(desc)}
    payload.update(out)
    return payload, True, {}


def _run_bound_check(cfg: RunConfig):
    out = density.lemma_bound_suite(cfg.samples or 200, cfg.seed,
                                    rtol=cfg.rtol or 1e-6)
    # wall time stays out of the report file (byte-determinism)
    out.pop("elapsed")
    return out, out["all_converged"], {}


_RUNNERS = {
    "solve": _run_solve,
    "energy": _run_energy,
    "oracle": _run_oracle,
    "asymptotics": _run_asymptotics,
    "equidist": _run_equidist,
    "alpha": _run_alpha,
    "bound-check": _run_bound_check,
}


def _output_path(cfg: RunConfig) -> str:
    return cfg.output or f"rieszpol-{cfg.command}.json"


def run(cfg: RunConfig) -> int:
    """Execute a validated config; write report files; return exit code."""
    t0 = time.perf_counter()
    payload, converged, extra = _RUNNERS[cfg.command](cfg)
    path = _output_path(cfg)
    with open(path, "w") as fh:
        fh.write(render_report(cfg, payload))
    for p, text in extra.items():
        with open(p, "w") as fh:
            fh.write(text)
    wall = time.perf_counter() - t0
    status = "ok" if converged else "nonconvergence"
    print(f"{cfg.command}: report {path} "
          f"({', '.join(sorted(extra))+'; ' if extra else ''}"
          f"{status}, wall {wall:.2f}s)")
    return 0 if converged else 3


# ---------------------------------------------------------------------------
# argument parsing: flags funnel into the config validator


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rieszpol",
        description="Maximin Riesz potential experiments: solvers, "
                    "asymptotic tables, density and equidistribution checks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="execute a config file")
    runp.add_argument("--config", required=True, metavar="FILE")

    flag_help = {
        "set": "set spec, e.g. circle, sphere(d=2), ball(d=3,radius=2)",
        "n": "point count: single, comma list, or doubling range a..b",
        "s": "Riesz exponent (default: the set dimension d)",
        "seed": "master seed (required for stochastic commands)",
        "strategy": "search strategy: " + ", ".join(polarization.STRATEGIES),
        "restarts": "independent restarts",
        "grid": "restrict the search to a quasi-uniform grid of this size",
        "source": "table source: analytic or solver",
        "quantity": "table quantity: polarization, energy, chebyshev",
        "family": "test-cell family, e.g. partition:32 or caps:100",
        "epsilons": "decreasing comma-separated scale schedule",
        "mode": "alpha evaluation mode: auto, grid, exact",
        "samples": "sample count (alpha grid / bound-check instances)",
        "rtol": "quadrature agreement tolerance",
        "output": "report path (default rieszpol-<command>.json)",
        "csv": "CSV table path (asymptotics)",
        "plotdata": "two-column plot data path (asymptotics)",
    }
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=f"{cmd} command")
        for key, cmds in _KEYS.items():
            if key != "command" and cmd in cmds:
                p.add_argument(f"--{key}", metavar=key.upper(),
                               help=flag_help[key])
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        else:
            items = [("command", args.command, None)]
            for key in _KEYS:
                val = getattr(args, key, None) if key != "command" else None
                if val is not None:
                    items.append((key, val, None))
            cfg = _validate(items)
        return run(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        # input rejected by a library precondition (oracle size caps, ...)
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
