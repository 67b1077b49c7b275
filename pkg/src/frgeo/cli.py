"""Command-line front end: experiment configuration, runs, CSV/JSON export.

Five experiment kinds are exposed as subcommands of ``frgeo``:

* ``simplex-geodesic``        closed-form simplex trajectories (single
                              velocity or a tau sweep from the barycenter)
* ``density-geodesic``        flowing grid density, one file per frame
* ``pixelation-convergence``  projection ladder summary for a catalog pair
* ``moments``                 mean/variance curves of a grid geodesic
* ``oracle-compare``          closed form vs fixed-step RK4, side by side

Configuration is a flat ``key = value`` text file (``--config PATH``) plus
``key=value`` command-line overrides; every key must belong to the chosen
subcommand (unknown or duplicate keys are rejected, exit code 2).  Numeric
values accept plain floats, exact fractions (``1/3``), and multiples of pi
(``pi``, ``pi/2``, ``3pi/4``).  Domain failures of a valid configuration
(hitting the simplex boundary, degenerate projected velocities, the ODE
leaving its domain, ...) exit with code 3; both error classes print a single
JSON object to stderr.

Outputs are deterministic: the same configuration produces byte-identical
files.  Floats are written with 17 significant digits in CSV and with
``repr`` round-trip formatting in JSON, so re-importing loses nothing.
``FRG_THREADS`` caps the thread pool used to evaluate frames in parallel;
writes happen serially in frame order regardless.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np

from .boxes import BoxFunction, load_catalog
from .catalogs import BUILTIN_CATALOGS
from .errors import (
    BoundaryTouch,
    ConfigError,
    FrgeoError,
    InvalidCatalogFunction,
)
from .geodesics import (
    GeodesicState,
    density_at,
    ellipse_param_n2,
    ellipsoid_tangent,
    geodesic_flow,
    normalize_velocity,
    simplex_flow_samples,
    simplex_state,
    simplex_trajectory,
)
from .moments import moments, write_moments_csv
from .oracle import IntegratorConfig, integrate_coupled
from .pixelation import (
    build_ladder,
    ladder_summary_rows,
    test_functions_1d,
    test_functions_2d,
    write_ladder_csv,
)
from .simplex import BOUNDARY_FLOOR, SimplexPoint, TangentVector
from .spaces import DyadicGrid, FiniteDensity, SignedFunction

FLOAT_FMT = "{:.17g}"

# ---------------------------------------------------------------------------
# value parsing


_PI_TOKEN = re.compile(
    r"^(?P<num>[0-9]+(?:\.[0-9]+)?)?\s*\*?\s*pi(?:\s*/\s*(?P<den>[0-9]+(?:\.[0-9]+)?))?$",
    re.IGNORECASE,
)


def parse_number(token: str) -> float:
    """Float from a config token: plain, fraction ``a/b`` or pi-multiple."""
    token = token.strip()
    m = _PI_TOKEN.match(token)
    if m:
        num = float(m.group("num")) if m.group("num") else 1.0
        den = float(m.group("den")) if m.group("den") else 1.0
        return num * math.pi / den
    if "/" in token:
        return float(Fraction(token))
    return float(token)


def _parse_int(token: str) -> int:
    return int(token.strip(), 10)


def _parse_vector(token: str) -> np.ndarray:
    parts = [p for p in token.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty vector")
    return np.array([parse_number(p) for p in parts])


def _parse_levels(token: str) -> list[int]:
    """Grid levels, either ``3-8`` (inclusive range) or ``3,5,7``."""
    token = token.strip()
    m = re.match(r"^([0-9]+)\s*-\s*([0-9]+)$", token)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise ValueError(f"empty level range {token!r}")
        return list(range(lo, hi + 1))
    return sorted({_parse_int(p) for p in token.split(",") if p.strip()})


def _parse_fraction(token: str) -> Fraction:
    return Fraction(token.strip())


def _parse_catalog(token: str) -> BoxFunction:
    token = token.strip()
    if token in BUILTIN_CATALOGS:
        return BUILTIN_CATALOGS[token]()
    path = Path(token)
    if not path.exists():
        known = ", ".join(sorted(BUILTIN_CATALOGS))
        raise ValueError(
            f"{token!r} is neither a built-in catalog ({known}) nor a file"
        )
    return load_catalog(path)


# ---------------------------------------------------------------------------
# configuration schema


@dataclass(frozen=True)
class _Key:
    parse: Callable
    default: object
    doc: str


_REQUIRED = object()  # sentinel default for keys that must be given

_COMMON_SIMPLEX_KEYS = {
    "theta0": _Key(_parse_vector, "1/3,1/3", "free simplex coordinates"),
    "tau": _Key(parse_number, None, "single ellipse parameter (barycenter n=2)"),
    "w_raw": _Key(_parse_vector, None, "raw direction, scaled to unit speed"),
}

KIND_KEYS: dict[str, dict[str, _Key]] = {
    "simplex-geodesic": {
        **_COMMON_SIMPLEX_KEYS,
        "tau_count": _Key(_parse_int, None, "tau sweep size (barycenter n=2)"),
        "t_end": _Key(parse_number, math.pi / 2, "last sample time"),
        "n_times": _Key(_parse_int, 100, "number of samples on [0, t_end]"),
    },
    "density-geodesic": {
        "f0": _Key(_parse_catalog, "uniform1d", "initial density catalog"),
        "g0": _Key(_parse_catalog, "g01_1d", "initial velocity catalog"),
        "level": _Key(_parse_int, 6, "dyadic grid level"),
        "t_end": _Key(parse_number, math.pi, "last frame time"),
        "n_frames": _Key(_parse_int, 12, "number of frames on [0, t_end]"),
    },
    "pixelation-convergence": {
        "f0": _Key(_parse_catalog, "misaligned_f0_1d", "density catalog"),
        "g0": _Key(_parse_catalog, "misaligned_g0_1d", "velocity catalog"),
        "levels": _Key(_parse_levels, "3-8", "ladder levels, e.g. 3-8 or 3,5,7"),
        "delta": _Key(_parse_fraction, Fraction(1, 1000), "density floor"),
        "phi_index": _Key(_parse_int, 0, "index into the fixed test-function set"),
        "j_ref": _Key(_parse_int, None, "reference level (default: max + 4)"),
    },
    "moments": {
        "f0": _Key(_parse_catalog, "uniform1d", "initial density catalog"),
        "g0": _Key(_parse_catalog, "g01_1d", "initial velocity catalog"),
        "level": _Key(_parse_int, 6, "dyadic grid level"),
        "t_end": _Key(parse_number, math.pi, "last sample time"),
        "n_times": _Key(_parse_int, 100, "number of samples on [0, t_end]"),
    },
    "oracle-compare": {
        **_COMMON_SIMPLEX_KEYS,
        "step": _Key(parse_number, 1e-3, "RK4 step size"),
        "t_end": _Key(parse_number, 1.0, "integration horizon"),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated experiment: kind, typed parameters, output plan."""

    kind: str
    params: dict
    echo: dict  # JSON-safe copy of the resolved parameters
    out_dir: Path
    fmt: str


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` pairs; ``#`` comments; duplicates rejected."""
    pairs: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                "config", f"{path}:{lineno}: expected key = value, got {raw!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        if key in pairs:
            raise ConfigError(key, f"duplicate key at {path}:{lineno}")
        pairs[key] = value.strip()
    return pairs


def _merge_overrides(pairs: dict[str, str], overrides: list[str]) -> dict[str, str]:
    seen: set[str] = set()
    merged = dict(pairs)
    for token in overrides:
        if "=" not in token:
            raise ConfigError(token, "override must look like key=value")
        key, _, value = token.partition("=")
        key = key.strip()
        if key in seen:
            raise ConfigError(key, "duplicate override on the command line")
        seen.add(key)
        merged[key] = value.strip()
    return merged


def _jsonable(value):
    if isinstance(value, BoxFunction):
        return None  # replaced by the raw token in validate_config
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    return value


def validate_config(
    kind: str, pairs: dict[str, str], out_dir: str | Path, fmt: str
) -> ExperimentConfig:
    """Parse and type-check raw key/value pairs against the kind's schema."""
    schema = KIND_KEYS[kind]
    for key in pairs:
        if key not in schema:
            raise ConfigError(
                key, f"unknown key for {kind} (known: {', '.join(sorted(schema))})"
            )
    params: dict = {}
    echo: dict = {"kind": kind, "format": fmt}
    for key, spec in schema.items():
        token = pairs.get(key)
        if token is None and isinstance(spec.default, str):
            token = spec.default
        if token is not None:
            try:
                value = spec.parse(token)
            except (ValueError, ZeroDivisionError, InvalidCatalogFunction) as exc:
                raise ConfigError(key, f"cannot parse {token!r}: {exc}")
        elif spec.default is _REQUIRED:
            raise ConfigError(key, "required key is missing")
        else:
            value = spec.default
        params[key] = value
        echo[key] = token if isinstance(value, BoxFunction) else _jsonable(value)
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"must be csv or json, not {fmt!r}")
    _check_preconditions(kind, params)
    return ExperimentConfig(kind, params, echo, Path(out_dir), fmt)


def _check_preconditions(kind: str, params: dict) -> None:
    """Reject out-of-domain numbers before any computation starts."""
    p = params
    if "theta0" in p:
        theta = p["theta0"]
        if np.min(theta) < BOUNDARY_FLOOR or float(np.sum(theta)) > 1.0 - BOUNDARY_FLOOR:
            raise ConfigError("theta0", "coordinates must be interior to the simplex")
    if "t_end" in p and not p["t_end"] > 0.0:
        raise ConfigError("t_end", "must be positive")
    if "n_times" in p and p["n_times"] < 2:
        raise ConfigError("n_times", "need at least 2 samples")
    if "n_frames" in p and p["n_frames"] < 2:
        raise ConfigError("n_frames", "need at least 2 frames")
    if "step" in p and not p["step"] > 0.0:
        raise ConfigError("step", "must be positive")
    if "level" in p and p["level"] < 1:
        raise ConfigError("level", "grid level must be >= 1")
    if "levels" in p:
        if not p["levels"]:
            raise ConfigError("levels", "need at least one level")
        if min(p["levels"]) < 1:
            raise ConfigError("levels", "grid levels must be >= 1")
    if "delta" in p and not p["delta"] > 0:
        raise ConfigError("delta", "density floor must be positive")
    if "j_ref" in p and p["j_ref"] is not None and "levels" in p:
        if p["j_ref"] <= max(p["levels"]):
            raise ConfigError("j_ref", "must exceed the deepest ladder level")
    if "phi_index" in p and p["phi_index"] < 0:
        raise ConfigError("phi_index", "must be non-negative")
    if "tau_count" in p and p["tau_count"] is not None and p["tau_count"] < 1:
        raise ConfigError("tau_count", "sweep needs at least one value")
    if "f0" in p and "g0" in p:
        if p["f0"].dimension != p["g0"].dimension:
            raise ConfigError("g0", "catalog dimensions of f0 and g0 differ")


# ---------------------------------------------------------------------------
# velocity resolution (simplex kinds)


def _resolve_velocities(params: dict, allow_sweep: bool) -> list[tuple[float | None, TangentVector]]:
    """(tau, velocity) pairs from exactly one of tau / tau_count / w_raw.

    The tau parametrization covers the unit Fisher sphere at the barycenter
    of the 2-simplex only; anywhere else a raw direction must be given.
    With nothing specified, simplex-geodesic sweeps 12 values of tau and
    oracle-compare takes tau = 1.
    """
    theta0 = params["theta0"]
    given = [k for k in ("tau", "tau_count", "w_raw") if params.get(k) is not None]
    if len(given) > 1:
        raise ConfigError(given[1], "give only one of tau, tau_count, w_raw")
    choice = given[0] if given else ("tau_count" if allow_sweep else "tau")

    if choice in ("tau", "tau_count"):
        at_barycenter = theta0.size == 2 and np.allclose(
            theta0, 1.0 / 3.0, rtol=0.0, atol=1e-12
        )
        if not at_barycenter:
            raise ConfigError(
                choice,
                "tau parametrizes velocities at theta0 = (1/3, 1/3) only; "
                "use w_raw elsewhere",
            )
    if choice == "tau":
        tau = params["tau"] if params.get("tau") is not None else 1.0
        return [(float(tau), TangentVector(ellipse_param_n2(tau)))]
    if choice == "tau_count":
        count = params["tau_count"] if params.get("tau_count") is not None else 12
        taus = [2.0 * math.pi * k / count for k in range(count)]
        return [(t, TangentVector(ellipse_param_n2(t))) for t in taus]
    p0 = SimplexPoint(theta0)
    return [(None, ellipsoid_tangent(p0, params["w_raw"]))]


# ---------------------------------------------------------------------------
# parallel evaluation


def worker_count(n_tasks: int) -> int:
    """Thread count for frame evaluation; FRG_THREADS caps it."""
    cap = os.environ.get("FRG_THREADS")
    if cap is None:
        limit = os.cpu_count() or 1
    else:
        try:
            limit = int(cap)
        except ValueError:
            raise ConfigError("FRG_THREADS", f"not an integer: {cap!r}")
        if limit < 1:
            raise ConfigError("FRG_THREADS", "must be >= 1")
    return max(1, min(n_tasks, limit))


def _map_ordered(fn: Callable, items: list) -> list:
    """fn over items, possibly in a thread pool; results in input order."""
    workers = worker_count(len(items))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    return FLOAT_FMT.format(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, obj: dict) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _indexed_name(stem: str, k: int, count: int, suffix: str) -> str:
    width = max(2, len(str(count - 1)))
    return f"{stem}_{k:0{width}d}.{suffix}"


# ---------------------------------------------------------------------------
# runners


def _run_simplex_geodesic(cfg: ExperimentConfig) -> list[Path]:
    p = cfg.params
    p0 = SimplexPoint(p["theta0"])
    pairs = _resolve_velocities(p, allow_sweep=True)
    times = np.linspace(0.0, p["t_end"], p["n_times"])

    def one(pair):
        tau, v = pair
        # full-coordinate closed form; archived exactly as evaluated, so a
        # JSON re-import reproduces every frame bit for bit
        y, _ = simplex_flow_samples(p0, v, times)
        bad = y < BOUNDARY_FLOOR
        if np.any(bad):
            t_idx, k_idx = np.argwhere(bad)[0]
            raise BoundaryTouch(int(k_idx) + 1, float(times[t_idx]))
        return tau, v, y

    results = _map_ordered(one, pairs)
    written: list[Path] = []
    for k, (tau, v, y) in enumerate(results):
        if cfg.fmt == "csv":
            path = cfg.out_dir / _indexed_name("trajectory", k, len(results), "csv")
            header = ["t"] + [f"theta_{i + 1}" for i in range(p0.n)]
            rows = (
                [_fmt(t)] + [_fmt(x) for x in y[s, : p0.n]]
                for s, t in enumerate(times)
            )
            _write_csv(path, header, rows)
        else:
            path = cfg.out_dir / _indexed_name("trajectory", k, len(results), "json")
            state = simplex_state(p0, v)
            obj = {
                "config": {**cfg.echo, "trajectory_index": k, "tau": tau},
                "space": {"kind": "counting", "n_points": p0.n + 1},
                "alpha": state.alpha.tolist(),
                "beta": state.beta.tolist(),
                "frames": {
                    repr(float(t)): y[s].tolist() for s, t in enumerate(times)
                },
            }
            _write_json(path, obj)
        written.append(path)
    return written


def _grid_state(f0_cat: BoxFunction, g0_cat: BoxFunction, level: int) -> GeodesicState:
    """Project a catalog pair to a grid and normalize into a geodesic state."""
    grid = DyadicGrid(f0_cat.dimension, level)
    try:
        f0 = FiniteDensity(grid, f0_cat.cell_averages(grid))
    except ValueError as exc:
        raise ConfigError("f0", str(exc))
    g_raw = SignedFunction(grid, g0_cat.cell_averages(grid))
    return geodesic_flow(f0, normalize_velocity(f0, g_raw))


def _run_density_geodesic(cfg: ExperimentConfig) -> list[Path]:
    p = cfg.params
    state = _grid_state(p["f0"], p["g0"], p["level"])
    grid: DyadicGrid = state.space
    times = np.linspace(0.0, p["t_end"], p["n_frames"])
    frames = _map_ordered(lambda t: density_at(state, t).values, list(times))

    written: list[Path] = []
    if cfg.fmt == "csv":
        centers = grid.centers()
        header = (
            ["cell_index"]
            + [f"x_center_{d + 1}" for d in range(grid.dimension)]
            + ["f_value"]
        )
        for k, values in enumerate(frames):
            path = cfg.out_dir / _indexed_name("frame", k, len(frames), "csv")
            rows = (
                [i] + [_fmt(c) for c in centers[i]] + [_fmt(values[i])]
                for i in range(grid.cell_count)
            )
            _write_csv(path, header, rows)
            written.append(path)
    else:
        path = cfg.out_dir / "density_geodesic.json"
        obj = {
            "config": cfg.echo,
            "space": {
                "kind": "dyadic",
                "dimension": grid.dimension,
                "level": grid.level,
            },
            "alpha": state.alpha.tolist(),
            "beta": state.beta.tolist(),
            "frames": {
                repr(float(t)): values.tolist()
                for t, values in zip(times, frames)
            },
        }
        _write_json(path, obj)
        written.append(path)
    return written


def _run_pixelation_convergence(cfg: ExperimentConfig) -> list[Path]:
    p = cfg.params
    dimension = p["f0"].dimension
    if dimension == 1:
        phis = test_functions_1d()
    elif dimension == 2:
        phis = test_functions_2d()
    else:
        raise ConfigError("f0", "test functions exist for dimensions 1 and 2 only")
    if p["phi_index"] >= len(phis):
        raise ConfigError(
            "phi_index", f"only {len(phis)} test functions in dimension {dimension}"
        )
    phi = phis[p["phi_index"]]
    ladder = build_ladder(p["f0"], p["g0"], p["levels"], delta=p["delta"])
    if cfg.fmt == "csv":
        path = cfg.out_dir / "ladder.csv"
        write_ladder_csv(path, ladder, phi, p["j_ref"])
    else:
        path = cfg.out_dir / "ladder.json"
        _write_json(
            path,
            {"config": cfg.echo, "rows": ladder_summary_rows(ladder, phi, p["j_ref"])},
        )
    return [path]


def _run_moments(cfg: ExperimentConfig) -> list[Path]:
    p = cfg.params
    state = _grid_state(p["f0"], p["g0"], p["level"])
    times = np.linspace(0.0, p["t_end"], p["n_times"])
    curve = moments(state, times)
    if cfg.fmt == "csv":
        path = cfg.out_dir / "moments.csv"
        write_moments_csv(path, curve)
    else:
        path = cfg.out_dir / "moments.json"
        _write_json(
            path,
            {
                "config": cfg.echo,
                "times": curve.times.tolist(),
                "mean": curve.mean.tolist(),
                "variance": curve.variance.tolist(),
            },
        )
    return [path]


def _run_oracle_compare(cfg: ExperimentConfig) -> list[Path]:
    p = cfg.params
    p0 = SimplexPoint(p["theta0"])
    ((tau, v),) = _resolve_velocities(p, allow_sweep=False)
    traj = integrate_coupled(p0, v, IntegratorConfig(p["step"], p["t_end"]))
    closed = np.array(
        [pt.theta for pt in simplex_trajectory(p0, v, traj.times)]
    )
    diff = np.abs(closed - traj.positions).max(axis=1)

    if cfg.fmt == "csv":
        path = cfg.out_dir / "oracle_compare.csv"
        header = (
            ["t"]
            + [f"theta_{i + 1}" for i in range(p0.n)]
            + [f"rk4_theta_{i + 1}" for i in range(p0.n)]
            + ["abs_diff"]
        )
        rows = (
            [_fmt(traj.times[s])]
            + [_fmt(x) for x in closed[s]]
            + [_fmt(x) for x in traj.positions[s]]
            + [_fmt(diff[s])]
            for s in range(traj.n_samples)
        )
        _write_csv(path, header, rows)
    else:
        path = cfg.out_dir / "oracle_compare.json"
        _write_json(
            path,
            {
                "config": {**cfg.echo, "tau": tau},
                "times": traj.times.tolist(),
                "closed": closed.tolist(),
                "rk4": traj.positions.tolist(),
                "max_abs_diff": float(diff.max()),
            },
        )
    return [path]


_RUNNERS = {
    "simplex-geodesic": _run_simplex_geodesic,
    "density-geodesic": _run_density_geodesic,
    "pixelation-convergence": _run_pixelation_convergence,
    "moments": _run_moments,
    "oracle-compare": _run_oracle_compare,
}


def run_experiment(cfg: ExperimentConfig) -> list[Path]:
    """Execute a validated configuration; returns the written files."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[cfg.kind](cfg)


# ---------------------------------------------------------------------------
# argument parsing and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frgeo",
        description="Fisher-Rao geodesic experiments (CSV/JSON export).",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, schema in KIND_KEYS.items():
        keys = ", ".join(
            f"{name} ({spec.doc})" for name, spec in schema.items()
        )
        sp = sub.add_parser(
            kind,
            help=f"run a {kind} experiment",
            description=f"Keys for {kind}: {keys}",
        )
        sp.add_argument("--config", metavar="PATH", help="key = value file")
        sp.add_argument(
            "--out", metavar="DIR", default=".", help="output directory"
        )
        sp.add_argument(
            "--format", choices=("csv", "json"), default="csv", dest="fmt"
        )
        sp.add_argument(
            "overrides",
            nargs="*",
            metavar="key=value",
            help="override config file entries",
        )
    return parser


def _emit_error(exc: FrgeoError) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("field", "coordinate", "time", "condition"):
        if hasattr(exc, attr):
            payload[attr] = getattr(exc, attr)
    json.dump(payload, sys.stderr)
    sys.stderr.write("\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pairs = read_config_file(args.config) if args.config else {}
        pairs = _merge_overrides(pairs, args.overrides)
        cfg = validate_config(args.kind, pairs, args.out, args.fmt)
        written = run_experiment(cfg)
    except ConfigError as exc:
        _emit_error(exc)
        return 2
    except FrgeoError as exc:
        _emit_error(exc)
        return 3
    for path in written:
        print(path)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
