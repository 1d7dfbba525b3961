"""Run configuration parsing, validation, and deterministic output writing.

A run is described by a JSON object with four blocks::

    {
      "geometry": {"kind": "interval", "a": -1.0, "b": 1.0},
      "angle":    {"phi": "const:-0.2"},
      "solver":   {"N_r": 200, "N_theta": 64, "scheme": "semi_implicit",
                   "dt": null, "tol": 1e-10, "max_iter": 30,
                   "eps_first": 1.0, "eps_last": 1e-6, "eps_ratio": 0.5,
                   "safety": 0.4},
      "seed": 0
    }

Unknown keys are rejected with the offending field path.  ``{"preset":
"grim_reaper"}`` expands to the closed-form reference case (optionally
deep-merged with overrides).  Angle magnitudes at or above 0.95 are
rejected here; the boundary closure degenerates as |phi| -> 1.

Outputs are deterministic: floats are written with their shortest
round-trip decimal (Python repr), so identical inputs give byte-identical
files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .flow import StepPolicy
from .geometry import make_geometry
from .grids import Field, Grid, angle_from_spec, make_grid
from .soliton import NewtonPolicy

__all__ = ["ConfigError", "RunConfig", "SolverSettings", "parse_config",
           "build_problem", "emit_outputs", "PRESETS"]

PHI_LIMIT = 0.95


class ConfigError(ValueError):
    pass


_SOLVER_DEFAULTS = {
    "N_r": 200,
    "N_theta": 64,
    "scheme": "semi_implicit",
    "dt": None,
    "tol": 1e-10,
    "max_iter": 30,
    "eps_first": 1.0,
    "eps_last": 1e-6,
    "eps_ratio": 0.5,
    "safety": 0.4,
}

PRESETS = {
    "grim_reaper": {
        "geometry": {"kind": "interval", "a": -1.0, "b": 1.0},
        "angle": {"phi": f"const:{-math.sin(0.5)!r}"},
        "solver": {"N_r": 200},
        "seed": 0,
    },
}


@dataclass(frozen=True)
class SolverSettings:
    n_r: int = 200
    n_theta: int = 64
    scheme: str = "semi_implicit"
    dt: Optional[float] = None
    tol: float = 1e-10
    max_iter: int = 30
    eps_first: float = 1.0
    eps_last: float = 1e-6
    eps_ratio: float = 0.5
    safety: float = 0.4


@dataclass(frozen=True)
class RunConfig:
    geometry: dict
    angle: str
    solver: SolverSettings
    seed: int = 0
    preset: Optional[str] = None

    @property
    def is_disk(self) -> bool:
        return self.geometry.get("kind") == "polar_disk"

    def with_resolution(self, n_r: int, n_theta: Optional[int] = None) -> "RunConfig":
        solver = replace(self.solver, n_r=int(n_r),
                         n_theta=int(n_theta) if n_theta else self.solver.n_theta)
        return replace(self, solver=solver)

    def newton_policy(self) -> NewtonPolicy:
        s = self.solver
        return NewtonPolicy(tol=s.tol, max_iter=s.max_iter, eps_first=s.eps_first,
                            eps_last=s.eps_last, eps_ratio=s.eps_ratio)

    def step_policy(self) -> StepPolicy:
        s = self.solver
        return StepPolicy(scheme=s.scheme, dt=s.dt, safety=s.safety)

    def resolved(self) -> dict:
        s = self.solver
        return {
            "geometry": _pyify(self.geometry),
            "angle": {"phi": self.angle},
            "solver": {
                "N_r": s.n_r, "N_theta": s.n_theta, "scheme": s.scheme,
                "dt": s.dt, "tol": s.tol, "max_iter": s.max_iter,
                "eps_first": s.eps_first, "eps_last": s.eps_last,
                "eps_ratio": s.eps_ratio, "safety": s.safety,
            },
            "seed": self.seed,
        }


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def _check_phi_spec(spec: str) -> None:
    head, _, body = spec.partition(":")
    if head == "const":
        try:
            v = float(body)
        except ValueError:
            raise ConfigError(f"angle.phi: bad constant {body!r}") from None
        if abs(v) >= PHI_LIMIT:
            raise ConfigError("angle.phi: contact angle too steep (|phi| must stay below 0.95)")
    elif head == "fourier":
        try:
            coeffs = [float(c) for c in body.split(",") if c.strip()]
        except ValueError:
            raise ConfigError(f"angle.phi: bad fourier coefficients {body!r}") from None
        if not coeffs:
            raise ConfigError("angle.phi: fourier spec needs at least a0")
        theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        vals = np.full_like(theta, coeffs[0])
        for k in range(0, len(coeffs) - 1, 2):
            mode = k // 2 + 1
            vals += coeffs[1 + k] * np.cos(mode * theta)
            if 2 + k < len(coeffs):
                vals += coeffs[2 + k] * np.sin(mode * theta)
        if float(np.max(np.abs(vals))) >= PHI_LIMIT:
            raise ConfigError("angle.phi: contact angle too steep (|phi| must stay below 0.95)")
    else:
        raise ConfigError(f"angle.phi: unknown spec kind {head!r}")


def parse_config(source: Union[str, Path, dict, "RunConfig"]) -> RunConfig:
    """Load and validate a run configuration from a path, a preset name,
    a mapping, or an existing RunConfig (returned as-is)."""
    if isinstance(source, RunConfig):
        return source
    if isinstance(source, (str, Path)):
        name = str(source)
        if name in PRESETS and not os.path.exists(name):
            raw: dict = {"preset": name}
        else:
            path = Path(source)
            if not path.exists():
                raise ConfigError(f"config file not found: {path}")
            try:
                raw = json.loads(path.read_text())
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        raw = dict(source)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    preset_name = raw.pop("preset", None)
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset_name!r}")
        raw = _deep_merge(PRESETS[preset_name], raw)

    unknown = set(raw) - {"geometry", "angle", "solver", "seed"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    if "geometry" not in raw:
        raise ConfigError("geometry: block is required")
    try:
        make_geometry(raw["geometry"])  # full validation, field paths in messages
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    angle_block = raw.get("angle", {"phi": "const:0.0"})
    if not isinstance(angle_block, dict) or set(angle_block) - {"phi"}:
        raise ConfigError("angle: block must be {'phi': <spec>}")
    phi_spec = angle_block.get("phi", "const:0.0")
    if not isinstance(phi_spec, str):
        raise ConfigError("angle.phi: must be a string spec like 'const:-0.2'")
    _check_phi_spec(phi_spec)

    solver_block = dict(raw.get("solver", {}))
    unknown = set(solver_block) - set(_SOLVER_DEFAULTS)
    if unknown:
        raise ConfigError(f"solver: unknown keys {sorted(unknown)}")
    merged = {**_SOLVER_DEFAULTS, **solver_block}
    dt = merged["dt"]
    if isinstance(dt, str):
        if dt != "auto":
            raise ConfigError("solver.dt: must be a number, null, or 'auto'")
        dt = None
    if dt is not None:
        dt = float(dt)
        if not dt > 0:
            raise ConfigError("solver.dt: must be positive")
    if merged["scheme"] not in ("semi_implicit", "explicit"):
        raise ConfigError(f"solver.scheme: unknown scheme {merged['scheme']!r}")
    for key in ("N_r",):
        if int(merged[key]) < 8:
            raise ConfigError(f"solver.{key}: must be at least 8")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed: must be an integer")

    solver = SolverSettings(
        n_r=int(merged["N_r"]), n_theta=int(merged["N_theta"]),
        scheme=merged["scheme"], dt=dt, tol=float(merged["tol"]),
        max_iter=int(merged["max_iter"]), eps_first=float(merged["eps_first"]),
        eps_last=float(merged["eps_last"]), eps_ratio=float(merged["eps_ratio"]),
        safety=float(merged["safety"]),
    )
    return RunConfig(geometry=_pyify(raw["geometry"]), angle=phi_spec,
                     solver=solver, seed=seed, preset=preset_name)


def build_problem(cfg: Union[RunConfig, dict, str, Path]):
    """(geometry, grid, angle) for a configuration."""
    cfg = parse_config(cfg)
    geom = make_geometry(cfg.geometry)
    grid = make_grid(geom, cfg.solver.n_r,
                     cfg.solver.n_theta if geom.kind == "polar_disk" else None)
    angle = angle_from_spec(grid, cfg.angle)
    return geom, grid, angle


# -- deterministic writers -----------------------------------------------------


def _pyify(obj):
    if isinstance(obj, dict):
        return {k: _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    return obj


def _fmt(x) -> str:
    x = float(x)
    return repr(x)


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(_pyify(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def field_rows(grid: Grid, field_or_values):
    values = field_or_values.interior if isinstance(field_or_values, Field) else np.asarray(field_or_values)
    if grid.is_disk:
        header = ("r", "theta", "value")
        rows = [(grid.nodes[i], grid.theta[j], values[i, j])
                for i in range(grid.n_nodes) for j in range(grid.n_theta)]
    else:
        coord = "x" if grid.geom.kind == "interval" else "r"
        header = (coord, "value")
        rows = list(zip(grid.nodes, values))
    return header, rows


def emit_outputs(out_dir: Union[str, Path], artifacts: dict) -> list:
    """Write a deterministic file set.  Artifact values are
    ("json", obj), ("csv", header, rows), or ("field", grid, field)."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    for name, art in artifacts.items():
        path = out / name
        try:
            if art[0] == "json":
                write_json(path, art[1])
            elif art[0] == "csv":
                write_csv(path, art[1], art[2])
            elif art[0] == "field":
                header, rows = field_rows(art[1], art[2])
                write_csv(path, header, rows)
            else:
                raise ValueError(f"unknown artifact kind {art[0]!r}")
        except OSError as exc:
            raise ConfigError(f"failed writing {path}: {exc}") from exc
        written.append(path)
    return written
