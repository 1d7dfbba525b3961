"""Cross-cutting verification: convergence to the translator, two-solution
contraction, and grid-refinement order studies.

The convergence verdict mirrors the qualitative theory: heights settle to
the translator profile up to an additive constant (checked through the
oscillation of the difference), the windowed speed matches the
boundary-flux speed, and the gradient envelope max W stops growing.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .flow import FlowState, StepPolicy, auto_dt, initial_state, run_until, step
from .grids import AngleData, Field, Grid
from .soliton import SolitonResult, solve_soliton
from . import operators as ops

__all__ = ["ConvergenceReport", "verify_convergence", "contraction_test",
           "refinement_study", "run_to_stationarity", "catalog_cases", "parallel_map"]


@dataclass
class ConvergenceReport:
    osc_trace: List[Tuple[float, float]]
    drift_trace: List[Tuple[float, float]]
    w_envelope: List[Tuple[float, float]]
    checks: dict
    passed: bool

    def to_dict(self):
        return {
            "checks": {k: {"value": float(v[0]), "tol": float(v[1]), "pass": bool(v[2])}
                       for k, v in self.checks.items()},
            "pass": bool(self.passed),
        }


def _grids_match(a: Grid, b: Grid) -> bool:
    return (a.geom == b.geom and a.n_r == b.n_r and a.n_theta == b.n_theta)


def verify_convergence(flow_state: FlowState, soliton: SolitonResult,
                       tol: float) -> ConvergenceReport:
    """Check a completed flow against a computed translator.

    Passes when (a) the final oscillation of u - u_inf is below tol,
    (b) the windowed speed estimate matches the quadrature speed within
    tol, and (c) max W does not grow over the second half of the run.
    """
    if not _grids_match(flow_state.grid, soliton.grid):
        raise ValueError("flow and soliton were computed on different grids")
    grid = flow_state.grid
    u_inf = soliton.u_inf.interior

    osc_trace, drift_trace = [], []
    for t, snap in flow_state.snapshots:
        diff = snap - u_inf
        osc_trace.append((t, float(np.max(diff) - np.min(diff))))
        drift_trace.append((t, float(np.max(np.abs(snap - soliton.C_quad * t - u_inf)))))

    hist = flow_state.history
    final_diff = flow_state.field.interior - u_inf
    final_osc = float(np.max(final_diff) - np.min(final_diff))
    speed_gap = abs(hist.speed[-1] - soliton.C_quad)

    t_arr = np.asarray(hist.t)
    w_arr = np.asarray(hist.max_w)
    mid = hist.t[-1] / 2.0
    first = float(np.max(w_arr[t_arr <= mid]))
    second = float(np.max(w_arr[t_arr > mid])) if np.any(t_arr > mid) else first
    w_growth = second - first

    checks = {
        "final_osc": (final_osc, tol, final_osc < tol),
        "speed_gap": (speed_gap, tol, speed_gap < tol),
        "w_envelope_growth": (w_growth, tol, w_growth <= tol),
    }
    passed = all(ok for _, _, ok in checks.values())
    return ConvergenceReport(osc_trace=osc_trace, drift_trace=drift_trace,
                             w_envelope=list(zip(hist.t, hist.max_w)),
                             checks=checks, passed=passed)


def contraction_test(grid: Grid, u0_a, u0_b, angle: AngleData,
                     policy: StepPolicy, t_final: float,
                     step_tol: float = 1e-10) -> dict:
    """Run two flows of the same problem in lockstep and track
    F(t) = osc(u_a - u_b).  Passes when F never increases by more than
    step_tol per step and has strictly decreased by t_final unless the
    initial difference was constant."""
    sa = initial_state(grid, angle, u0_a)
    sb = initial_state(grid, angle, u0_b)
    dt = auto_dt(grid, policy)
    f0 = ops.field_osc(Field(sa.field.values - sb.field.values))
    trace = [(0.0, f0)]
    max_increase = 0.0
    n_steps = max(1, int(math.ceil(t_final / dt - 1e-12)))
    for _ in range(n_steps):
        step(sa, policy, angle)
        step(sb, policy, angle)
        diff = sa.field.interior - sb.field.interior
        f_now = float(np.max(diff) - np.min(diff))
        max_increase = max(max_increase, f_now - trace[-1][1])
        trace.append((sa.t, f_now))
    f_end = trace[-1][1]
    started_constant = f0 <= 1e-6
    strictly_decreased = f_end < f0
    passed = max_increase <= step_tol and (started_constant or strictly_decreased)
    return {
        "F_trace": trace,
        "F_initial": f0,
        "F_final": f_end,
        "max_step_increase": max_increase,
        "strictly_decreased": strictly_decreased,
        "started_constant": started_constant,
        "pass": passed,
    }


def run_to_stationarity(grid: Grid, angle: AngleData, policy: StepPolicy,
                        u0=0.0, speed_tol: float = 1e-6,
                        extend_factor: float = 2.0,
                        snapshot_interval: Optional[float] = 0.5,
                        max_steps: int = 10_000_000) -> Tuple[FlowState, float]:
    """Flow until the windowed speed goes stationary at speed_tol, then
    keep flowing to extend_factor times that time.  Returns the state and
    the stationarity time."""
    state = initial_state(grid, angle, u0)
    run_until(state, policy, angle, speed_tol=speed_tol,
              snapshot_interval=snapshot_interval, max_steps=max_steps)
    t_stat = state.t
    if extend_factor > 1.0:
        run_until(state, policy, angle, t_end=extend_factor * t_stat,
                  snapshot_interval=snapshot_interval, max_steps=max_steps)
    return state, t_stat


def _richardson_orders(errors: Sequence[float]) -> List[float]:
    out = []
    for e0, e1 in zip(errors, errors[1:]):
        if e0 > 0 and e1 > 0:
            out.append(math.log2(e0 / e1))
        else:
            out.append(math.inf)
    return out


def refinement_study(config, levels: int,
                     c_oracle: Optional[float] = None,
                     u_oracle: Optional[Callable] = None,
                     t_flow: float = 1.0) -> dict:
    """Re-solve a configured case on grids h, h/2, h/4, ... and report
    observed convergence orders for the quadrature speed, the profile, and
    the translator drift of a short flow."""
    from .config import build_problem, parse_config  # local import, avoids cycle

    if levels < 3:
        raise ValueError("refinement study needs at least 3 levels")
    cfg = parse_config(config)
    if c_oracle is None and u_oracle is None and cfg.preset == "grim_reaper":
        c_oracle = 0.5
        u_oracle = lambda x: -2.0 * np.log(np.cos(x / 2.0))

    rows = []
    profiles = []
    for lev in range(levels):
        scaled = cfg.with_resolution(cfg.solver.n_r * 2 ** lev,
                                     cfg.solver.n_theta * 2 ** lev if cfg.is_disk else None)
        geom, grid, angle = build_problem(scaled)
        sol = solve_soliton(grid, angle, scaled.newton_policy())
        policy = scaled.step_policy()
        state = initial_state(grid, angle, sol.u_inf)
        run_until(state, policy, angle, t_end=t_flow)
        drift = float(np.max(np.abs(
            state.field.interior - sol.C_quad * state.t - sol.u_inf.interior)))
        rows.append({"level": lev, "h_r": grid.h_r, "C_quad": sol.C_quad,
                     "C_eps": sol.C_eps, "drift_t1": drift})
        profiles.append((grid, sol.u_inf.interior))

    cs = [r["C_quad"] for r in rows]
    if c_oracle is not None:
        c_errors = [abs(c - c_oracle) for c in cs]
    else:
        c_errors = [abs(c0 - c1) for c0, c1 in zip(cs, cs[1:])]
    c_orders = _richardson_orders(c_errors)

    u_errors = []
    if u_oracle is not None:
        for grid, prof in profiles:
            exact = u_oracle(grid.nodes)
            exact = exact - ops.field_mean(grid, np.broadcast_to(
                exact if not grid.is_disk else exact[:, None], grid.shape).copy())
            diff = prof - (exact if not grid.is_disk else exact[:, None])
            u_errors.append(float(np.max(diff) - np.min(diff)))
    else:
        for (g0, p0), (g1, p1) in zip(profiles, profiles[1:]):
            if g0.is_disk:
                # theta nodes nest under doubling; interpolate radially
                fine_on_coarse_rays = p1[:, :: g1.n_theta // g0.n_theta]
                interp = np.vstack([np.interp(g0.nodes, g1.nodes, fine_on_coarse_rays[:, j])
                                    for j in range(g0.n_theta)]).T
                diff = interp - p0
            else:
                diff = np.interp(g0.nodes, g1.nodes, p1) - p0
            u_errors.append(float(np.max(diff) - np.min(diff)))
    u_orders = _richardson_orders(u_errors)

    for i, row in enumerate(rows):
        row["C_error"] = c_errors[i] if i < len(c_errors) else math.nan
        row["u_error"] = u_errors[i] if i < len(u_errors) else math.nan
    return {
        "rows": rows,
        "c_errors": c_errors,
        "u_errors": u_errors,
        "c_orders": c_orders,
        "u_orders": u_orders,
    }


def catalog_cases() -> List[Tuple[str, dict]]:
    """Reference problem set exercising every geometry in the catalog."""
    phi_gr = -math.sin(0.5)
    return [
        ("grim_reaper", {
            "geometry": {"kind": "interval", "a": -1.0, "b": 1.0},
            "angle": {"phi": f"const:{phi_gr!r}"},
            "solver": {"N_r": 200},
        }),
        ("interval_mild", {
            "geometry": {"kind": "interval", "a": -1.0, "b": 1.0},
            "angle": {"phi": "const:-0.2"},
            "solver": {"N_r": 200},
        }),
        ("flat_ball_n2", {
            "geometry": {"kind": "radial_ball", "n": 2, "R": 1.0,
                         "curvature": {"model": "flat"}},
            "angle": {"phi": "const:-0.1"},
            "solver": {"N_r": 200},
        }),
        ("flat_ball_n3", {
            "geometry": {"kind": "radial_ball", "n": 3, "R": 1.0,
                         "curvature": {"model": "flat"}},
            "angle": {"phi": "const:-0.1"},
            "solver": {"N_r": 200},
        }),
        ("hyperbolic_ball_n2", {
            "geometry": {"kind": "radial_ball", "n": 2, "R": 0.3,
                         "curvature": {"model": "hyperbolic", "K": 1.0}},
            "angle": {"phi": "const:-0.1"},
            "solver": {"N_r": 160},
        }),
        ("pinched_ball_n3", {
            "geometry": {"kind": "radial_ball", "n": 3, "R": 0.35,
                         "curvature": {"model": "pinched_ch", "K": 1.0}},
            "angle": {"phi": "const:-0.1"},
            "solver": {"N_r": 160},
        }),
        ("disk_fourier", {
            "geometry": {"kind": "polar_disk", "R": 1.0},
            "angle": {"phi": "fourier:0.1,0.05,0.0"},
            "solver": {"N_r": 40, "N_theta": 40},
        }),
    ]


def parallel_map(fn: Callable, items: Sequence):
    """Map with run-level parallelism capped by MCF_THREADS (default: CPU
    count).  Results keep the input order."""
    workers = int(os.environ.get("MCF_THREADS", "0")) or (os.cpu_count() or 1)
    workers = max(1, min(workers, len(items) or 1))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
