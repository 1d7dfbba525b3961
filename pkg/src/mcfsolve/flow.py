"""Time integration of the contact-angle graph flow u_t = W div(grad u / W).

Two schemes:

* ``explicit``: forward Euler on the nonlinear operator, with the usual
  parabolic step bound dt <= safety * h^2 (the principal coefficient is
  1/W^2 <= 1; the disk adds the angular term).
* ``semi_implicit`` (default): backward Euler on the flux form with W
  factors and boundary normal slopes lagged at the previous step, solved
  in increment form (I - dt*M) du = dt*F(u).  Unconditionally stable for
  the lagged linearization; dt defaults to h_r.

Each step appends one history row (t, max_W, osc, speed estimate, max of
W*eta) where eta is the weighted gradient monitor

    eta = exp(K (u - C t)) * (S d + 1 - (phi / W) <grad u, grad d>)

with d the smoothed boundary distance.  The history is the empirical
record behind the uniform gradient bound and bounded-drift checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import splu

from .grids import AngleData, Field, Grid, make_field
from . import operators as ops

__all__ = [
    "StepPolicy",
    "FlowHistory",
    "FlowState",
    "SolverError",
    "initial_state",
    "auto_dt",
    "step",
    "run_until",
    "speed_estimate",
    "eta_monitor",
]


class SolverError(RuntimeError):
    """A numerical procedure failed (blow-up, stagnation, no convergence)."""


@dataclass
class StepPolicy:
    scheme: str = "semi_implicit"
    dt: Optional[float] = None  # None = auto
    safety: float = 0.4

    def __post_init__(self):
        if self.scheme not in ("semi_implicit", "explicit"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0 < self.safety <= 1:
            raise ValueError("safety must lie in (0, 1]")


@dataclass
class FlowHistory:
    t: List[float] = dc_field(default_factory=list)
    mean_u: List[float] = dc_field(default_factory=list)
    max_w: List[float] = dc_field(default_factory=list)
    osc_u: List[float] = dc_field(default_factory=list)
    speed: List[float] = dc_field(default_factory=list)
    max_weta: List[float] = dc_field(default_factory=list)

    def append(self, t, mean_u, max_w, osc_u, speed, max_weta):
        self.t.append(float(t))
        self.mean_u.append(float(mean_u))
        self.max_w.append(float(max_w))
        self.osc_u.append(float(osc_u))
        self.speed.append(float(speed))
        self.max_weta.append(float(max_weta))

    def rows(self):
        """(t, max_W, osc_u, speed, max_Weta) tuples."""
        return list(zip(self.t, self.max_w, self.osc_u, self.speed, self.max_weta))

    def __len__(self):
        return len(self.t)


@dataclass
class FlowState:
    grid: Grid
    field: Field
    history: FlowHistory
    snapshots: List[Tuple[float, np.ndarray]] = dc_field(default_factory=list)

    @property
    def t(self) -> float:
        return self.field.t


def auto_dt(grid: Grid, policy: StepPolicy) -> float:
    if policy.dt is not None:
        return policy.dt
    if policy.scheme == "semi_implicit":
        return grid.h_r
    rate = 1.0 / grid.h_r ** 2
    if grid.is_disk:
        r_min = grid.nodes[0]
        rate += 1.0 / (r_min * grid.h_theta) ** 2
    return policy.safety / rate


def eta_monitor(grid: Grid, field: Field, angle: AngleData,
                K: float = 5.0, S: Optional[float] = None, C: float = 0.0):
    """Maximum of W*eta over the grid and its location.

    Evaluated in log space; eta is positive because |phi| |grad u| < W
    and |grad d| <= 1, so the bracket stays above 1 - phi0.
    """
    if K <= 0 or (S is not None and S <= 0):
        raise ValueError("monitor constants K, S must be positive")
    geom = grid.geom
    if S is None:
        S = geom.hess_d_bound + 2.0
    ext = field.values
    c, _ = ops.node_slopes(grid, ext)
    w_node = ops.node_area_element(grid, ext)
    d_vals, _ = geom.smoothed_distance(grid.nodes)
    dd = geom.smoothed_distance_gradient(grid.nodes)
    phi_ext = angle.extension(grid)
    if grid.is_disk:
        d_vals = np.asarray(d_vals)[:, None]
        dd = np.asarray(dd)[:, None]
    grad_dot = c * dd
    bracket = S * d_vals + 1.0 - (phi_ext / w_node) * grad_dot
    log_weta = np.log(w_node) + K * (field.interior - C * field.t) + np.log(bracket)
    flat = int(np.argmax(log_weta))
    idx = np.unravel_index(flat, grid.shape) if grid.is_disk else (flat,)
    return float(np.exp(log_weta.ravel()[flat])), idx


def speed_estimate(history: FlowHistory, tau: float) -> float:
    """Windowed mean-height velocity (mean u(t) - mean u(t - tau)) / tau."""
    if len(history) < 2:
        raise ValueError("insufficient history for a speed estimate")
    t_now = history.t[-1]
    target = t_now - tau
    if target < history.t[0] - 1e-12:
        raise ValueError("insufficient history for the requested window")
    idx = int(np.searchsorted(np.asarray(history.t), target + 1e-12) )
    idx = min(idx, len(history) - 2)
    dt_w = t_now - history.t[idx]
    return (history.mean_u[-1] - history.mean_u[idx]) / dt_w


def _record(state: FlowState, angle: AngleData, tau: float, eta_k: float):
    grid, field = state.grid, state.field
    with np.errstate(over="ignore"):  # a diverging run may log inf monitors
        _record_inner(state, angle, tau, eta_k)


def _record_inner(state: FlowState, angle: AngleData, tau: float, eta_k: float):
    grid, field = state.grid, state.field
    w_node = ops.node_area_element(grid, field.values)
    mean_u = ops.field_mean(grid, field)
    osc = ops.field_osc(field)
    try:
        spd = speed_estimate(state.history, tau) if len(state.history) else math.nan
    except ValueError:
        spd = math.nan
    c_for_eta = 0.0 if math.isnan(spd) else spd
    weta, _ = eta_monitor(grid, field, angle, K=eta_k, C=c_for_eta)
    state.history.append(field.t, mean_u, float(np.max(w_node)), osc, spd, weta)


def initial_state(grid: Grid, angle: AngleData, u0=0.0, eta_k: float = 5.0) -> FlowState:
    """Ghost-close the initial data and record the t = 0 history row."""
    if isinstance(u0, Field):
        f = Field(u0.values.copy(), 0.0)
        f = ops.ghost_fill(grid, f, angle)
    else:
        f = ops.ghost_fill(grid, make_field(grid, u0, t=0.0), angle)
    state = FlowState(grid=grid, field=f, history=FlowHistory())
    _record(state, angle, 1.0, eta_k)
    return state


def step(state: FlowState, policy: StepPolicy, angle: AngleData,
         tau: Optional[float] = None, eta_k: float = 5.0) -> FlowState:
    """Advance one time step; returns the same FlowState with new field and
    an appended history row."""
    grid, field = state.grid, state.field
    dt = auto_dt(grid, policy)
    interior = field.interior

    if policy.scheme == "explicit":
        with np.errstate(all="ignore"):  # blow-up is reported, not warned
            rhs = ops.mcf_from_extended(grid, field.values)
            new_int = interior + dt * rhs
        if not np.all(np.isfinite(new_int)):
            raise SolverError("explicit step produced non-finite values (time step too large)")
    else:
        rhs = dt * ops.mcf_from_extended(grid, field.values)
        if np.any(rhs):
            a_mat = ops.semi_implicit_matrix(grid, field.values, angle, dt)
            try:
                delta = splu(a_mat).solve(rhs.ravel()).reshape(grid.shape)
            except RuntimeError as exc:
                raise SolverError(f"semi-implicit solve failed: {exc}") from exc
            if not np.all(np.isfinite(delta)):
                raise SolverError("semi-implicit solve produced non-finite values")
        else:
            delta = rhs  # stationary data stay put exactly
        new_int = interior + delta

    new_field = ops.ghost_fill(grid, Field(_with_interior(grid, new_int), field.t + dt), angle)
    state.field = new_field
    _record(state, angle, tau if tau is not None else max(1.0, 10.0 * dt), eta_k)
    return state


def _with_interior(grid: Grid, interior: np.ndarray) -> np.ndarray:
    values = np.empty(grid.ext_shape)
    values[0] = 0.0
    values[-1] = 0.0
    values[1:-1] = interior
    return values


def run_until(state: FlowState, policy: StepPolicy, angle: AngleData,
              t_end: Optional[float] = None, speed_tol: Optional[float] = None,
              max_steps: int = 10_000_000, snapshot_interval: Optional[float] = None,
              eta_k: float = 5.0) -> FlowState:
    """Iterate the flow until t_end, or until the windowed speed estimate
    is stationary: |speed(t) - speed(t - tau)| < speed_tol with
    tau = max(1, 10 dt).  Snapshots of the field are kept every
    snapshot_interval time units (labels on the nominal multiples)."""
    if t_end is None and speed_tol is None:
        raise ValueError("need a stop criterion: t_end and/or speed_tol")
    dt = auto_dt(state.grid, policy)
    tau = max(1.0, 10.0 * dt)

    if snapshot_interval is not None and not state.snapshots:
        state.snapshots.append((state.t, state.field.interior.copy()))
    next_snap = 1
    if snapshot_interval is not None:
        # resume-safe: continue labeling after snapshots already taken
        next_snap = int(math.floor((state.t + 1e-9) / snapshot_interval)) + 1

    for _ in range(max_steps):
        if t_end is not None and state.t >= t_end - 1e-12:
            return state
        if t_end is not None:
            dt_step = min(dt, t_end - state.t)
            local_policy = StepPolicy(policy.scheme, dt_step, policy.safety)
        else:
            local_policy = StepPolicy(policy.scheme, dt, policy.safety)
        step(state, local_policy, angle, tau=tau, eta_k=eta_k)

        if snapshot_interval is not None:
            while state.t >= next_snap * snapshot_interval - 1e-9:
                state.snapshots.append((next_snap * snapshot_interval, state.field.interior.copy()))
                next_snap += 1

        if speed_tol is not None and state.t >= 2.0 * tau:
            hist = state.history
            now = hist.speed[-1]
            if not math.isnan(now):
                target = state.t - tau
                idx = int(np.searchsorted(np.asarray(hist.t), target + 1e-12))
                idx = min(idx, len(hist) - 2)
                then = hist.speed[idx]
                if not math.isnan(then) and abs(now - then) < speed_tol:
                    return state
    raise SolverError(f"flow did not reach the stop criterion within {max_steps} steps")
