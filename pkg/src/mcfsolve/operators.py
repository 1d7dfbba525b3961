"""Flux-form discretization of the graph mean curvature operator.

The operator W * div(grad u / W), W = sqrt(1 + |grad u|^2), is discretized
in finite-volume (flux) form so that the weighted sum of the divergence
telescopes exactly to the outermost face fluxes:

    sum_i sigma_i h_r div_i = (outer face flux) - (inner face flux)

which is the discrete skeleton of the speed/angle compatibility relation.
Face fluxes are q = s / sqrt(1 + s^2 + tangential^2) from one-sided slopes
s at the face; the node prefactor W uses centered slopes.  The contact
angle enters through one ghost layer: the ghost value is chosen so the
centered normal derivative p at the boundary node solves

    p = phi * sqrt(1 + p^2 + |tangential grad|^2)

in closed form, p = phi * sqrt((1 + |tangential|^2) / (1 - phi^2)), which
is always solvable for |phi| < 1.  With that closure the discrete normal
flux at the boundary node equals phi exactly.

Jacobians of the nonlinear residual are assembled by complex-step
differentiation with stencil coloring: the residual is complex-analytic in
the field values, so Im R(u + i*delta e_S)/delta recovers the exact
analytic derivatives to machine precision, one color group at a time.
"""

from __future__ import annotations

import math
from typing import Dict, Tuple

import numpy as np
import scipy.sparse as sp

from .grids import AngleData, Field, Grid

__all__ = [
    "ghost_fill",
    "mcf_operator",
    "integrate_domain",
    "integrate_boundary",
    "field_mean",
    "field_osc",
    "flux_balance",
    "capillary_residual",
    "capillary_jacobian",
    "contact_normal_slope",
    "node_area_element",
    "node_slopes",
    "semi_implicit_matrix",
]

_CSTEP = 1e-50


def contact_normal_slope(phi, tangential_sq=0.0):
    """Closed-form solution p of p = phi*sqrt(1 + p^2 + T) for |phi| < 1:
    the inward normal derivative matching contact angle phi when the
    squared tangential slope is T."""
    phi = np.asarray(phi, dtype=float)
    if np.any(np.abs(phi) >= 1.0):
        raise ValueError("ill-posed contact angle: |phi| must be below 1")
    out = phi * np.sqrt((1.0 + tangential_sq) / (1.0 - phi * phi))
    return out if out.ndim else float(out)


def _normal_slope(grid: Grid, interior: np.ndarray, angle: AngleData):
    """Closed-form boundary normal derivative(s) p for the ghost closure."""
    phi = angle.phi
    if grid.is_disk:
        du = np.roll(interior[-1], -1) - np.roll(interior[-1], 1)
        tang = du / (2.0 * grid.h_theta * grid.geom.R)
        return phi * np.sqrt((1.0 + tang * tang) / (1.0 - phi * phi))
    return phi / np.sqrt(1.0 - phi * phi)


def extend_values(grid: Grid, interior: np.ndarray, angle: AngleData) -> np.ndarray:
    """Attach the ghost layer (and pole mirror) to interior values.

    Works for complex input so the same code path serves the complex-step
    Jacobian.
    """
    p = _normal_slope(grid, interior, angle)
    h = grid.h_r
    if grid.geom.kind == "interval":
        ghost_a = interior[1] - 2.0 * h * p[0]
        ghost_b = interior[-2] - 2.0 * h * p[1]
        return np.concatenate(([ghost_a], interior, [ghost_b]))
    if grid.is_disk:
        mirror = np.roll(interior[0], grid.n_theta // 2)
        ghost = interior[-2] - 2.0 * h * p
        return np.vstack((mirror[None, :], interior, ghost[None, :]))
    mirror = interior[0]
    ghost = interior[-2] - 2.0 * h * p[0]
    return np.concatenate(([mirror], interior, [ghost]))


def ghost_fill(grid: Grid, field: Field, angle: AngleData) -> Field:
    """Return a copy of the field with ghosts set by the contact-angle
    closure.  Idempotent: ghosts depend only on interior values."""
    interior = np.asarray(field.interior, dtype=float)
    if not np.all(np.isfinite(interior)):
        raise ValueError("field has non-finite interior values")
    if not angle.phi0 < 1.0:
        raise ValueError("ill-posed contact angle: |phi| must be below 1")
    return Field(extend_values(grid, interior, angle), field.t)


def _mcf_interval(grid: Grid, ext: np.ndarray) -> np.ndarray:
    h = grid.h_r
    s = (ext[1:] - ext[:-1]) / h
    q = s / np.sqrt(1.0 + s * s)
    c = (ext[2:] - ext[:-2]) / (2.0 * h)
    w_node = np.sqrt(1.0 + c * c)
    return w_node * (q[1:] - q[:-1]) / h


def _mcf_radial(grid: Grid, ext: np.ndarray) -> np.ndarray:
    h = grid.h_r
    s = (ext[1:] - ext[:-1]) / h
    q = s / np.sqrt(1.0 + s * s)
    c = (ext[2:] - ext[:-2]) / (2.0 * h)
    w_node = np.sqrt(1.0 + c * c)
    sf = grid.sigma_faces
    div = (sf[1:] * q[1:] - sf[:-1] * q[:-1]) / (grid.sigma_nodes * h)
    return w_node * div


def _disk_pieces(grid: Grid, ext: np.ndarray):
    h, ht = grid.h_r, grid.h_theta
    r = grid.nodes
    r_ext = np.concatenate(([r[0]], r, [grid.geom.R + h]))
    w_ext = (np.roll(ext, -1, axis=1) - np.roll(ext, 1, axis=1)) / (2.0 * ht * r_ext[:, None])
    c_int = (ext[2:] - ext[:-2]) / (2.0 * h)
    w_int = w_ext[1:-1]

    s_r = (ext[1:] - ext[:-1]) / h
    wbar2 = 0.5 * (w_ext[:-1] ** 2 + w_ext[1:] ** 2)
    q_r = s_r / np.sqrt(1.0 + s_r * s_r + wbar2)

    u = ext[1:-1]
    s_t = (np.roll(u, -1, axis=1) - u) / ht
    cbar2 = 0.5 * (c_int ** 2 + np.roll(c_int, -1, axis=1) ** 2)
    q_t = s_t / np.sqrt(1.0 + (s_t / r[:, None]) ** 2 + cbar2)
    return c_int, w_int, q_r, q_t


def _mcf_disk(grid: Grid, ext: np.ndarray) -> np.ndarray:
    c_int, w_int, q_r, q_t = _disk_pieces(grid, ext)
    r = grid.nodes[:, None]
    sf = grid.sigma_faces[:, None]
    div_r = (sf[1:] * q_r[1:] - sf[:-1] * q_r[:-1]) / (grid.sigma_nodes[:, None] * grid.h_r)
    div_t = (q_t - np.roll(q_t, 1, axis=1)) / (r * r * grid.h_theta)
    w_node = np.sqrt(1.0 + c_int ** 2 + w_int ** 2)
    return w_node * (div_r + div_t)


def mcf_from_extended(grid: Grid, ext: np.ndarray) -> np.ndarray:
    if grid.geom.kind == "interval":
        return _mcf_interval(grid, ext)
    if grid.is_disk:
        return _mcf_disk(grid, ext)
    return _mcf_radial(grid, ext)


def mcf_operator(grid: Grid, field: Field) -> Field:
    """Apply W * div(grad u / W) to a ghost-closed field."""
    if not np.all(np.isfinite(field.values)):
        raise ValueError("mcf_operator needs finite, ghost-closed values")
    out = np.full(grid.ext_shape, np.nan)
    out[1:-1] = mcf_from_extended(grid, field.values)
    return Field(out, field.t)


def node_slopes(grid: Grid, ext: np.ndarray):
    """Centered slopes at the real nodes: radial (coordinate) slope, and
    the physical tangential slope on the disk (None otherwise)."""
    c = (ext[2:] - ext[:-2]) / (2.0 * grid.h_r)
    if not grid.is_disk:
        return c, None
    r = grid.nodes[:, None]
    u = ext[1:-1]
    w = (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * grid.h_theta * r)
    return c, w


def node_area_element(grid: Grid, ext: np.ndarray) -> np.ndarray:
    """W = sqrt(1 + |grad u|^2) at the real nodes."""
    c, w = node_slopes(grid, ext)
    if w is None:
        return np.sqrt(1.0 + c * c)
    return np.sqrt(1.0 + c * c + w * w)


# -- quadratures --------------------------------------------------------------


def _interior_of(f):
    return f.interior if isinstance(f, Field) else np.asarray(f)


def integrate_domain(grid: Grid, f) -> float:
    """Volume integral of a nodal field with the metric weight sigma
    (midpoint masses on the staggered cells, trapezoid on the interval)."""
    v = _interior_of(f)
    if not np.all(np.isfinite(v)):
        raise ValueError("cannot integrate non-finite values")
    if grid.is_disk:
        return float(np.sum(grid.quad_masses[:, None] * v) * grid.h_theta)
    total = float(np.dot(grid.quad_masses, v))
    if grid.geom.kind == "radial_ball":
        total *= grid.geom.sphere_area
    return total


def domain_volume(grid: Grid) -> float:
    ones = np.ones(grid.shape)
    return integrate_domain(grid, ones)


def integrate_boundary(grid: Grid, angle: AngleData) -> float:
    """Boundary integral of phi with the induced measure: unit weights at
    the interval endpoints, sigma(R) |S^{n-1}| for symmetric ball data,
    sigma(R) h_theta per ray on the disk."""
    geom = grid.geom
    if geom.kind == "interval":
        return float(angle.phi[0] + angle.phi[1])
    sig_R = float(geom.volume_weight(geom.R))
    if grid.is_disk:
        return float(sig_R * grid.h_theta * np.sum(angle.phi))
    return float(sig_R * geom.sphere_area * angle.phi[0])


def field_mean(grid: Grid, f) -> float:
    return integrate_domain(grid, f) / domain_volume(grid)


def field_osc(f) -> float:
    v = _interior_of(f)
    return float(np.max(v) - np.min(v))


def flux_balance(grid: Grid, ext: np.ndarray) -> Tuple[float, float, float]:
    """Exact-summation check of the discrete divergence identity.

    Returns (interior_sum, boundary_flux, gap) where interior_sum is
    sum_i sigma_i h div_i (times h_theta on the disk), boundary_flux the
    telescoped outermost-face flux, and gap their difference.  For any
    ghost-closed field the gap is pure roundoff.
    """
    h = grid.h_r
    if grid.geom.kind == "interval":
        s = (ext[1:] - ext[:-1]) / h
        q = s / np.sqrt(1.0 + s * s)
        terms = q[1:] - q[:-1]
        bflux = float(q[-1] - q[0])
    elif grid.is_disk:
        _, _, q_r, q_t = _disk_pieces(grid, ext)
        sf = grid.sigma_faces[:, None]
        terms_r = (sf[1:] * q_r[1:] - sf[:-1] * q_r[:-1]) * grid.h_theta
        terms_t = (q_t - np.roll(q_t, 1, axis=1)) * (h / grid.nodes[:, None])
        terms = np.concatenate((terms_r.ravel(), terms_t.ravel()))
        bflux = float(math.fsum((grid.sigma_faces[-1] * q_r[-1] * grid.h_theta).tolist()))
    else:
        s = (ext[1:] - ext[:-1]) / h
        q = s / np.sqrt(1.0 + s * s)
        sf = grid.sigma_faces
        terms = sf[1:] * q[1:] - sf[:-1] * q[:-1]
        bflux = float(sf[-1] * q[-1] - sf[0] * q[0])
    interior_sum = math.fsum(np.asarray(terms).ravel().tolist())
    return interior_sum, bflux, interior_sum - bflux


# -- nonlinear residual and its exact Jacobian --------------------------------


def capillary_residual(grid: Grid, interior: np.ndarray, angle: AngleData,
                       eps: float) -> np.ndarray:
    """R(u) = W div(grad u / W) - eps*u with the contact-angle ghost
    closure.  Accepts complex input (used by the Jacobian)."""
    ext = extend_values(grid, interior, angle)
    return mcf_from_extended(grid, ext) - eps * interior


_COLOR_CACHE: Dict[tuple, tuple] = {}


def _smallest_divisor(n: int, at_least: int) -> int:
    for d in range(at_least, n + 1):
        if n % d == 0:
            return d
    return n


def _coloring(grid: Grid, reach_theta: int):
    """Color groups and per-column row supersets for Jacobian probing.

    reach_theta = 2 covers the full nonlinear stencil (ghost chains reach
    two rays sideways); 1 suffices for the frozen-coefficient operator.
    Ring-0 columns of the disk are probed individually because the pole
    mirror couples antipodal rays.
    """
    key = (grid.geom.kind, grid.n_r, grid.n_theta, reach_theta)
    if key in _COLOR_CACHE:
        return _COLOR_CACHE[key]

    if not grid.is_disk:
        m = grid.n_nodes
        colors = [np.arange(c, m, 3) for c in range(3)]
        col_rows = [np.arange(max(0, j - 1), min(m, j + 2)) for j in range(m)]
    else:
        mr, nt = grid.n_nodes, grid.n_theta
        mth = _smallest_divisor(nt, 2 * reach_theta + 1)
        flat = lambda i, j: i * nt + (j % nt)
        colors = []
        # pole ring: one column per color (antipodal mirror coupling)
        for j in range(nt):
            colors.append(np.array([flat(0, j)]))
        for ci in range(3):
            for cj in range(mth):
                idx = [flat(i, j) for i in range(1 + ci, mr, 3) for j in range(cj, nt, mth)]
                if idx:
                    colors.append(np.array(sorted(idx)))
        col_rows = []
        for i in range(mr):
            for j in range(nt):
                rows = [flat(ii, j + dj)
                        for ii in range(max(0, i - 1), min(mr, i + 2))
                        for dj in range(-reach_theta, reach_theta + 1)]
                if i == 0:
                    rows += [flat(0, j - nt // 2 + d) for d in (-1, 0, 1)]
                col_rows.append(np.unique(rows))
    _COLOR_CACHE[key] = (colors, col_rows)
    return colors, col_rows


def _probe_matrix(grid: Grid, apply_fn, n: int, colors, col_rows) -> sp.csr_matrix:
    rows_acc, cols_acc, data_acc = [], [], []
    for color in colors:
        out = apply_fn(color)
        for c in color:
            rr = col_rows[c]
            rows_acc.append(rr)
            cols_acc.append(np.full(len(rr), c))
            data_acc.append(out[rr])
    rows = np.concatenate(rows_acc)
    cols = np.concatenate(cols_acc)
    data = np.concatenate(data_acc)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
    mat.eliminate_zeros()
    return mat


def capillary_jacobian(grid: Grid, interior: np.ndarray, angle: AngleData,
                       eps: float) -> sp.csr_matrix:
    """Exact Jacobian of capillary_residual at the given state, assembled
    by colored complex-step differentiation."""
    n = grid.n_unknowns
    colors, col_rows = _coloring(grid, reach_theta=2)
    base = np.asarray(interior, dtype=complex).ravel()
    shape = grid.shape

    def probe(color):
        u = base.copy()
        u[color] += 1j * _CSTEP
        res = capillary_residual(grid, u.reshape(shape), angle, eps)
        return res.ravel().imag / _CSTEP

    return _probe_matrix(grid, probe, n, colors, col_rows)


# -- lagged-coefficient linear operator for semi-implicit stepping ------------


class _FrozenOperator:
    """Linearization of the flux form with W factors and boundary normal
    slopes frozen at a reference state; affine in the field."""

    def __init__(self, grid: Grid, ext0: np.ndarray, angle: AngleData):
        self.grid = grid
        self.p0 = _normal_slope(grid, ext0[1:-1], angle)
        h = grid.h_r
        if grid.is_disk:
            r = grid.nodes
            r_ext = np.concatenate(([r[0]], r, [grid.geom.R + h]))
            ht = grid.h_theta
            w_ext = (np.roll(ext0, -1, axis=1) - np.roll(ext0, 1, axis=1)) / (2.0 * ht * r_ext[:, None])
            c_int = (ext0[2:] - ext0[:-2]) / (2.0 * h)
            s_r = (ext0[1:] - ext0[:-1]) / h
            self.w_rface = np.sqrt(1.0 + s_r ** 2 + 0.5 * (w_ext[:-1] ** 2 + w_ext[1:] ** 2))
            u = ext0[1:-1]
            s_t = (np.roll(u, -1, axis=1) - u) / ht
            cbar2 = 0.5 * (c_int ** 2 + np.roll(c_int, -1, axis=1) ** 2)
            self.w_tface = np.sqrt(1.0 + (s_t / r[:, None]) ** 2 + cbar2)
            self.w_node = np.sqrt(1.0 + c_int ** 2 + w_ext[1:-1] ** 2)
        else:
            s = (ext0[1:] - ext0[:-1]) / h
            self.w_rface = np.sqrt(1.0 + s * s)
            c = (ext0[2:] - ext0[:-2]) / (2.0 * h)
            self.w_node = np.sqrt(1.0 + c * c)

    def _extend(self, v: np.ndarray) -> np.ndarray:
        g = self.grid
        h = g.h_r
        if g.geom.kind == "interval":
            return np.concatenate(([v[1] - 2.0 * h * self.p0[0]], v,
                                   [v[-2] - 2.0 * h * self.p0[1]]))
        if g.is_disk:
            mirror = np.roll(v[0], g.n_theta // 2)
            ghost = v[-2] - 2.0 * h * self.p0
            return np.vstack((mirror[None, :], v, ghost[None, :]))
        return np.concatenate(([v[0]], v, [v[-2] - 2.0 * h * self.p0[0]]))

    def apply(self, v: np.ndarray) -> np.ndarray:
        g = self.grid
        h = g.h_r
        ext = self._extend(v)
        q = (ext[1:] - ext[:-1]) / (h * self.w_rface)
        if g.geom.kind == "interval":
            return self.w_node * (q[1:] - q[:-1]) / h
        if g.is_disk:
            sf = g.sigma_faces[:, None]
            div_r = (sf[1:] * q[1:] - sf[:-1] * q[:-1]) / (g.sigma_nodes[:, None] * h)
            u = ext[1:-1]
            q_t = (np.roll(u, -1, axis=1) - u) / (g.h_theta * self.w_tface)
            r = g.nodes[:, None]
            div_t = (q_t - np.roll(q_t, 1, axis=1)) / (r * r * g.h_theta)
            return self.w_node * (div_r + div_t)
        sf = g.sigma_faces
        div = (sf[1:] * q[1:] - sf[:-1] * q[:-1]) / (g.sigma_nodes * h)
        return self.w_node * div


def semi_implicit_matrix(grid: Grid, ext0: np.ndarray, angle: AngleData,
                         dt: float) -> sp.csc_matrix:
    """I - dt*M with M the frozen-coefficient linearization at ext0.
    Used in increment form: (I - dt M) du = dt F(u_old)."""
    frozen = _FrozenOperator(grid, ext0, angle)
    n = grid.n_unknowns
    colors, col_rows = _coloring(grid, reach_theta=1)
    shape = grid.shape
    base = frozen.apply(np.zeros(shape)).ravel()

    def probe(color):
        v = np.zeros(n)
        v[color] = 1.0
        return frozen.apply(v.reshape(shape)).ravel() - base

    m = _probe_matrix(grid, probe, n, colors, col_rows)
    return (sp.identity(n, format="csc") - dt * m.tocsc())
