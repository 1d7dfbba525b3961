"""Structured grids, discrete scalar fields, and contact-angle data.

Grid layouts
------------
interval
    Vertex-centered nodes x_i = a + i*h, i = 0..N, with both endpoints on
    the boundary and one ghost node beyond each end.
radial_ball / polar_disk (radial direction)
    Staggered nodes r_i = (i + 1/2)*h with h = R/(N - 1/2), so the first
    node sits at h/2 (no node at the pole) and the last node lies exactly
    on the boundary r = R.  Cell faces fall on i*h; the innermost face is
    the pole, where sigma(0) = 0 removes the flux.  One ghost node at
    R + h, plus a mirror slot across the pole.
polar_disk (angular direction)
    Periodic nodes theta_j = j*h_theta, h_theta = 2*pi/N_theta, N_theta
    even (the pole mirror pairs antipodal rays).

Fields store one ghost layer: 1D values have shape (M+2,), disk values
(M+2, N_theta), with row 0 the pole mirror and row -1 the outer ghost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .geometry import Geometry

__all__ = ["Grid", "Field", "AngleData", "make_grid", "make_field", "angle_from_spec"]


@dataclass(frozen=True)
class Grid:
    geom: Geometry
    n_r: int
    h_r: float
    nodes: np.ndarray            # coordinates of real nodes (x or r)
    faces: np.ndarray            # face coordinates between extended nodes
    sigma_nodes: np.ndarray      # sigma at real nodes
    sigma_faces: np.ndarray      # sigma at faces (0 at the pole face)
    op_weights: np.ndarray       # sigma_i * h_r: control weights of the flux form
    quad_masses: np.ndarray      # clipped-cell midpoint masses for quadrature
    n_theta: int = 0
    h_theta: float = 0.0
    theta: Optional[np.ndarray] = None

    @property
    def is_disk(self) -> bool:
        return self.geom.kind == "polar_disk"

    @property
    def shape(self):
        return (self.n_nodes, self.n_theta) if self.is_disk else (self.n_nodes,)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_unknowns(self) -> int:
        return self.n_nodes * (self.n_theta if self.is_disk else 1)

    @property
    def ext_shape(self):
        if self.is_disk:
            return (self.n_nodes + 2, self.n_theta)
        return (self.n_nodes + 2,)

    def node_coordinates(self):
        """Coordinate columns matching the flattened interior layout."""
        if self.is_disk:
            r = np.repeat(self.nodes, self.n_theta)
            th = np.tile(self.theta, self.n_nodes)
            return r, th
        return (self.nodes,)


def make_grid(geom: Geometry, n_r: int, n_theta: Optional[int] = None) -> Grid:
    """Build the structured grid for a geometry at resolution n_r
    (cells for intervals, nodes for radial grids) and n_theta rays for
    the polar disk."""
    if n_r < 8:
        raise ValueError("grid resolution N_r must be at least 8")

    if geom.kind == "interval":
        h = (geom.b - geom.a) / n_r
        nodes = geom.a + h * np.arange(n_r + 1)
        nodes[-1] = geom.b
        faces = np.concatenate(([geom.a - 0.5 * h], geom.a + h * (np.arange(n_r + 1) + 0.5)))
        ones = np.ones_like(nodes)
        masses = np.full(n_r + 1, h)
        masses[0] = masses[-1] = 0.5 * h
        return Grid(
            geom=geom, n_r=n_r, h_r=h, nodes=nodes, faces=faces,
            sigma_nodes=ones, sigma_faces=np.ones(n_r + 2),
            op_weights=ones * h, quad_masses=masses,
        )

    # staggered radial layout shared by balls and the disk
    m = n_r
    h = geom.R / (m - 0.5)
    nodes = (np.arange(m) + 0.5) * h
    nodes[-1] = geom.R
    faces = np.concatenate((h * np.arange(m), [geom.R + 0.5 * h]))
    sigma_nodes = np.asarray(geom.volume_weight(nodes))
    sigma_faces = np.asarray(geom.volume_weight(faces))
    sigma_faces[0] = 0.0  # pole face, exactly
    # clipped-cell midpoint masses: full cells [ih, (i+1)h], boundary half
    # cell [R - h/2, R] with sigma taken at the half-cell midpoint
    mids = nodes.copy()
    widths = np.full(m, h)
    mids[-1] = geom.R - 0.25 * h
    widths[-1] = 0.5 * h
    masses = np.asarray(geom.volume_weight(mids)) * widths

    if geom.kind == "radial_ball":
        return Grid(
            geom=geom, n_r=m, h_r=h, nodes=nodes, faces=faces,
            sigma_nodes=sigma_nodes, sigma_faces=sigma_faces,
            op_weights=sigma_nodes * h, quad_masses=masses,
        )

    if n_theta is None:
        n_theta = 64
    if n_theta < 8 or n_theta % 2:
        raise ValueError("polar_disk needs an even N_theta >= 8")
    h_theta = 2.0 * math.pi / n_theta
    theta = h_theta * np.arange(n_theta)
    return Grid(
        geom=geom, n_r=m, h_r=h, nodes=nodes, faces=faces,
        sigma_nodes=sigma_nodes, sigma_faces=sigma_faces,
        op_weights=sigma_nodes * h, quad_masses=masses,
        n_theta=n_theta, h_theta=h_theta, theta=theta,
    )


@dataclass
class Field:
    """A scalar field on a grid, ghost layer included.

    ``values`` holds the extended array (first and last slots along the
    radial axis are ghosts / the pole mirror); ``interior`` views the real
    nodes.  ``t`` tags the field with its flow time.
    """

    values: np.ndarray
    t: float = 0.0

    @property
    def interior(self) -> np.ndarray:
        return self.values[1:-1]

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.t)


def make_field(grid: Grid, data: Union[float, np.ndarray, Callable, None] = 0.0,
               t: float = 0.0) -> Field:
    """Allocate a field; ghosts start as NaN until closed by ghost_fill."""
    values = np.full(grid.ext_shape, np.nan)
    if data is None:
        data = 0.0
    if callable(data):
        if grid.is_disk:
            rr = grid.nodes[:, None]
            tt = grid.theta[None, :]
            values[1:-1] = data(rr, tt)
        else:
            values[1:-1] = data(grid.nodes)
    else:
        values[1:-1] = data
    return Field(values, t)


@dataclass(frozen=True)
class AngleData:
    """Contact-angle datum phi on the boundary, |phi| <= phi0 < 1.

    ``phi`` holds (phi_a, phi_b) for intervals, a scalar array (1,) for
    radial balls, and per-ray values (N_theta,) for the disk.
    """

    phi: np.ndarray
    phi0: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.phi)):
            raise ValueError("contact angle must be finite")
        if not self.phi0 < 1.0:
            raise ValueError("contact angle magnitude must be strictly below 1")

    def extension(self, grid: Grid) -> np.ndarray:
        """phi extended to the interior nodes, constant along normal rays."""
        if grid.geom.kind == "interval":
            mid = 0.5 * (grid.geom.a + grid.geom.b)
            return np.where(grid.nodes < mid, self.phi[0], self.phi[1])
        if grid.is_disk:
            return np.broadcast_to(self.phi, (grid.n_nodes, grid.n_theta)).copy()
        return np.full(grid.n_nodes, self.phi[0])


def angle_from_spec(grid: Grid, spec: str) -> AngleData:
    """Parse an angle spec string: ``const:<v>`` everywhere, or
    ``fourier:<a0,a1,b1,...>`` for per-ray values on the polar disk."""
    if not isinstance(spec, str) or ":" not in spec:
        raise ValueError(f"angle spec must look like 'const:<v>' or 'fourier:<coeffs>', got {spec!r}")
    head, _, body = spec.partition(":")
    if head == "const":
        v = float(body)
        if grid.geom.kind == "interval":
            phi = np.array([v, v])
        elif grid.is_disk:
            phi = np.full(grid.n_theta, v)
        else:
            phi = np.array([v])
    elif head == "fourier":
        if not grid.is_disk:
            raise ValueError("fourier angle data requires a polar_disk geometry")
        coeffs = [float(c) for c in body.split(",") if c.strip()]
        if not coeffs:
            raise ValueError("fourier angle spec needs at least a0")
        phi = np.full(grid.n_theta, coeffs[0])
        pairs = coeffs[1:]
        for k in range(0, len(pairs), 2):
            mode = k // 2 + 1
            phi += pairs[k] * np.cos(mode * grid.theta)
            if k + 1 < len(pairs):
                phi += pairs[k + 1] * np.sin(mode * grid.theta)
    else:
        raise ValueError(f"unknown angle spec kind {head!r}")
    phi0 = float(np.max(np.abs(phi)))
    if phi0 >= 1.0:
        raise ValueError("contact angle too steep: |phi| must stay below 1")
    return AngleData(phi=phi, phi0=phi0)
