"""Solvability checks for the translator problem on convex model-space balls.

For a strictly convex domain with defining-function convexity k1, boundary
principal curvature kappa0, and Hessian bound M1, a translator with small
contact angle exists when, for some alpha < min(kappa0, k1 (n-1)/2), the
ambient curvature is dominated by the convexity margin,

    RIC_EFF < alpha * (k1 (n-1) - alpha),

and the admissible angle size eps_alpha solves

    kappa0 - alpha = eps * (M1 + 3) / (1 - eps^2).

RIC_EFF is the curvature constant entering the interior maximum estimate,
taken with the sharp per-model values: 0 (flat), 2 (n-1) K^2 (exactly
hyperbolic, where the mixed Ricci terms vanish), K^2 ((n+1)^2/2 - 2) for a
pinched Cartan-Hadamard space (2 K^2 when n = 2, where the mixed term is
zero).  The general-manifold form (n+1)|Ric| is not used on this catalog.

The checker scans alpha on a fine grid, preferring the largest usable
angle eps0 = min(eps_alpha, 1/4) among alphas that satisfy the curvature
condition, with the curvature margin as tie-break.  One condition carries
an estimate constant that is not computable from first principles; it is
reported as conditional on the strict curvature margin rather than
invented.

Closed-form admissible-radius bounds for geodesic balls:

    hyperbolic (curvature -1):  R < 1/(2 sqrt 2)  (n = 2),
                                R < (n-1)/(2n-1)  (n >= 3);
    pinched below by -K^2:      R < 1/(2 sqrt 2 K)  (n = 2),
                                R < sqrt((n-2) / (K^2 ((n+1)^2/2 - 2))).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .geometry import CurvatureModel, Geometry
from .grids import AngleData

__all__ = ["Condition", "HypothesisReport", "check_existence",
           "radius_bound_hyperbolic", "radius_bound_ch", "effective_ricci_constant"]

ALPHA_GRID_POINTS = 10_000


@dataclass(frozen=True)
class Condition:
    name: str
    lhs: float
    rhs: float
    passed: bool
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "lhs": float(self.lhs), "rhs": float(self.rhs),
             "pass": bool(self.passed)}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class HypothesisReport:
    k1: float
    kappa0: float
    M1: float
    ricci_abs: float
    ric_eff: float
    alpha_star: float
    eps_alpha: float
    eps0: float
    phi0: float
    theta_c1: float
    conditions: List[Condition]
    radius_bound: Optional[float]
    overall: bool

    def to_dict(self):
        return {
            "k1": float(self.k1), "kappa0": float(self.kappa0), "M1": float(self.M1),
            "ricci_abs": float(self.ricci_abs), "ric_eff": float(self.ric_eff),
            "alpha_star": float(self.alpha_star), "eps_alpha": float(self.eps_alpha),
            "eps0": float(self.eps0), "phi0": float(self.phi0),
            "theta_c1": float(self.theta_c1),
            "conditions": [c.to_dict() for c in self.conditions],
            "radius_bound": None if self.radius_bound is None else float(self.radius_bound),
            "overall": bool(self.overall),
        }


def effective_ricci_constant(geom: Geometry) -> float:
    """Curvature constant on the left of the convexity condition."""
    n, K = geom.dim, geom.K
    if geom.curvature is CurvatureModel.FLAT:
        return 0.0
    if geom.curvature is CurvatureModel.HYPERBOLIC:
        return 2.0 * (n - 1) * K * K
    if n == 2:
        return 2.0 * K * K
    return K * K * ((n + 1) ** 2 / 2.0 - 2.0)


def radius_bound_hyperbolic(n: int) -> float:
    """Admissible ball radius in hyperbolic space of curvature -1
    (scale by 1/K for curvature -K^2)."""
    if n < 2:
        raise ValueError("radius bound requires ambient dimension n >= 2")
    if n == 2:
        return 1.0 / (2.0 * math.sqrt(2.0))
    return (n - 1) / (2.0 * n - 1.0)


def radius_bound_ch(n: int, K: float) -> float:
    """Admissible ball radius under a sectional-curvature floor -K^2."""
    if n < 2:
        raise ValueError("radius bound requires ambient dimension n >= 2")
    if not K > 0:
        raise ValueError("curvature scale K must be positive")
    if n == 2:
        return 1.0 / (2.0 * math.sqrt(2.0) * K)
    return math.sqrt((n - 2) / (K * K * ((n + 1) ** 2 / 2.0 - 2.0)))


def _largest_eps(a: float, b: float) -> float:
    """Largest eps with a * (1 - eps^2) = eps * b, i.e. the positive root of
    a eps^2 + b eps - a = 0; zero when the gap a is not positive."""
    if a <= 0.0:
        return 0.0
    return (-b + math.sqrt(b * b + 4.0 * a * a)) / (2.0 * a)


def _theta_c1_norm(geom: Geometry, angle: AngleData) -> float:
    """C^1 norm of the contact angle theta = arccos(|phi| form) along the
    boundary, in arc length.  Zero for constant data; for per-ray data the
    trigonometric interpolant is differentiated spectrally."""
    phi = np.asarray(angle.phi, dtype=float)
    if phi.size <= 1 or np.ptp(phi) == 0.0:
        return 0.0
    n = phi.size
    k = np.fft.rfftfreq(n, d=1.0 / n) * 1j
    phi_hat = np.fft.rfft(phi)
    dphi = np.fft.irfft(k * phi_hat, n) / geom.R
    d2phi = np.fft.irfft(k * k * phi_hat, n) / geom.R ** 2
    s2 = 1.0 - phi * phi
    dtheta = -dphi / np.sqrt(s2)
    d2theta = -(d2phi * s2 + phi * dphi * dphi) / s2 ** 1.5
    return float(np.max(np.abs(dtheta)) + np.max(np.abs(d2theta)))


def check_existence(geom: Geometry, angle: AngleData) -> HypothesisReport:
    """Evaluate the solvability conditions for a ball/disk geometry and a
    contact-angle datum; see the module docstring for the condition set."""
    if geom.kind == "interval":
        raise ValueError("existence check requires defining-function data (ball or disk)")

    n = geom.dim
    k1, kappa0, m1 = geom.k1, geom.kappa0, geom.M1
    ric_eff = effective_ricci_constant(geom)
    alpha_max = min(kappa0, k1 * (n - 1) / 2.0)

    alphas = alpha_max * np.arange(1, ALPHA_GRID_POINTS) / ALPHA_GRID_POINTS
    rhs = alphas * (k1 * (n - 1) - alphas)
    curv_ok = ric_eff < rhs
    gaps = kappa0 - alphas
    eps_a = np.where(gaps > 0,
                     (-(m1 + 3.0) + np.sqrt((m1 + 3.0) ** 2 + 4.0 * gaps * gaps))
                     / np.where(gaps > 0, 2.0 * gaps, 1.0),
                     0.0)
    eps0_grid = np.where(curv_ok, np.minimum(eps_a, 0.25), 0.0)

    if np.any(curv_ok):
        # prefer the largest usable angle, then the widest curvature margin
        best = int(np.lexsort((rhs - ric_eff, eps0_grid))[-1])
    else:
        best = int(np.argmax(rhs - ric_eff))
    alpha_star = float(alphas[best])
    eps_alpha = float(_largest_eps(kappa0 - alpha_star, m1 + 3.0))
    curv_pass = bool(curv_ok[best])
    eps0 = min(eps_alpha, 0.25) if curv_pass else 0.0

    rhs_star = float(rhs[best])
    eps_lhs = eps0 * (m1 + 3.0) / (1.0 - eps0 * eps0) if eps0 < 1 else math.inf
    conditions = [
        Condition("alpha_range", alpha_star, float(alpha_max),
                  0.0 < alpha_star < alpha_max),
        Condition("ric_cond2", float(ric_eff), rhs_star, curv_pass),
        Condition("eps_cond", float(eps_lhs), float(kappa0 - alpha_star),
                  eps_lhs <= kappa0 - alpha_star + 1e-12 and eps_alpha > 0.0),
        Condition("ric_cond", float(ric_eff), rhs_star, curv_pass,
                  note="conditional: the estimate constant multiplying eps0 is "
                       "not computable; a strict margin here admits a small "
                       "enough eps0"),
    ]

    phi0 = angle.phi0
    theta_c1 = _theta_c1_norm(geom, angle)
    angle_ok = phi0 <= eps0 and theta_c1 <= eps0

    if geom.curvature is CurvatureModel.HYPERBOLIC:
        radius_bound = radius_bound_hyperbolic(n) / geom.K
    elif geom.curvature is CurvatureModel.PINCHED_CH:
        radius_bound = radius_bound_ch(n, geom.K)
    else:
        radius_bound = None

    overall = all(c.passed for c in conditions) and angle_ok
    return HypothesisReport(
        k1=k1, kappa0=kappa0, M1=m1, ricci_abs=geom.ricci_abs, ric_eff=ric_eff,
        alpha_star=alpha_star, eps_alpha=eps_alpha, eps0=eps0,
        phi0=phi0, theta_c1=theta_c1, conditions=conditions,
        radius_bound=radius_bound, overall=overall,
    )
