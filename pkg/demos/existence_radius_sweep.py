"""Solvability region for translators on hyperbolic geodesic balls.

The existence conditions trade the convexity of the ball against the
ambient curvature.  On the hyperbolic plane (curvature -1) they hold up
to radius 1/(2 sqrt 2) ~ 0.3536 and fail beyond; the sweep below shows
the margin closing, the admissible angle size eps0, and the closed-form
radius bounds in other dimensions and curvature regimes.
"""

from mcfsolve import (angle_from_spec, check_existence, make_geometry,
                      make_grid, radius_bound_ch, radius_bound_hyperbolic)

print("hyperbolic plane (K = 1), geodesic ball of radius R, phi = 0.05")
print("      R    curvature margin    eps_alpha      eps0   verdict")
for R in (0.20, 0.25, 0.30, 0.33, 0.35, 0.36, 0.40, 0.50):
    geom = make_geometry({"kind": "radial_ball", "n": 2, "R": R,
                          "curvature": {"model": "hyperbolic", "K": 1.0}})
    grid = make_grid(geom, 16)
    rep = check_existence(geom, angle_from_spec(grid, "const:0.05"))
    rc2 = next(c for c in rep.conditions if c.name == "ric_cond2")
    print(f"  {R:5.2f}    {rc2.rhs - rc2.lhs:+13.4f}    {rep.eps_alpha:9.6f} "
          f" {rep.eps0:9.6f}   {'pass' if rep.overall else 'fail'}")

print(f"\nthreshold radius (n=2, K=1): {radius_bound_hyperbolic(2):.6f}")
print("closed-form admissible radii:")
print("  exactly hyperbolic, K=1 :",
      ", ".join(f"n={n}: {radius_bound_hyperbolic(n):.5f}" for n in (2, 3, 4, 10)))
print("  pinched below by -K^2   :",
      ", ".join(f"(n={n},K={k}): {radius_bound_ch(n, k):.5f}"
                for n, k in ((2, 1.0), (2, 2.0), (3, 1.0), (4, 1.0))))

print("\nfull conditions table at R = 0.3:")
geom = make_geometry({"kind": "radial_ball", "n": 2, "R": 0.3,
                      "curvature": {"model": "hyperbolic", "K": 1.0}})
grid = make_grid(geom, 16)
rep = check_existence(geom, angle_from_spec(grid, "const:0.05"))
for c in rep.conditions:
    note = f"  [{c.note}]" if c.note else ""
    print(f"  {c.name:12s} lhs={c.lhs:10.5f}  rhs={c.rhs:10.5f}  "
          f"{'ok' if c.passed else 'violated'}{note}")
