"""Grid refinement study on the closed-form case.

The flux-form operator and its boundary closure are second-order
accurate in the bulk, and both the quadrature speed and the profile
inherit that rate.  Observed orders are reported against the exact
speed 1/2 and the exact profile; a disk case without a closed form is
measured by Cauchy differences between levels.
"""

from mcfsolve import refinement_study

print("interval oracle case, three levels starting at N_r = 100")
table = refinement_study({"preset": "grim_reaper", "solver": {"N_r": 100}}, 3)
print("  level      h_r        C_quad        |C err|      |u err|")
for row in table["rows"]:
    print(f"  {row['level']:5d}  {row['h_r']:9.5f}  {row['C_quad']:.8f}"
          f"  {row['C_error']:.3e}  {row['u_error']:.3e}")
print("  observed C orders:", ["%.2f" % o for o in table["c_orders"]])
print("  observed u orders:", ["%.2f" % o for o in table["u_orders"]])

print("\nflat ball (n = 2, R = 1, phi = -0.2), self-convergence")
cfg = {"geometry": {"kind": "radial_ball", "n": 2, "R": 1.0,
                    "curvature": {"model": "flat"}},
       "angle": {"phi": "const:-0.2"},
       "solver": {"N_r": 50}}
table = refinement_study(cfg, 3)
e = table["c_errors"]
print(f"  successive speed differences: {e[0]:.3e} -> {e[1]:.3e}"
      f"  (ratio {e[0] / e[1]:.2f}, order {table['c_orders'][0]:.2f})")
