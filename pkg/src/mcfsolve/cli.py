"""Command-line front end: mcfsolve {soliton|flow|check|verify|study}.

Every subcommand reads a JSON config (path or preset name), echoes the
fully resolved configuration next to its outputs, and writes CSV/JSON
artifacts.  Exit codes: 0 success or verification pass, 2 verification
failure, 1 error.
"""

from __future__ import annotations

import argparse
import sys

from . import diagnostics, existence, flow, soliton
from .config import ConfigError, build_problem, emit_outputs, parse_config
from .flow import SolverError


def _load(args):
    cfg = parse_config(args.config)
    overrides = {}
    if getattr(args, "phi", None):
        overrides["angle"] = {"phi": args.phi}
    if getattr(args, "phi0", None) is not None:
        overrides["angle"] = {"phi": f"const:{args.phi0!r}"}
    if getattr(args, "dt", None) is not None:
        overrides.setdefault("solver", {})["dt"] = args.dt
    if getattr(args, "scheme", None):
        overrides.setdefault("solver", {})["scheme"] = args.scheme
    if overrides:
        merged = cfg.resolved()
        for k, v in overrides.items():
            merged[k] = {**merged.get(k, {}), **v} if isinstance(v, dict) else v
        cfg = parse_config(merged)
    return cfg


def cmd_soliton(args) -> int:
    cfg = _load(args)
    geom, grid, angle = build_problem(cfg)
    result = soliton.solve_soliton(grid, angle, cfg.newton_policy())
    report = soliton.verify_compatibility(result)
    report["newton_iterations"] = result.newton_iters
    emit_outputs(args.out, {
        "resolved_config.json": ("json", cfg.resolved()),
        "u_inf.csv": ("field", grid, result.u_inf),
        "eps_trace.csv": ("csv", ("eps", "eps_mean_u"), result.eps_trace),
        "report.json": ("json", report),
    })
    print(f"soliton: C_eps={result.C_eps:.6f} C_quad={result.C_quad:.6f} "
          f"residual={result.residual:.3e} -> {args.out}")
    return 0


def cmd_flow(args) -> int:
    cfg = _load(args)
    geom, grid, angle = build_problem(cfg)
    policy = cfg.step_policy()
    u0 = 0.0
    if args.u0 is not None:
        head, _, body = args.u0.partition(":")
        if head != "const":
            raise ConfigError("--u0 supports 'const:<v>'")
        u0 = float(body)
    state = flow.initial_state(grid, angle, u0)
    snapshots = args.snapshot_interval
    flow.run_until(state, policy, angle, t_end=args.t_end,
                   snapshot_interval=snapshots)
    artifacts = {
        "resolved_config.json": ("json", cfg.resolved()),
        "history.csv": ("csv", ("t", "max_W", "osc", "speed", "max_Weta"),
                        state.history.rows()),
    }
    for t, snap in state.snapshots:
        artifacts[f"u_t{t:g}.csv"] = ("field", grid, snap)
    emit_outputs(args.out, artifacts)
    print(f"flow: t={state.t:g} osc={state.history.osc_u[-1]:.3e} "
          f"speed={state.history.speed[-1]:.6f} -> {args.out}")
    return 0


def cmd_check(args) -> int:
    cfg = _load(args)
    geom, grid, angle = build_problem(cfg)
    report = existence.check_existence(geom, angle)
    emit_outputs(args.out, {
        "resolved_config.json": ("json", cfg.resolved()),
        "report.json": ("json", report.to_dict()),
    })
    verdict = "pass" if report.overall else "fail"
    print(f"check: {verdict} (eps0={report.eps0:.6f}, phi0={report.phi0:.6f})")
    return 0 if report.overall else 2


def cmd_verify(args) -> int:
    cfg = _load(args)
    geom, grid, angle = build_problem(cfg)
    sol = soliton.solve_soliton(grid, angle, cfg.newton_policy())
    policy = cfg.step_policy()
    state, t_stat = diagnostics.run_to_stationarity(grid, angle, policy)
    report = diagnostics.verify_convergence(state, sol, tol=args.tol)
    payload = report.to_dict()
    payload.update({"t_stationary": t_stat, "t_final": state.t,
                    "C_eps": sol.C_eps, "C_quad": sol.C_quad})
    emit_outputs(args.out, {
        "resolved_config.json": ("json", cfg.resolved()),
        "report.json": ("json", payload),
        "osc_trace.csv": ("csv", ("t", "osc_u_minus_uinf"), report.osc_trace),
        "w_envelope.csv": ("csv", ("t", "max_W"), report.w_envelope),
    })
    print(f"verify: {'pass' if report.passed else 'fail'} "
          + " ".join(f"{k}={v[0]:.3e}" for k, v in report.checks.items()))
    return 0 if report.passed else 2


def cmd_study(args) -> int:
    cfg = _load(args)
    table = diagnostics.refinement_study(cfg, levels=args.levels)
    rows = [(r["level"], r["h_r"], r["C_quad"], r["C_error"], r["u_error"])
            for r in table["rows"]]
    emit_outputs(args.out, {
        "resolved_config.json": ("json", cfg.resolved()),
        "study.csv": ("csv", ("level", "h_r", "C_quad", "C_error", "u_error"), rows),
        "report.json": ("json", {"c_orders": table["c_orders"],
                                 "u_orders": table["u_orders"]}),
    })
    print(f"study: C orders {['%.2f' % o for o in table['c_orders']]} "
          f"u orders {['%.2f' % o for o in table['u_orders']]}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mcfsolve",
        description="Contact-angle graph flow laboratory: translators, flows, "
                    "existence checks, and verification studies.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help="JSON config path or preset name (e.g. grim_reaper)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("soliton", help="solve the translator profile and speed")
    common(p)
    p.add_argument("--phi", help="override angle spec, e.g. const:-0.2 or fourier:0.1,0.05")
    p.set_defaults(fn=cmd_soliton)

    p = sub.add_parser("flow", help="run the parabolic flow")
    common(p)
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--scheme", choices=("semi_implicit", "explicit"))
    p.add_argument("--u0", help="initial height, const:<v> (default 0)")
    p.add_argument("--snapshot-interval", type=float, dest="snapshot_interval")
    p.set_defaults(fn=cmd_flow)

    p = sub.add_parser("check", help="existence hypothesis check")
    common(p)
    p.add_argument("--phi0", type=float, help="override with a constant angle of this size")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("verify", help="flow-vs-translator convergence verification")
    common(p)
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("study", help="grid refinement order study")
    common(p)
    p.add_argument("--levels", type=int, default=3)
    p.set_defaults(fn=cmd_study)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
