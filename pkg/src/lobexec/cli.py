"""Command-line front end.

Subcommands: solve, sweep, replay, oracle-check, ow-compare. Parameters
resolve as flags > JSON config file > built-in defaults, where the
defaults are the parameters of the alpha study (x0=100000, q=5000,
rho=20, T=1, N=10). Console output rounds to 6 significant digits;
files carry full precision.

Exit codes: 0 fine, 1 usage, 2 precondition or parameter rejection,
3 numerical failure, 4 verification mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import costs, dynamics, oracle, ow, shapes, solver
from .dynamics import MarketParams, Resilience
from .errors import (
    BudgetExceeded,
    InvalidParam,
    NoRootInBracket,
    OutOfDomain,
    PreconditionFailed,
)

DEFAULTS = {
    "shape": {"kind": "block", "q": 5000.0, "alpha": 0.0, "mu": 1.0, "n": 2, "csv_path": None},
    "x0": 100000.0,
    "t": 1.0,
    "n": 10,
    "rho": 20.0,
    "model": 1,
    "a0": 0.0,
    "seed": 0,
}

_PER_TRADE_RTOL = 1e-5   # vs x0
_COST_RTOL = 1e-7


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--shape", choices=["block", "power", "sqrt", "piecewise-ce", "tabulated"])
    p.add_argument("--q", type=float, help="depth scale")
    p.add_argument("--alpha", type=float, help="power-law exponent")
    p.add_argument("--mu", type=float, help="sqrt-shape curvature")
    p.add_argument("--n-param", type=int, dest="n_param", help="counterexample index")
    p.add_argument("--csv-path", dest="csv_path", help="tabulated shape CSV")
    p.add_argument("--x0", type=float, help="total shares to buy")
    p.add_argument("--t", type=float, help="trading horizon")
    p.add_argument("--n", type=int, help="number of steps (N+1 trades)")
    p.add_argument("--rho", type=float, help="resilience rate")
    p.add_argument("--model", type=int, choices=[1, 2], help="1 volume, 2 spread recovery")
    p.add_argument("--a0", type=float, help="unaffected best ask")
    p.add_argument("--seed", type=int, help="RNG seed for the oracle")
    p.add_argument("--out-dir", default=".", help="output directory")


def _resolve_config(args, base: dict | None = None) -> dict:
    cfg = json.loads(json.dumps(base if base is not None else DEFAULTS))
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        fshape = file_cfg.pop("shape", {})
        for key, val in file_cfg.items():
            if key not in cfg:
                raise InvalidParam(f"unknown config key {key!r}")
            cfg[key] = val
        for key, val in fshape.items():
            if key not in cfg["shape"]:
                raise InvalidParam(f"unknown shape config key {key!r}")
            cfg["shape"][key] = val
    flag_map = {
        "x0": args.x0, "t": args.t, "n": args.n, "rho": args.rho,
        "model": args.model, "a0": args.a0, "seed": args.seed,
    }
    for key, val in flag_map.items():
        if val is not None:
            cfg[key] = val
    shape_map = {
        "kind": args.shape, "q": args.q, "alpha": args.alpha,
        "mu": args.mu, "n": args.n_param, "csv_path": args.csv_path,
    }
    for key, val in shape_map.items():
        if val is not None:
            cfg["shape"][key] = val
    return cfg


def make_shape(shape_cfg: dict) -> shapes.Shape:
    kind = shape_cfg.get("kind", "block")
    q = float(shape_cfg.get("q", 5000.0))
    if kind == "block":
        return shapes.BlockShape(q)
    if kind in ("power", "power-law", "powerlaw"):
        alpha = float(shape_cfg.get("alpha", 0.0))
        if alpha > 1.0:
            print(
                f"warning: alpha = {alpha} > 1, book volume saturates at "
                f"{q / (alpha - 1.0):.6g}; optimality guarantees need alpha <= 1",
                file=sys.stderr,
            )
        return shapes.PowerLawShape(q, alpha)
    if kind == "sqrt":
        return shapes.SqrtShape(q, float(shape_cfg.get("mu", 1.0)))
    if kind == "piecewise-ce":
        return shapes.CounterexampleShape(int(shape_cfg.get("n", 2)))
    if kind == "tabulated":
        path = shape_cfg.get("csv_path")
        if not path:
            raise InvalidParam("tabulated shape needs csv_path")
        return shapes.load_tabulated_csv(path)
    raise InvalidParam(f"unknown shape kind {kind!r}")


def make_params(cfg: dict) -> MarketParams:
    return MarketParams(
        x0=float(cfg["x0"]),
        horizon=float(cfg["t"]),
        steps=int(cfg["n"]),
        rho=float(cfg["rho"]),
        mode=Resilience(int(cfg["model"])),
    )


def _write_schedule(out_dir: Path, sched: solver.OptimalSchedule, cfg: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "schedule.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "trade"])
        for n, x in enumerate(sched.trades):
            writer.writerow([n, f"{x:.17g}"])
    payload = sched.to_dict()
    payload["config"] = cfg
    with open(out_dir / "schedule.json", "w") as fh:
        json.dump(payload, fh, indent=2)


def cmd_solve(args) -> int:
    cfg = _resolve_config(args)
    shape = make_shape(cfg["shape"])
    params = make_params(cfg)
    sched = solver.solve(params, shape)
    report = costs.cost_report(params, shape, sched.strategy, a0=float(cfg["a0"]))
    _write_schedule(Path(args.out_dir), sched, cfg)
    print(f"model {int(sched.model)} schedule over {params.steps + 1} trades")
    print(f"xi0   = {sched.xi0:.6g}")
    print(f"xi1   = {sched.trades[1]:.6g}")
    print(f"xiN   = {sched.trades[-1]:.6g}")
    print(f"cost  = {report.total:.6g}")
    print(f"lagrange residual = {sched.diagnostics.lagrange_residual:.6g}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    alphas = [float(s) for s in args.alphas.split(",") if s.strip()]
    models = [int(s) for s in args.models.split(",") if s.strip()]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "sweep.csv"
    q = float(cfg["shape"].get("q", 5000.0))
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "model", "xi0", "xi1", "xiN", "cost", "status"])
        for alpha in alphas:
            shape = shapes.PowerLawShape(q, alpha)
            for model in models:
                params = make_params({**cfg, "model": model})
                try:
                    sched = solver.solve(params, shape)
                except PreconditionFailed as exc:
                    print(f"alpha={alpha} model={model}: precondition failed: {exc}", file=sys.stderr)
                    writer.writerow([alpha, model, "", "", "", "", "precondition"])
                    continue
                except (NoRootInBracket, OutOfDomain) as exc:
                    print(f"alpha={alpha} model={model}: numeric failure: {exc}", file=sys.stderr)
                    writer.writerow([alpha, model, "", "", "", "", "numeric"])
                    continue
                cost = costs.impact_cost(params, shape, sched.strategy)
                writer.writerow(
                    [
                        alpha,
                        model,
                        f"{sched.xi0:.17g}",
                        f"{sched.trades[1]:.17g}",
                        f"{sched.trades[-1]:.17g}",
                        f"{cost:.17g}",
                        "ok",
                    ]
                )
    print(f"wrote {out_path}")
    return 0


def cmd_replay(args) -> int:
    with open(args.schedule) as fh:
        payload = json.load(fh)
    base = json.loads(json.dumps(DEFAULTS))
    embedded = payload.get("config") or {}
    base["shape"].update(embedded.get("shape", {}))
    for key, val in embedded.items():
        if key != "shape" and key in base:
            base[key] = val
    cfg = _resolve_config(args, base)  # flags still override the embedded config
    shape = make_shape(cfg["shape"])
    params = make_params(cfg)
    trades = payload["trades"]
    report = costs.cost_report(params, shape, trades, a0=float(cfg["a0"]))
    print(f"replayed {len(trades)} trades under model {int(params.mode)}")
    print(f"cost  = {report.total:.6g}")
    print(f"impact = {report.impact_term:.6g}")
    if args.trajectory:
        traj = dynamics.replay(params, shape, trades)
        dynamics.trajectory_to_csv(traj, args.trajectory)
        print(f"wrote {args.trajectory}")
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(report.to_json())
        print(f"wrote {args.report}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _resolve_config(args)
    shape = make_shape(cfg["shape"])
    params = make_params(cfg)
    sched = solver.solve(params, shape, skip_validation=args.force)
    result = oracle.minimize_cost(
        params, shape, starts=args.starts, seed=int(cfg["seed"])
    )
    solver_cost = costs.impact_cost(params, shape, sched.strategy)
    per_trade_gap = max(
        abs(a - b) for a, b in zip(sched.trades, result.best_strategy.trades)
    )
    cost_gap = result.best_cost - solver_cost
    rel = abs(cost_gap) / max(1.0, abs(solver_cost))
    print(f"solver cost = {solver_cost:.6g}, oracle cost = {result.best_cost:.6g}")
    print(f"worst per-trade gap = {per_trade_gap:.6g}, relative cost gap = {rel:.6g}")
    if not result.converged:
        print("warning: not every oracle start converged", file=sys.stderr)
    if rel <= _COST_RTOL and per_trade_gap <= _PER_TRADE_RTOL * max(1.0, params.x0):
        print("oracle agrees with the solver")
        return 0
    if args.force and cost_gap < 0.0:
        print(
            f"oracle beats the root-equation schedule by {-cost_gap:.6g}; "
            "the root equation is not sufficient for optimality here"
        )
        return 0
    print("verification mismatch", file=sys.stderr)
    return 4


def cmd_ow_compare(args) -> int:
    cfg = _resolve_config(args)
    lambdas = [float(s) for s in args.lambdas.split(",") if s.strip()]
    q = float(cfg["shape"].get("q", 5000.0))
    params = make_params(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    reference = solver.solve_block(params, q)
    columns = {}
    worst_coeff = 0.0
    worst_trade = 0.0
    for i, lam in enumerate(lambdas):
        back = ow.backward_coeffs(q, lam, params)
        closed = ow.closed_coeffs(q, lam, params)
        for name in ("alpha", "beta", "gamma", "delta", "epsilon", "phi"):
            b = getattr(back, name)
            c = getattr(closed, name)
            scale = max(1.0, float(max(abs(c.min()), abs(c.max()))))
            worst_coeff = max(worst_coeff, float(abs(b - c).max()) / scale)
        strat = ow.forward_strategy(back, params, params.x0)
        columns[lam] = strat.trades
        worst_trade = max(
            worst_trade,
            max(abs(a - b) for a, b in zip(strat.trades, reference.trades))
            / max(1.0, params.x0),
        )
        ow.coeffs_to_csv(back, out_dir / f"ow_coeffs_lambda{i}.csv")
    out_path = out_dir / "ow_compare.csv"
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "block_closed"] + [f"lambda_{lam:g}" for lam in lambdas])
        for n in range(params.steps + 1):
            writer.writerow(
                [n, f"{reference.trades[n]:.17g}"]
                + [f"{columns[lam][n]:.17g}" for lam in lambdas]
            )
    print(f"wrote {out_path}")
    print(f"worst coefficient gap (backward vs closed) = {worst_coeff:.6g}")
    print(f"worst trade gap vs block closed form       = {worst_trade:.6g}")
    if worst_coeff > 1e-10 or worst_trade > 1e-9:
        print("verification mismatch", file=sys.stderr)
        return 4
    print("recursive scheme agrees with the closed forms for every lambda")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lobexec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal schedule for the configured shape/model")
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="power-law exponent sweep, both models")
    _add_common(p)
    p.add_argument("--alphas", default="-2,-1,-0.5,0,0.5,1", help="comma-separated exponents")
    p.add_argument("--models", default="1,2", help="comma-separated models")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("replay", help="replay a stored schedule and report its cost")
    _add_common(p)
    p.add_argument("--schedule", required=True, help="schedule.json from solve")
    p.add_argument("--trajectory", help="write node states to this CSV")
    p.add_argument("--report", help="write the cost report to this JSON")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("oracle-check", help="certify the solver against the descent oracle")
    _add_common(p)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--force", action="store_true", help="skip the validator preflight")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("ow-compare", help="recursive block scheme vs closed forms")
    _add_common(p)
    p.add_argument("--lambdas", default="0,5e-5,1.5e-4", help="comma-separated permanent slopes")
    p.set_defaults(func=cmd_ow_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except PreconditionFailed as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(
                f"  reason: {exc.report.reason}, witness: {exc.report.witness:.6g}",
                file=sys.stderr,
            )
        return 2
    except InvalidParam as exc:
        print(f"invalid parameter: {exc}", file=sys.stderr)
        return 2
    except (OutOfDomain, NoRootInBracket, BudgetExceeded, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    sys.exit(main())
