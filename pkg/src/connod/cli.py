"""Command-line front end: simulate, bifurcate, centrality, verify, sweep.

Exit codes: 0 success, 2 validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bifurcation as bif
from . import centrality as cen
from .constraints import effective_adjacency, effective_bias
from .dynamics import (
    constraint_drift,
    full_reduced_equivalence,
    integrate_full,
    reduced_rhs,
)
from .errors import NumericError, ValidationError
from .scenario import Scenario

SIGN_TOL = 1e-6


def decision_sign(value: float) -> str:
    if value > SIGN_TOL:
        return "positive"
    if value < -SIGN_TOL:
        return "negative"
    return "neutral"


def cmd_simulate(sc: Scenario, out: Path) -> dict:
    """Integrate the full system; write trajectory CSV and summary JSON."""
    cfg = sc.integrator()
    traj = integrate_full(
        sc.graph, sc.constraints, sc.params, sc.bias, sc.initial_full_state(), **cfg
    )
    out.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out / "trajectory.csv", sc.constraints, sc.header_comments())
    drift = constraint_drift(traj, sc.constraints)
    summary = {
        "scenario_hash": sc.scenario_hash(),
        "seed": sc.seed,
        "max_constraint_drift": float(np.max(drift)),
    }
    if sc.constraints.rank_one:
        y_final = traj.effective(sc.constraints)[-1]
        summary["final_y"] = [float(v) for v in y_final]
        summary["decision_signs"] = [decision_sign(v) for v in y_final]
        summary["effective_bias"] = [float(v) for v in sc.effective_biases()]
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return summary


def cmd_bifurcate(sc: Scenario, out: Path) -> dict:
    """Newton sweep plus unfolding overlay in one diagram CSV."""
    u_grid = sc.u_grid()
    ls = bif.ls_coefficients(sc.params, sc.graph, sc.constraints, sc.bias)
    sweep = bif.equilibrium_sweep(
        sc.graph, sc.constraints, sc.params, sc.bias,
        (u_grid[0], u_grid[-1]), resolution=len(u_grid),
    )
    overlay = bif.unfolding_roots(ls, (u_grid[0], u_grid[-1]), resolution=len(u_grid))
    out.mkdir(parents=True, exist_ok=True)
    path = out / "diagram.csv"
    n = sc.graph.n
    with open(path, "w", newline="") as fh:
        for line in sc.header_comments():
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["u", "method", "branch_id", "stability", "x_ls"]
            + [f"y_{i + 1}" for i in range(n)]
        )
        for diagram in (sweep, overlay):
            gap_set = set(diagram.gaps)
            for u in sorted({pt.u for pt in diagram.points} | gap_set):
                if u in gap_set:
                    fh.write(f"# gap: no converged equilibria at u = {u:.12g}\n")
                for pt in sorted(diagram.at(u), key=lambda q: q.branch_id):
                    writer.writerow(
                        [f"{pt.u:.12g}", diagram.method, pt.branch_id,
                         "stable" if pt.stable else "unstable", f"{pt.x_ls:.12g}"]
                        + [f"{yy:.12g}" for yy in pt.y]
                    )
    return {
        "u_star": ls.u_star,
        "a": ls.a,
        "b_cubic": ls.b_cubic,
        "unfold": ls.unfold,
        "diagram": str(path),
    }


def cmd_centrality(sc: Scenario, out: Path) -> dict:
    """Exact vs. approximate influence report for the effective network."""
    report = cen.influence_report(sc.graph, sc.constraints)
    out.mkdir(parents=True, exist_ok=True)
    doc = report.to_json(out / "centrality.json")
    if report.exact is not None:
        report.to_csv(out / "centrality.csv", sc.header_comments())
    return doc


def _fd_jacobian(g, c, p, bf, y, h=1e-5):
    n = y.shape[0]
    jac = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac[:, j] = (reduced_rhs(y + e, g, c, p, bf) - reduced_rhs(y - e, g, c, p, bf)) / (2 * h)
    return jac


def cmd_verify(sc: Scenario, out: Path | None = None) -> list:
    """Run the module invariant suites against the scenario's objects."""
    checks = []

    def record(name, status, detail):
        checks.append({"check": name, "status": status, "detail": detail})
        print(f"[{status}] {name}: {detail}")

    c = sc.constraints
    worst = 0.0
    for proj in c.projectors:
        worst = max(
            worst,
            float(np.max(np.abs(proj @ proj - proj))),
            float(np.max(np.abs(proj - proj.T))),
            float(np.max(np.abs(proj @ (np.eye(proj.shape[0]) - proj)))),
        )
    record("projector_idempotence", "PASS" if worst <= 1e-12 else "FAIL",
           f"max defect {worst:.2e} (tol 1e-12)")

    cfg = sc.integrator()
    cfg["horizon"] = min(cfg["horizon"], 20.0)
    traj = integrate_full(sc.graph, c, sc.params, sc.bias, sc.initial_full_state(), **cfg)
    drift = float(np.max(constraint_drift(traj, c)))
    record("invariance_drift", "PASS" if drift <= 1e-8 else "FAIL",
           f"max drift {drift:.2e} (tol 1e-8)")

    if c.rank_one:
        rng = np.random.default_rng(sc.seed)
        y0 = rng.uniform(-0.01, 0.01, sc.graph.n)
        dev = full_reduced_equivalence(
            sc.graph, c, sc.params, sc.bias, y0, horizon=cfg["horizon"], dt=cfg["dt"]
        )
        record("full_reduced_equivalence", "PASS" if dev <= 1e-6 else "FAIL",
               f"max deviation {dev:.2e} (tol 1e-6)")

        en = effective_adjacency(sc.graph, c)
        bf_zero = effective_bias(c, np.zeros_like(sc.bias))
        closed = bif.jacobian_origin(sc.params, en, sc.params.u)
        fd = _fd_jacobian(sc.graph, c, sc.params, bf_zero, np.zeros(sc.graph.n))
        jerr = float(np.max(np.abs(closed - fd)))
        record("jacobian_closed_form", "PASS" if jerr <= 1e-6 else "FAIL",
               f"max entry error {jerr:.2e} (tol 1e-6)")
    else:
        record("full_reduced_equivalence", "SKIP", "rank>1 constraints")
        record("jacobian_closed_form", "SKIP", "rank>1 constraints")

    if sc.graph.is_regular() and np.all(np.isin(sc.graph.adjacency, (0.0, 1.0))) and c.n_options >= 2:
        ratios = []
        for delta in (-0.2, -0.1, -0.05):
            errs = []
            for dd in (delta, delta / 2):
                rho = 1.0 + dd
                het = np.zeros(c.n_options)
                het[0], het[1] = rho, np.sqrt(max(1 - rho**2, 0.0))
                shared = np.zeros(c.n_options)
                shared[0] = 1.0
                from .constraints import ConstraintSet

                cs = ConstraintSet.from_vectors([het] + [shared] * (sc.graph.n - 1))
                exact = cen.influence_report(sc.graph, cs).exact.vector
                approx = cen.regular_approx(sc.graph, rho)
                errs.append(cen.sign_invariant_error(approx, exact))
            ratios.append(errs[0] / errs[1])
        ok = all(2.5 <= r <= 6.0 for r in ratios)
        record("first_order_scaling", "PASS" if ok else "FAIL",
               f"error ratios {['%.2f' % r for r in ratios]} (expect ~4)")
    else:
        record("first_order_scaling", "SKIP", "graph is not unweighted regular")

    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "verify.json", "w") as fh:
            json.dump(checks, fh, indent=2)
    return checks


def cmd_sweep(sc: Scenario, out: Path) -> dict:
    """Simulate over the u grid; record final effective opinions per u."""
    cfg = sc.integrator()
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    z0 = sc.initial_full_state()
    n = sc.graph.n
    with open(path, "w", newline="") as fh:
        for line in sc.header_comments():
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["u"] + [f"y_{i + 1}" for i in range(n)] + [f"sign_{i + 1}" for i in range(n)]
        )
        for u in sc.u_grid():
            traj = integrate_full(
                sc.graph, sc.constraints, sc.params.with_u(float(u)), sc.bias, z0, **cfg
            )
            y = traj.effective(sc.constraints)[-1] if sc.constraints.rank_one else \
                np.linalg.norm(traj.final_state, axis=1)
            writer.writerow(
                [f"{u:.12g}"] + [f"{v:.12g}" for v in y] + [decision_sign(v) for v in y]
            )
    return {"sweep": str(path)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="connod",
        description="Projection-constrained nonlinear opinion dynamics toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("simulate", "integrate the full constrained system"),
        ("bifurcate", "equilibrium sweep + unfolding diagram"),
        ("centrality", "effective-network influence report"),
        ("verify", "run invariant checks on the scenario"),
        ("sweep", "simulate across the u grid"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="scenario JSON path")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--dt", type=float, default=None)
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--u-min", type=float, default=None)
        p.add_argument("--u-max", type=float, default=None)
        p.add_argument("--u-steps", type=int, default=None)
        p.add_argument("--print-config", action="store_true",
                       help="dump the effective config (all defaults resolved) and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["initial.seed"] = args.seed
    if args.dt is not None:
        overrides["integrator.dt"] = args.dt
    if args.horizon is not None:
        overrides["integrator.horizon"] = args.horizon
    if args.u_min is not None:
        overrides["sweep.u_min"] = args.u_min
    if args.u_max is not None:
        overrides["sweep.u_max"] = args.u_max
    if args.u_steps is not None:
        overrides["sweep.u_steps"] = args.u_steps
    if args.out is not None:
        overrides["out"] = args.out
    try:
        sc = Scenario.load(args.config, overrides)
        if args.print_config:
            print(json.dumps(sc.config, indent=2, sort_keys=True))
            return 0
        out = Path(sc.config["out"])
        if args.command == "simulate":
            result = cmd_simulate(sc, out)
        elif args.command == "bifurcate":
            result = cmd_bifurcate(sc, out)
        elif args.command == "centrality":
            result = cmd_centrality(sc, out)
        elif args.command == "verify":
            checks = cmd_verify(sc, out)
            return 0 if all(ch["status"] != "FAIL" for ch in checks) else 3
        else:
            result = cmd_sweep(sc, out)
        print(json.dumps(result, indent=2))
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
