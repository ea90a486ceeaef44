"""Command line front end: predict, simulate, compare.

``predict`` evaluates the closed forms only.  ``simulate`` runs a Monte
Carlo experiment (directly from flags or from a plan file) and exits 1 when
any grid point falls outside the statistical acceptance band, so scripted
checks can rely on the exit code.  ``compare`` tabulates combined-beam
phase noise against a single quantum-limited amplifier of gain N over a
range of beam counts.

Output goes to stdout as a readable table and, with ``--out``, to CSV or
JSON.  CSV files start with ``#`` comment lines naming the units of every
column.  Floats are written with shortest round-trip precision, so parsing
a written file reproduces the computed values bit for bit.  Exit codes:
0 success, 1 statistical band violated, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .coherent import VAR_COH
from .combining import CbcConfig, predict_output, sql_phase_variance, xi_threshold
from .amplifier import AmplifierSpec, NoiseBudget, predict_variance
from .engine import ExperimentPlan, load_plan, run_plan

_UNIT_RULES = (
    ("N", "beam count"),
    ("n", "photons per beam"),
    ("G", "intensity gain"),
    ("stages", "stage count"),
    ("xi", "multiples of the quantum-limit phase variance"),
    ("xi_star", "multiples of the quantum-limit phase variance"),
    ("phase_var", "rad^2"),
    ("drift_var", "rad^2 per interval"),
    ("gain", "dimensionless controller gain"),
    ("intervals", "count"),
    ("init_spread", "rad"),
    ("trials", "count"),
    ("seed", "master seed"),
    ("tolerance_k", "standard errors"),
    ("workers", "count"),
    ("passed", "1 = inside band"),
    ("clicks", "photon count"),
    ("sql", "rad^2"),
    ("steady_ratio", "Var(psi) over the quantum limit"),
    ("final_var", "rad^2"),
    ("cbc_worse", "1 = combining noisier than one amplifier"),
)


def _unit_for(column: str) -> str:
    for name, text in _UNIT_RULES:
        if column == name:
            return text
    if column.endswith("_units"):
        return f"quadrature variance, multiples of {VAR_COH}"
    if column.startswith("z_"):
        return "standard errors"
    if column.startswith("se_"):
        return "same units as the measured quantity"
    if "mean" in column and "amplitude" in column or column.startswith(("mean_", "measured_mean")):
        return "field amplitude, sqrt(photons)"
    if "var" in column or "excess" in column:
        return f"absolute quadrature variance (vacuum = {VAR_COH})"
    return "dimensionless"


def _render_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_csv(records, title: str) -> str:
    columns = list(records[0])
    lines = [f"# {title}"]
    for col in columns:
        lines.append(f"# {col}: {_unit_for(col)}")
    lines.append(",".join(columns))
    for rec in records:
        lines.append(",".join(_render_value(rec[col]) for col in columns))
    return "\n".join(lines) + "\n"


def format_json(records, title: str) -> str:
    payload = {
        "title": title,
        "units": {col: _unit_for(col) for col in records[0]},
        "records": records,
    }
    return json.dumps(payload, indent=2) + "\n"


def write_output(records, title: str, path, fmt: str):
    text = format_csv(records, title) if fmt == "csv" else format_json(records, title)
    with open(path, "w") as fh:
        fh.write(text)


def _print_table(records, keys=None):
    if not records:
        return
    keys = keys or list(records[0])
    rows = [[_render_value(rec.get(k, "")) for k in keys] for rec in records]
    widths = [max(len(k), *(len(r[i]) for r in rows)) for i, k in enumerate(keys)]
    print("  ".join(k.ljust(w) for k, w in zip(keys, widths)))
    for row in rows:
        print("  ".join(v.ljust(w) for v, w in zip(row, widths)))


# ---------------------------------------------------------------------------
# predict


def cmd_predict(args) -> int:
    chosen = [name for name in ("cbc", "amp", "threshold") if getattr(args, name)]
    if not chosen:
        chosen = ["cbc", "amp", "threshold"]
    records = []
    if "cbc" in chosen:
        if args.N is None or args.n is None:
            raise ValueError("cbc prediction needs -N and -n")
        config = CbcConfig(
            n_beams=args.N, photons=args.n,
            phase_var=args.phase_var,
            xi=args.xi if args.phase_var is None else None,
        )
        pred = predict_output(config)
        records.append({
            "kind": "cbc", "N": config.n_beams, "n": config.photons,
            "xi": config.xi, "phase_var": config.phase_var,
            "mean_amplitude": pred.mean_amplitude,
            "var_x": pred.var_x, "var_p": pred.var_p,
            "var_x_units": pred.var_x / VAR_COH, "var_p_units": pred.var_p / VAR_COH,
            "excess_x": pred.excess_x, "excess_p": pred.excess_p,
        })
    if "amp" in chosen:
        big_g = args.G if args.G is not None else args.N
        if big_g is None:
            raise ValueError("amplifier prediction needs -G (or -N to default to G = N)")
        budget = predict_variance(AmplifierSpec(g=math.sqrt(big_g)), NoiseBudget(1.0))
        records.append({
            "kind": "amp", "G": float(big_g),
            "var": budget.total_variance, "var_units": budget.total_units,
        })
    if "threshold" in chosen:
        if args.N is None:
            raise ValueError("threshold prediction needs -N")
        records.append({"kind": "threshold", "N": args.N, "xi_star": xi_threshold(args.N)})
    for rec in records:
        _print_table([rec])
        print()
    if args.out:
        if len({tuple(r) for r in records}) > 1 and args.format == "csv":
            # heterogeneous records: pad to the union of columns for CSV
            columns = []
            for rec in records:
                for key in rec:
                    if key not in columns:
                        columns.append(key)
            records = [{col: rec.get(col, "") for col in columns} for rec in records]
        write_output(records, "closed-form predictions", args.out, args.format)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _plan_from_args(args) -> ExperimentPlan:
    record = {}
    ex = args.experiment
    if ex == "cbc":
        if args.N is None or args.n is None:
            raise ValueError("cbc simulation needs -N and -n")
        record = {"N": args.N, "n": args.n}
        if args.phase_var is not None:
            record["phase_var"] = args.phase_var
        else:
            record["xi"] = args.xi if args.xi is not None else 1.0
    elif ex == "amp":
        if args.G is None:
            raise ValueError("amp simulation needs -G")
        record = {"G": args.G, "kind": args.kind}
    elif ex == "cascade":
        if args.G is None:
            raise ValueError("cascade simulation needs -G")
        record = {"G": args.G, "stages": args.stages}
    elif ex == "gamma":
        if args.N is None or args.phase_var is None:
            raise ValueError("gamma simulation needs -N and --phase-var")
        record = {"N": args.N, "phase_var": args.phase_var}
    else:  # lock
        if args.N is None or args.n is None:
            raise ValueError("lock simulation needs -N and -n")
        record = {
            "N": args.N, "n": args.n, "drift_var": args.drift_var,
            "gain": args.gain, "intervals": args.intervals,
            "init_spread": args.init_spread,
        }
    return ExperimentPlan(
        experiment=ex, grid=(record,), trials=args.trials,
        master_seed=args.seed, tolerance_k=args.tolerance_k,
    )


def _simulate_records(result) -> list:
    records = []
    plan = result.plan
    for point in result.points:
        rec = {"experiment": plan.experiment, "seed": plan.master_seed,
               "trials": plan.trials, "tolerance_k": plan.tolerance_k}
        rec.update(point.config)
        for name, value in point.measured.items():
            rec[f"measured_{name}"] = value
        for name, value in point.predicted.items():
            rec[f"predicted_{name}"] = value
        for name, value in point.se.items():
            rec[f"se_{name}"] = value
        for name, value in point.z.items():
            rec[f"z_{name}"] = value
        if point.stats is not None:
            rec["measured_var_x_units"] = point.stats.var_x / VAR_COH
            rec["measured_var_p_units"] = point.stats.var_p / VAR_COH
        rec["passed"] = point.passed
        records.append(rec)
    return records


def cmd_simulate(args) -> int:
    if args.plan:
        plan = load_plan(args.plan)
        if args.experiment is not None:
            raise ValueError("give either an experiment name or --plan, not both")
    else:
        if args.experiment is None:
            raise ValueError("name an experiment or give --plan")
        plan = _plan_from_args(args)
    result = run_plan(plan, workers=args.workers)
    records = _simulate_records(result)
    _print_table(records)
    n_failed = sum(1 for p in result.points if not p.passed)
    print(f"\n{len(result.points)} point(s), {n_failed} outside the "
          f"{plan.tolerance_k:g} standard error band (seed {plan.master_seed})")
    if args.out:
        write_output(records, f"{plan.experiment} simulation", args.out, args.format)
    return 0 if result.all_passed else 1


# ---------------------------------------------------------------------------
# compare


def cmd_compare(args) -> int:
    xis = [float(x) for x in args.xi.split(",")] if isinstance(args.xi, str) else [1.0]
    if args.N_max < args.N_min:
        raise ValueError("empty N range")
    records = []
    for n_beams in range(args.N_min, args.N_max + 1):
        amp_units = 2.0 * n_beams - 1.0
        for xi in xis:
            cbc_units = 1.0 + 4.0 * xi / (n_beams - 1)
            records.append({
                "N": n_beams,
                "xi": xi,
                "phase_var": xi * sql_phase_variance(n_beams, args.n),
                "cbc_var_p_units": cbc_units,
                "amp_var_units": amp_units,
                "xi_star": xi_threshold(n_beams),
                "cbc_worse": cbc_units > amp_units,
            })
    _print_table(records)
    if args.out:
        write_output(records, "combining versus one amplifier", args.out, args.format)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cbcnoise",
        description="Quantum noise of coherent beam combining: predictions, "
                    "Monte Carlo checks, amplifier comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help="write records to this file")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="output file format (default csv)")

    p_predict = sub.add_parser("predict", help="evaluate the closed forms")
    p_predict.add_argument("--cbc", action="store_true", help="combined-beam prediction")
    p_predict.add_argument("--amp", action="store_true", help="single-amplifier prediction")
    p_predict.add_argument("--threshold", action="store_true", help="break-even accuracy factor")
    p_predict.add_argument("-N", type=int, help="number of beams")
    p_predict.add_argument("-n", type=float, help="photons per beam")
    p_predict.add_argument("--xi", type=float, default=1.0,
                           help="phase accuracy factor in quantum-limit units (default 1)")
    p_predict.add_argument("--phase-var", type=float, dest="phase_var",
                           help="phase variance in rad^2 (overrides --xi)")
    p_predict.add_argument("-G", type=float, help="amplifier intensity gain (default N)")
    add_common(p_predict)
    p_predict.set_defaults(func=cmd_predict)

    p_sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    p_sim.add_argument("experiment", nargs="?",
                       choices=("cbc", "amp", "cascade", "lock", "gamma"))
    p_sim.add_argument("--plan", help="run a key = value plan file instead of flags")
    p_sim.add_argument("-N", type=int, help="number of beams (or gamma terms)")
    p_sim.add_argument("-n", type=float, help="photons per beam")
    p_sim.add_argument("--xi", type=float, help="phase accuracy factor")
    p_sim.add_argument("--phase-var", type=float, dest="phase_var", help="phase variance in rad^2")
    p_sim.add_argument("-G", type=float, help="amplifier intensity gain")
    p_sim.add_argument("--stages", type=int, default=1, help="cascade stage count (default 1)")
    p_sim.add_argument("--kind", choices=("quantum_limited", "measure_prepare", "phase_sensitive"),
                       default="quantum_limited", help="amplifier model (default quantum_limited)")
    p_sim.add_argument("--drift-var", type=float, dest="drift_var", default=0.0,
                       help="lock: per-interval phase drift variance in rad^2")
    p_sim.add_argument("--gain", type=float, default=0.5, help="lock: controller gain")
    p_sim.add_argument("--intervals", type=int, default=100, help="lock: correction intervals")
    p_sim.add_argument("--init-spread", type=float, dest="init_spread", default=0.0,
                       help="lock: initial alternating phase offset in rad")
    p_sim.add_argument("--trials", type=float, default=100_000,
                       help="Monte Carlo trials per grid point (default 1e5)")
    p_sim.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p_sim.add_argument("--tolerance-k", type=float, dest="tolerance_k", default=5.0,
                       help="acceptance band half-width in standard errors (default 5)")
    p_sim.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="combined beam versus one amplifier")
    p_cmp.add_argument("--N-min", type=int, dest="N_min", default=2, help="first beam count")
    p_cmp.add_argument("--N-max", type=int, dest="N_max", default=16, help="last beam count")
    p_cmp.add_argument("-n", type=float, default=1000.0, help="photons per beam (default 1000)")
    p_cmp.add_argument("--xi", default="1", help="comma list of accuracy factors (default 1)")
    add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "trials"):
        args.trials = int(args.trials)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
