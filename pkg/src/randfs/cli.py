"""Command-line front end: one subcommand per experiment, reproducible output files."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import clt, color, detect, model, stats
from .errors import DomainError, ResourceError

SCHEMA_VERSION = 1
DEFAULT_SEED = stats.DEFAULT_SEED

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _probability(text: str) -> float:
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"probability must lie in (0, 1), got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--timing", action="store_true",
                        help="add wall-time to the output (breaks byte-for-byte reproducibility)")

    parser = _Parser(prog="randfs", description="Random FS/FP pattern laboratory")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", parents=[common], help="materialize one random subset")
    p.add_argument("-p", type=_probability, required=True)
    p.add_argument("-N", type=_positive, required=True)
    p.add_argument("--members", action="store_true", help="list the members (csv: one per row)")

    p = sub.add_parser("probes", parents=[common], help="FS/FP probe events")
    p.add_argument("--kind", choices=("fs", "fp"), default="fs")
    p.add_argument("-L", type=_positive, required=True)
    p.add_argument("-p", type=_probability, required=True)
    p.add_argument("--j-count", type=_positive, default=100000)
    p.add_argument("--single-model", action="store_true",
                   help="scan j over one model (hit list, disjointness audit) instead of one probe per model")
    p.add_argument("-j", type=int, default=None, help="probe index tested in each trial")

    p = sub.add_parser("quadruples", parents=[common], help="Monte Carlo for X_N")
    p.add_argument("-N", type=_positive, required=True)
    p.add_argument("-p", type=_probability, required=True)
    p.add_argument("--trials", type=_positive, default=10000)

    p = sub.add_parser("second-moment", parents=[common], help="exact second-moment report")
    p.add_argument("-N", type=_positive, required=True)
    p.add_argument("-p", type=_probability, required=True)
    p.add_argument("--exact", action="store_true", help="enumerate every subset (N <= 4)")
    p.add_argument("--mc-trials", type=int, default=0)

    p = sub.add_parser("clt", parents=[common], help="normalized sums and regime diagnostics")
    p.add_argument("--family", choices=clt.FAMILIES, default="linear")
    p.add_argument("-k", type=_positive, required=True)
    p.add_argument("-p", type=_probability, required=True)
    p.add_argument("-M", type=_positive, default=20000)
    p.add_argument("--tol", type=float, default=0.05, help="atom tolerance for the two-point fit")

    p = sub.add_parser("color", parents=[common], help="colorings, monochromatic witnesses, exhaustive scan")
    p.add_argument("-N", type=_positive, required=True)
    p.add_argument("-c", type=int, default=2)
    p.add_argument("-L", type=_positive, default=2)
    p.add_argument("--scan", action="store_true", help="exhaustive 2-coloring scan (N <= 30)")
    p.add_argument("--strict", action="store_true", help="require four distinct quadruple values")

    p = sub.add_parser("threshold", parents=[common], help="threshold sweep for FS witnesses in [1..N]")
    p.add_argument("-L", type=_positive, required=True)
    p.add_argument("-N", type=_positive, required=True)
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--trials", type=_positive, default=400)
    p.add_argument("--tol", type=float, default=0.01)
    return parser


def _jsonable(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def _estimate_row(experiment: str, params: dict, est: stats.Estimate) -> dict:
    return {
        "experiment": experiment,
        "params": ";".join(f"{k}={v}" for k, v in params.items()),
        "point": est.point, "lo": est.wilson95[0], "hi": est.wilson95[1], "trials": est.trials,
    }


def _estimate_json(est: stats.Estimate) -> dict:
    return {"trials": est.trials, "successes": est.successes, "point": est.point,
            "wilson95": list(est.wilson95)}


class Output:
    """Collects one run's result as a JSON document or CSV table, plus a summary line."""

    def __init__(self, command: str, config: dict, fmt: str):
        self.header = {"schema_version": SCHEMA_VERSION, "command": command, "config": config}
        self.fmt = fmt
        self.result: dict = {}
        self.rows: list[dict] = []
        self.summary = ""

    def render(self, wall_time: Optional[float]) -> str:
        if self.fmt == "json":
            doc = dict(self.header, result=self.result)
            if wall_time is not None:
                doc["wall_time"] = wall_time
            return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        buf.write("# " + json.dumps(_jsonable(self.header), sort_keys=True) + "\n")
        if wall_time is not None:
            for row in self.rows:
                row["wall_time"] = wall_time
        if self.rows:
            writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
            writer.writeheader()
            writer.writerows(_jsonable(self.rows))
        return buf.getvalue()


def _cmd_sample(a, out: Output):
    sample = model.SubsetModel(a.p, a.seed).materialize(a.N)
    count = sample.popcount()
    out.result = {"N": a.N, "popcount": count, "frequency": count / a.N}
    if a.members:
        out.result["members"] = sample.members().tolist()
        out.rows = [{"n": int(n)} for n in sample.members()]
    else:
        out.rows = [{"experiment": "sample", "N": a.N, "popcount": count, "frequency": count / a.N}]
    out.summary = f"sample: {count} of {a.N} integers included (frequency {count / a.N:.5f}, p={a.p})"


def _cmd_probes(a, out: Output):
    R = 2**a.L - 1
    if a.single_model:
        m = model.SubsetModel(a.p, a.seed)
        start = 0 if a.kind == "fs" else 1
        rep = detect.probe_hits(m, a.kind, a.L, range(start, start + a.j_count))
        audit = detect.disjointness_audit(rep)
        out.result = {"hits": list(rep.hits), "count": len(rep.hits), "tested": rep.tested, "R": rep.R,
                      "frequency": rep.frequency, "expected": a.p**R, "disjoint": audit,
                      "truncated_at": rep.truncated_at}
        out.rows = [{"j": j} for j in rep.hits]
        out.summary = (f"probes: {len(rep.hits)} hits over {rep.tested} probes on one model "
                       f"(frequency {rep.frequency:.5f}, p^R={a.p**R:.5f}, disjoint={audit})")
        return
    est = stats.estimate_event_prob(a.kind, a.L, a.p, a.j_count, a.seed, a.j, a.workers)
    out.result = {"estimate": _estimate_json(est), "expected": a.p**R, "R": R}
    out.rows = [_estimate_row("probe_event", {"kind": a.kind, "L": a.L, "p": a.p}, est)]
    out.summary = (f"probes: P(E_j) ~ {est.point:.5f} [{est.wilson95[0]:.5f}, {est.wilson95[1]:.5f}] "
                   f"vs p^R = {a.p**R:.5f}")


def _cmd_quadruples(a, out: Output):
    counts = stats.quadruple_counts(a.N, a.p, a.trials, a.seed, a.workers)
    est = stats.Estimate(a.trials, int((counts > 0).sum()))
    expect = stats.expected_quadruples_exact(a.N, a.p)
    out.result = {"PX_pos": _estimate_json(est), "mean_X": float(counts.mean()),
                  "exact_EX": expect.exact, "leading_EX": expect.idealized,
                  "exact_EX_float": float(expect.exact)}
    out.rows = [_estimate_row("quadruple_PX_pos", {"N": a.N, "p": a.p}, est)]
    out.summary = (f"quadruples: P(X_N>0) ~ {est.point:.5f}, mean X_N {counts.mean():.4f} "
                   f"vs exact E {float(expect.exact):.4f} (p^4 N^2 = {float(expect.idealized):.4f})")


def _cmd_second_moment(a, out: Output):
    if a.exact:
        rep = stats.exact_small_universe(a.N, a.p, a.mc_trials, a.seed)
        out.result = {
            "N": rep.N, "p": rep.p, "universe": rep.universe,
            "exact_EX": rep.exact_EX, "leading_EX": rep.leading_EX, "exact_EX2": rep.exact_EX2,
            "exact_PX_pos": rep.exact_PX_pos, "variance": rep.variance,
            "pz_lower_bound": rep.pz_lower_bound, "pz_holds": rep.pz_holds,
            "mc_PX_pos": _estimate_json(rep.mc_PX_pos) if rep.mc_PX_pos else None,
        }
        out.rows = [{"N": rep.N, "p": str(rep.p), "exact_EX": str(rep.exact_EX), "leading_EX": str(rep.leading_EX),
                     "exact_EX2": str(rep.exact_EX2), "exact_PX_pos": str(rep.exact_PX_pos),
                     "pz_lower_bound": str(rep.pz_lower_bound), "pz_holds": rep.pz_holds}]
        out.summary = (f"second-moment: P(X>0) = {float(rep.exact_PX_pos):.6f} >= PZ bound "
                       f"{float(rep.pz_lower_bound):.6f}: {rep.pz_holds}")
        return
    expect = stats.expected_quadruples_exact(a.N, a.p)
    trials = a.mc_trials or 10000
    est = stats.estimate_PX_pos(a.N, a.p, trials, a.seed, a.workers)
    out.result = {"N": a.N, "p": a.p, "exact_EX": expect.exact, "leading_EX": expect.idealized,
                  "difference": expect.difference, "mc_PX_pos": _estimate_json(est)}
    out.rows = [_estimate_row("second_moment_mc", {"N": a.N, "p": a.p}, est)]
    out.summary = f"second-moment: exact E[X_N] = {float(expect.exact):.4f}, P(X_N>0) ~ {est.point:.5f}"


def _cmd_clt(a, out: Output):
    cfg = clt.CltConfig.from_family(a.family, a.k, a.p, a.M, a.seed)
    run = clt.simulate(cfg, trim=a.k >= 2, workers=a.workers)
    ks = clt.ks_to_normal(run.full)
    fit = clt.two_point_fit(run.full, a.p, a.tol)
    info = {"ks_full": ks, "two_point": {"upper": fit.mass_near_upper, "lower": fit.mass_near_lower,
                                         "escaped": fit.escaped_mass}}
    if run.diagnostics is not None:
        info["diagnostics"] = run.diagnostics.as_dict()
        info["ks_trimmed"] = clt.ks_to_normal(run.trimmed)
        info["reinsertion_distance"] = clt.reinsertion_check(cfg, a.workers).distance
    out.result = info
    out.header["diagnostics"] = info
    trimmed = run.trimmed.values if run.trimmed is not None else [None] * a.M
    out.rows = [{"full": float(f), "trimmed": None if t is None else float(t)}
                for f, t in zip(run.full.values, trimmed)]
    out.summary = (f"clt: {a.family} k={a.k}: KS(full, N(0,1)) = {ks:.4f}, "
                   f"two-point escaped mass {fit.escaped_mass:.4f}")


def _cmd_color(a, out: Output):
    if a.scan:
        res = color.exhaustive_2coloring_scan(a.N, a.strict)
        out.result = {"N": a.N, "strict": a.strict, "forced": res.forced, "nodes": res.nodes,
                      "witness": res.witness.to_line() if res.witness is not None else None}
        out.rows = [{"N": a.N, "strict": a.strict, "forced": res.forced, "nodes": res.nodes,
                     "witness": out.result["witness"] or ""}]
        out.summary = (f"color scan: N={a.N} "
                       + ("every 2-coloring contains the pattern" if res.forced else "avoiding coloring found")
                       + f" ({res.nodes} nodes)")
        return
    col = color.random_coloring(a.N, a.c, a.seed)
    seq = color.hindman_sequence(col, a.L)
    quad = color.find_mono_quadruple(col, a.strict)
    out.result = {"coloring": col.to_line() if a.c <= len(color.DIGITS) else None,
                  "mono_fs": seq.as_record(),
                  "mono_quadruple": None if quad is None else {"x": quad[0], "y": quad[1], "color": quad[2]}}
    out.rows = [{"N": a.N, "c": a.c, "L": a.L, "fs_witness": " ".join(map(str, seq.x)),
                 "fs_color": "" if seq.color is None else seq.color,
                 "quadruple": "" if quad is None else f"{quad[0]} {quad[1]}",
                 "quadruple_color": "" if quad is None else quad[2]}]
    out.summary = f"color: FS witness {seq.x or 'none'}, quadruple {quad[:2] if quad else 'none'}"


def _cmd_threshold(a, out: Output):
    res = stats.threshold_sweep(a.L, a.N, a.target, a.trials, a.seed, a.tol)
    out.result = {"lo": res.lo, "hi": res.hi, "estimate": res.estimate, "widened": res.widened,
                  "lo_estimate": _estimate_json(res.lo_estimate), "hi_estimate": _estimate_json(res.hi_estimate),
                  "coupling_violations": res.coupling_violations,
                  "evaluations": [{"p": p, "point": e.point, "successes": e.successes} for p, e in res.evaluations]}
    out.rows = [_estimate_row("threshold_eval", {"L": a.L, "N": a.N, "p_eval": p}, e) for p, e in res.evaluations]
    out.summary = f"threshold: p* in [{res.lo:.5f}, {res.hi:.5f}] (exploratory, {a.trials} trials per p)"


COMMANDS = {
    "sample": _cmd_sample, "probes": _cmd_probes, "quadruples": _cmd_quadruples,
    "second-moment": _cmd_second_moment, "clt": _cmd_clt, "color": _cmd_color, "threshold": _cmd_threshold,
}
DEFAULT_FORMAT = {"clt": "csv", "threshold": "csv", "sample": "json", "probes": "csv",
                  "quadruples": "csv", "second-moment": "json", "color": "json"}
_RUNTIME_KEYS = {"out", "format", "workers", "timing", "command"}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_VALIDATION
    fmt = args.format or DEFAULT_FORMAT[args.command]
    # worker count and output location do not change results, so they stay out of the header
    config = {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_KEYS}
    out = Output(args.command, config, fmt)
    started = time.perf_counter()
    try:
        COMMANDS[args.command](args, out)
    except ResourceError as exc:
        print(f"randfs: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"randfs: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text = out.render(time.perf_counter() - started if args.timing else None)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        print(out.summary)
    else:
        sys.stdout.write(text)
        print(out.summary, file=sys.stderr)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
