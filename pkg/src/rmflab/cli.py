"""
Command-line front end: ``rmflab <subcommand> [options]``.

Every run writes JSON Lines (or CSV) to stdout or ``--output``. The first
record echoes the resolved configuration. Exit status: 0 success, 1 a
certificate failed to verify, 2 invalid input, 3 a resource cap was hit.

Environment: ``RMFLAB_SIEVE_LIMIT`` (sieve cap), ``RMFLAB_WORKERS`` (scan processes).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from rmflab import arith, counting, dependence, halasz, simulate
from rmflab.errors import ResourceLimitError

DEFAULT_SEED = 20240607
HELSON_REFERENCES = {"reference_limit": 0.8769, "reference_upper": 0.904}

# fields that do not change results and are left out of the echoed config
_UNECHOED = {"workers", "output", "func"}


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_dist(spec: str) -> simulate.CircleDistribution:
    """``uniform`` | ``roots:q`` | ``atoms:<csv path>``."""
    if spec == "uniform":
        return simulate.UniformContinuous()
    kind, _, arg = spec.partition(":")
    if kind == "roots":
        try:
            return simulate.UniformRoots(int(arg))
        except ValueError:
            raise ValueError(f"bad roots spec {spec!r}")
    if kind == "atoms":
        with open(arg, newline="") as fh:
            return parse_atoms(fh.read())
    raise ValueError(f"unknown distribution spec {spec!r}")


def parse_atoms(text: str) -> simulate.FiniteAtoms:
    """CSV rows ``numerator,denominator,weight`` (exact) or ``angle,weight`` (float)."""
    atoms = []
    for row in csv.reader(io.StringIO(text)):
        row = [c.strip() for c in row]
        if not row or row[0].startswith("#"):
            continue
        if len(row) == 3:
            angle = Fraction(int(row[0]), int(row[1])) % 1
        elif len(row) == 2:
            angle = float(row[0]) % 1.0
        else:
            raise ValueError(f"bad atom row {row!r}")
        atoms.append((angle, float(Fraction(row[-1]))))
    return simulate.FiniteAtoms(tuple(atoms))


class Output:
    def __init__(self, fh, fmt: str):
        self.fh, self.fmt = fh, fmt
        self.writer = csv.writer(fh, lineterminator="\n") if fmt == "csv" else None

    def config(self, cfg: dict):
        line = json.dumps(cfg, sort_keys=True)
        self.fh.write(("# " + line if self.fmt == "csv" else line) + "\n")

    def record(self, rec: dict):
        if self.fmt == "json":
            self.fh.write(json.dumps(rec) + "\n")
        else:
            self.writer.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in rec.values()])

    def rows(self, rows):
        if self.fmt == "csv":
            self.writer.writerows(rows)
        else:
            head, *body = rows
            for r in body:
                self.fh.write(json.dumps(dict(zip(head, r))) + "\n")


def cmd_deps(args, out: Output) -> int:
    if args.q is None:
        res = dependence.scan_dependences_uniform(args.k, args.n_max, args.n_min, args.workers, args.checkpoint)
        for n, basis in res:
            for w in basis.witnesses(n):
                out.record(w.to_record())
        bound = dependence.independence_bound(args.k)
    else:
        res = dependence.scan_dependences_roots(args.k, args.q, args.n_max, args.n_min, args.workers, args.checkpoint)
        for _, w in res:
            out.record(w.to_record())
        bound = None
    out.record({"summary": "deps", "k": args.k, "q": args.q, "dependent_n": [n for n, _ in res],
                "advisory_bound": None if bound is None else str(bound)})
    return 0


def cmd_verify(args, out: Output) -> int:
    if args.file:
        with open(args.file) as fh:
            recs = [json.loads(line) for line in fh if line.strip() and not line.startswith("#")]
        recs = [r for r in recs if "m" in r]
    else:
        if args.n is None or args.k is None or args.m is None:
            raise ValueError("verify needs --file or all of --n, --k, --m")
        recs = [{"n": args.n, "k": args.k, "q": args.q, "m": args.m}]
    ok = True
    for r in recs:
        valid = dependence.verify_witness(int(r["n"]), int(r["k"]), [int(x) for x in r["m"]], r.get("q"))
        ok &= valid
        out.record({"n": r["n"], "k": r["k"], "q": r.get("q"), "m": r["m"], "valid": valid})
    return 0 if ok else 1


def cmd_simulate(args, out: Output) -> int:
    dist = parse_dist(args.dist)
    sample = simulate.sample_function(args.N + args.k, dist, args.seed)
    if args.observable == "patterns":
        for pat, c in sorted(simulate.pattern_counts(sample, args.k, args.N).items()):
            value = {"pattern": [f"{a.numerator}/{a.denominator}" for a in pat], "count": c}
            out.record(simulate.experiment_record(dist, args.N, args.k, args.seed, "pattern_count", value))
    else:
        m = args.m if args.m is not None else [1] * args.k
        z = simulate.empirical_fourier(sample, args.k, m, args.N)
        rec = simulate.experiment_record(dist, args.N, args.k, args.seed, f"fourier{tuple(m)}", z)
        out.record(rec)
    return 0


def cmd_moment2(args, out: Output) -> int:
    if args.q is None:
        rep = counting.second_moment_exact_uniform(args.m, args.N_lo, args.N)
        dist = simulate.UniformContinuous()
    else:
        rep = counting.second_moment_exact_roots(args.m, args.q, args.N_lo, args.N)
        dist = simulate.UniformRoots(args.q)
    rec = rep.to_record()
    if args.mc_reps:
        vals = np.array([
            abs(simulate.partial_sum_products(simulate.sample_function(args.N + len(args.m), dist, s),
                                              args.m, args.N_lo, args.N)) ** 2
            for s in simulate.replica_seeds(args.seed, args.mc_reps)
        ])
        rec["mc_mean"] = float(vals.mean())
        rec["mc_se"] = float(vals.std(ddof=1) / np.sqrt(len(vals)))
    out.record(rec)
    return 0


def cmd_moment4(args, out: Output) -> int:
    res = counting.fourth_moment_counts(args.n, return_solutions=args.solutions)
    out.record({"N": args.n, "strict": res.strict, "equal_middle": res.equal_middle, "moment": res.moment})
    if args.solutions:
        out.rows(counting.solutions_csv_rows(res.solutions))
    return 0


def cmd_moment2q(args, out: Output) -> int:
    out.record({"q": args.q, "N": args.n, "nontrivial": counting.moment_2q_nontrivial(args.q, args.n)})
    return 0


def cmd_ufamily(args, out: Output) -> int:
    seq, quads = counting.u_family(args.r_max)
    out.record({"u": [u for _, u in seq]})
    out.rows(counting.solutions_csv_rows(quads))
    return 0


def cmd_halasz(args, out: Output) -> int:
    dist = parse_dist(args.dist)
    sample = simulate.sample_function(args.N, dist, args.seed)
    rep = halasz.halasz_M(sample, args.T, args.grid, power=args.power)
    out.record(rep.to_record())
    return 0


def cmd_rate(args, out: Output) -> int:
    dist = parse_dist(args.dist)
    Ns = sorted(args.Ns)
    sample = simulate.sample_function(Ns[-1], dist, args.seed)
    pts = [(N, abs(simulate.empirical_mean(sample, N, args.power))) for N in Ns]
    cls = halasz.classify_limit(dist)
    for N, v in pts:
        out.record({"N": N, "abs_mean": v})
    out.record({"fitted_c": halasz.rate_fit(pts), "limit": cls.kind, "q": cls.q, "c_bound": cls.c_bound})
    return 0


def cmd_helson(args, out: Output) -> int:
    dist = parse_dist(args.dist)
    mean, se = simulate.mean_abs_partial_sum(dist, args.N, args.reps, args.seed)
    out.record({"N": args.N, "reps": args.reps, "mean": mean, "se": se, **HELSON_REFERENCES})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", "-o", default=None, help="file path (default stdout)")
    common.add_argument("--sieve-limit", type=int,
                        default=int(os.environ.get("RMFLAB_SIEVE_LIMIT", arith.SIEVE_LIMIT_CAP)))
    common.add_argument("--workers", type=int, default=int(os.environ.get("RMFLAB_WORKERS", 1)))

    p = argparse.ArgumentParser(prog="rmflab", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("deps", parents=[common], help="scan for dependent windows")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--checkpoint", default=None)
    s.set_defaults(func=cmd_deps)

    s = sub.add_parser("verify", parents=[common], help="check witness certificates")
    s.add_argument("--file", default=None, help="JSON Lines certificates")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--m", type=parse_int_list)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="pattern counts or Fourier coefficients")
    s.add_argument("--dist", default="roots:2")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--m", type=parse_int_list, default=None)
    s.add_argument("--observable", choices=("patterns", "fourier"), default="fourier")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("moment2", parents=[common], help="exact second moment, optional Monte-Carlo")
    s.add_argument("--m", type=parse_int_list, required=True)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--N-lo", type=int, default=0)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--mc-reps", type=int, default=0)
    s.set_defaults(func=cmd_moment2)

    s = sub.add_parser("moment4", parents=[common], help="fourth moment of sum X_n X_{n+1}")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--solutions", action="store_true")
    s.set_defaults(func=cmd_moment4)

    s = sub.add_parser("moment2q", parents=[common], help="non-trivial 2q-tuple count")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_moment2q)

    s = sub.add_parser("ufamily", parents=[common], help="u_r sequence and its solutions")
    s.add_argument("--r-max", type=int, default=20)
    s.set_defaults(func=cmd_ufamily)

    s = sub.add_parser("halasz", parents=[common], help="evaluate M(N, T)")
    s.add_argument("--dist", default="roots:2")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--T", type=float, default=10.0)
    s.add_argument("--grid", type=float, default=None)
    s.add_argument("--power", type=int, default=1)
    s.set_defaults(func=cmd_halasz)

    s = sub.add_parser("rate", parents=[common], help="fit the decay exponent of |mean X_n^power|")
    s.add_argument("--dist", required=True)
    s.add_argument("--Ns", type=parse_int_list, default=[10**3, 10**4, 10**5, 10**6])
    s.add_argument("--power", type=int, default=1)
    s.set_defaults(func=cmd_rate)

    s = sub.add_parser("helson", parents=[common], help="mean of N^-1/2 |sum X_n| (report only)")
    s.add_argument("--dist", default="uniform")
    s.add_argument("--N", type=int, default=10**5)
    s.add_argument("--reps", type=int, default=100)
    s.set_defaults(func=cmd_helson)
    return p


def run(argv=None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    arith.SIEVE_LIMIT_CAP = args.sieve_limit
    cfg = {"subcommand": args.subcommand}
    cfg.update({k: v for k, v in vars(args).items() if k not in _UNECHOED and k != "subcommand"})
    fh = open(args.output, "w", newline="") if args.output else stdout
    try:
        out = Output(fh, args.format)
        out.config(cfg)
        return args.func(args, out)
    except ResourceLimitError as e:
        print(f"rmflab: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as e:
        print(f"rmflab: {e}", file=sys.stderr)
        return 2
    finally:
        if args.output:
            fh.close()


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
