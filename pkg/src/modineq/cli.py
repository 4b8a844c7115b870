"""Command-line front end: ``modineq {gen,verify,sweep,chernoff,oracle-check}``.

Exit status: 0 when every check passes, 1 on a verification failure, 2 on
bad input, 3 on internal or convergence errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .batch import ROW_FIELDS, run_batch, summarize
from .chernoff import TestingInstance, exponent_convergence, minimize_q
from .errors import ConvergenceError, ModineqError
from .inequalities import verify_corollary, verify_main
from .instance_io import dumps_instance, read_instance
from .numerics import DEFAULT_TOL, op_norm, pseudo_power
from .oracle import frac_power_integral
from .rng import CounterRNG
from .sampling import BLOCK_PATTERNS, KINDS, Instance, conditioned_psd, make_instance

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3
ORACLE_TOL = 1e-6


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.16e}"
    return str(x)


def _jsonable(x):
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def write_csv(rows, fields, stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt(row[f]) for f in fields])


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="\n")


def _emit_json(doc, path) -> None:
    text = json.dumps(doc, indent=1, allow_nan=False, default=_jsonable) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def parse_dims(text: str | None):
    """``"2;4;2,3"`` -> ``((2,), (4,), (2, 3))``."""
    if not text:
        return BLOCK_PATTERNS
    try:
        patterns = tuple(tuple(int(n) for n in part.split(",")) for part in text.split(";") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid --dims {text!r}; expected e.g. '2;4;2,3'") from None
    if not patterns or any(n < 1 for p in patterns for n in p):
        raise argparse.ArgumentTypeError(f"invalid --dims {text!r}")
    return patterns


def parse_s_grid(text: str):
    """Comma-separated values, or ``lo:hi:count`` for an inclusive linear grid."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            grid = [float(x) for x in np.linspace(float(lo), float(hi), int(count))]
            grid = [round(x, 12) for x in grid]
        else:
            grid = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid s-grid {text!r}") from None
    if not grid or any(not (0.0 <= s <= 1.0) for s in grid):
        raise argparse.ArgumentTypeError(f"s-grid values must lie in [0, 1]: {text!r}")
    return grid


def parse_ranks(text: str):
    try:
        ranks = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid --ranks {text!r}") from None
    if len(ranks) != 3:
        raise argparse.ArgumentTypeError("--ranks needs three values: plus,minus,common")
    return ranks


def _tol(args):
    return DEFAULT_TOL.replace(
        ineq_slack=args.tol_ineq, support_cut=args.tol_support, psd_slack=getattr(args, "tol_psd", None)
    )


def _instances(args, tol) -> list[Instance]:
    if getattr(args, "files", None):
        return [read_instance(p, tol) for p in args.files]
    return [
        make_instance(args.seed, i, args.dims[i % len(args.dims)], args.kind, args.ranks, tol)
        for i in range(args.count)
    ]


def cmd_gen(args) -> int:
    tol = _tol(args)
    instances = _instances(args, tol)
    if len(instances) == 1 and (args.out is None or args.out.endswith(".json") or args.out == "-"):
        out = _open_out(args.out)
        out.write(dumps_instance(instances[0]))
        if out is not sys.stdout:
            out.close()
        return EXIT_OK
    if args.out is None:
        raise ModineqError("--out DIR is required when generating more than one instance")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for inst in instances:
        (outdir / f"{inst.id}.json").write_text(dumps_instance(inst), encoding="utf-8", newline="\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    tol = _tol(args)
    instances = _instances(args, tol)
    rows = run_batch(instances, args.s_grid, tol, args.n_max)
    summary = summarize(rows)
    config = {
        "count": len(instances), "dims": [list(p) for p in args.dims], "kind": args.kind,
        "s_grid": list(args.s_grid), "files": list(args.files or []),
        "tolerances": {"ineq_slack": tol.ineq_slack, "support_cut": tol.support_cut, "psd_slack": tol.psd_slack},
    }
    if args.format == "json":
        results = [{k: r[k] for k in ("id", "claim", "s", "lhs", "rhs", "gap", "pass")} for r in rows]
        _emit_json({"version": __version__, "seed": args.seed, "config": config, "results": results,
                    "summary": summary}, args.out)
    else:
        out = _open_out(args.out)
        write_csv(rows, ROW_FIELDS, out)
        if out is not sys.stdout:
            out.close()
            _emit_json({"version": __version__, "seed": args.seed, "config": config, "summary": summary},
                       args.out + ".summary.json")
    print(json.dumps(summary, default=_jsonable), file=sys.stderr)
    return EXIT_OK if summary["failures"] == 0 else EXIT_FAIL


SWEEP_FIELDS = ("s", "overlap", "main_lhs", "main_gap", "corollary_gap")


def cmd_sweep(args) -> int:
    tol = _tol(args)
    inst = read_instance(args.instance, tol)
    if not {"eta", "phi"} <= inst.functionals.keys():
        raise ModineqError(f"{inst.id}: sweep needs functionals 'eta' and 'phi'")
    eta, phi = inst["eta"], inst["phi"]
    rows = []
    for s in args.s_grid:
        main = verify_main(eta, phi, s, tol)
        cor = verify_corollary(eta, phi, s, tol)
        rows.append({"s": float(s), "overlap": main.rhs, "main_lhs": main.lhs, "main_gap": main.gap,
                     "corollary_gap": cor.gap})
    if args.format == "json":
        _emit_json({"version": __version__, "instance": inst.id, "rows": rows}, args.out)
    else:
        out = _open_out(args.out)
        write_csv(rows, SWEEP_FIELDS, out)
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


CHERNOFF_FIELDS = ("n", "bayes_error", "rate", "exponent", "bound", "pass")


def _testing_instance(inst: Instance, prior) -> TestingInstance:
    fs = inst.functionals
    if {"rho", "sigma"} <= fs.keys():
        rho, sigma = fs["rho"], fs["sigma"]
    elif {"eta", "phi"} <= fs.keys():
        rho, sigma = fs["eta"] / fs["eta"].mass, fs["phi"] / fs["phi"].mass
    else:
        raise ModineqError(f"{inst.id}: chernoff needs functionals 'rho' and 'sigma' (or 'eta' and 'phi')")
    p = prior if prior is not None else float(inst.metadata.get("prior_p", 0.5))
    return TestingInstance(rho, sigma, p)


def cmd_chernoff(args) -> int:
    inst = read_instance(args.instance, _tol(args))
    test = _testing_instance(inst, args.prior)
    result = minimize_q(test.rho, test.sigma)
    rows = [r.as_dict() for r in exponent_convergence(test, args.n_max, result=result)]
    doc = {"version": __version__, "instance": inst.id, "prior_p": test.prior_p, "result": result.to_dict()}
    if args.format == "json":
        _emit_json(dict(doc, rows=rows), args.out)
    else:
        out = _open_out(args.out)
        write_csv(rows, CHERNOFF_FIELDS, out)
        if out is not sys.stdout:
            out.close()
            _emit_json(doc, args.out + ".result.json")
        else:
            print(json.dumps(doc, default=_jsonable), file=sys.stderr)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAIL


ORACLE_FIELDS = ("id", "block", "s", "rel_diff", "pass")


def _oracle_matrices(args, tol):
    if args.files:
        for inst in _instances(args, tol):
            for name, f in inst.functionals.items():
                for k, d in enumerate(f.densities):
                    yield f"{inst.id}:{name}", k, d
        return
    for i in range(args.count):
        rng = CounterRNG(args.seed).spawn(i)
        for k, n in enumerate(args.dims[i % len(args.dims)]):
            yield f"oracle-{args.seed}-{i:05d}", k, conditioned_psd(rng, n, args.max_condition)


def cmd_oracle_check(args) -> int:
    tol = _tol(args)
    rows = []
    for ident, k, h in _oracle_matrices(args, tol):
        for s in args.s_grid:
            spectral = pseudo_power(h, s, tol)
            integral = frac_power_integral(h, s, tol=tol)
            ref = op_norm(spectral)
            diff = op_norm(integral - spectral) / ref if ref > 0 else op_norm(integral)
            rows.append({"id": ident, "block": k, "s": float(s), "rel_diff": diff, "pass": diff <= ORACLE_TOL})
    failures = [r for r in rows if not r["pass"]]
    if args.format == "json":
        _emit_json({"version": __version__, "seed": args.seed, "results": rows,
                    "summary": {"max_rel_diff": max((r["rel_diff"] for r in rows), default=0.0),
                                "failures": len(failures)}}, args.out)
    else:
        out = _open_out(args.out)
        write_csv(rows, ORACLE_FIELDS, out)
        if out is not sys.stdout:
            out.close()
    for r in failures:
        print(f"FAIL {r['id']} block={r['block']} s={r['s']} rel_diff={r['rel_diff']:.3e}", file=sys.stderr)
    return EXIT_OK if not failures else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modineq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_default):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--count", type=int, default=1)
        p.add_argument("--dims", type=parse_dims, default=BLOCK_PATTERNS,
                       help="block patterns, ';'-separated, blocks ','-separated (e.g. '2;4;2,3')")
        p.add_argument("--s-grid", type=parse_s_grid, default=parse_s_grid(grid_default),
                       help="comma list or lo:hi:count")
        p.add_argument("--tol-ineq", type=float, default=None)
        p.add_argument("--tol-support", type=float, default=None)
        p.add_argument("--tol-psd", type=float, default=None)
        p.add_argument("--out", default=None, help="output path ('-' or omitted for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--n-max", type=int, default=64)
        p.add_argument("--kind", choices=KINDS, default="random")
        p.add_argument("--ranks", type=parse_ranks, default=None, help="equality ranks plus,minus,common")

    p = sub.add_parser("gen", help="generate instance files")
    common(p, "0.05:0.95:19")
    p.set_defaults(func=cmd_gen, files=None)

    p = sub.add_parser("verify", help="verify inequalities on instance files or a generated batch")
    p.add_argument("files", nargs="*")
    common(p, "0.05:0.95:19")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="overlap and gaps of one instance over an s-grid")
    p.add_argument("instance")
    common(p, "0:1:101")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("chernoff", help="Chernoff exponent and n-copy Bayes errors")
    p.add_argument("instance")
    common(p, "0:1:101")
    p.add_argument("--prior", type=float, default=None)
    p.set_defaults(func=cmd_chernoff, n_max=6)

    p = sub.add_parser("oracle-check", help="compare spectral and integral fractional powers")
    p.add_argument("files", nargs="*")
    common(p, "0.1,0.3,0.5,0.7,0.9")
    p.add_argument("--max-condition", type=float, default=1e6)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except ModineqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
