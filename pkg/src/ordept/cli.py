"""Command-line entry point: ``ordept <subcommand> [options]``."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import harness
from .harness import SimConfig, export_results, load_config, read_reference, read_results
from .patterns import pattern_iterator

# Flag name -> SimConfig field.
_FLAG_FIELDS = {
    "code": "code", "decoder": "decoder", "qmax": "qmax", "cmax": "cmax",
    "threshold": "threshold", "theta": "theta", "ebno": "ebno_db", "seed": "seed",
    "workers": "workers", "min_errors": "min_block_errors", "max_trials": "max_trials",
    "batch_size": "batch_size", "strict_eq3": "strict_eq3", "out": "out",
}


def _sim_args(p, decoder=True):
    p.add_argument("--config", help="key = value config file; flags override it")
    p.add_argument("--code", help="built-in code name or path to a code file")
    if decoder:
        p.add_argument("--decoder", choices=harness.DECODERS)
    p.add_argument("--qmax", type=int, help="maximum number of queries")
    p.add_argument("--cmax", type=int, help="maximum number of candidate codewords")
    p.add_argument("--threshold", type=float, help="analog-weight threshold for ordept-lt")
    p.add_argument("--theta", type=float, help="not-in-list probability threshold for ordept-sogrand")
    p.add_argument("--ebno", type=float, nargs="+", help="Eb/N0 points in dB")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--min-errors", dest="min_errors", type=int, help="block errors per point before stopping")
    p.add_argument("--max-trials", dest="max_trials", type=int, help="trial cap per point")
    p.add_argument("--batch-size", dest="batch_size", type=int, help="trials per worker task")
    p.add_argument("--strict-eq3", dest="strict_eq3", action="store_true", default=None,
                   help="reject PEPs whose partial syndrome is already zero")
    p.add_argument("--out", help="output directory")


def build_config(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else SimConfig()
    overrides = {}
    for flag, name in _FLAG_FIELDS.items():
        val = getattr(args, flag, None)
        if val is not None:
            overrides[name] = val
    return replace(cfg, **overrides).validate()


def _print_points(points, cfg, stream=None):
    stream = stream or sys.stdout
    stream.write(",".join(harness.CSV_FIELDS) + "\n")
    for p in points:
        row = {**p.__dict__, "decoder": cfg.decoder, "code": cfg.code, "qmax": cfg.qmax,
               "cmax": cfg.cmax, "threshold": cfg.threshold_value, "seed": cfg.seed}
        stream.write(",".join(harness._fmt(row[k]) for k in harness.CSV_FIELDS) + "\n")


def _stem(cfg):
    return f"{Path(cfg.code).stem}_{cfg.decoder}"


def cmd_sweep(args):
    cfg = build_config(args)
    points = harness.run_bler_sweep(cfg, dump_path=args.dump_instances, trace_path=args.trace)
    out = Path(cfg.out) / f"{_stem(cfg)}.csv"
    files = export_results(points, out, cfg, figure=not args.no_figure)
    _print_points(points, cfg)
    for lo, hi, kind in harness.bler_monotonicity(points):
        print(f"{kind}: BLER rises from {lo!r} dB to {hi!r} dB", file=sys.stderr)
    for f in files:
        print(f"wrote {f}", file=sys.stderr)
    return 0


def cmd_optimize_cmax(args):
    cfg = build_config(args)
    ref = read_reference(args.reference)
    res = harness.optimize_cmax(cfg, ref, c_cap=args.cmax_cap)
    for c, points, ok in res.history:
        for p in points:
            print(f"cmax={c} ebno_db={p.ebno_db!r} bler={p.bler!r} ci95=({p.ci95_lo!r},{p.ci95_hi!r}) "
                  f"ref={ref[p.ebno_db]!r} {'ok' if p.bler < ref[p.ebno_db] else 'fail'}")
    if not res.found:
        print(f"cmax* not found up to {args.cmax_cap}")
        return 1
    print(f"cmax*={res.value}")
    return 0


def cmd_optimize_threshold(args):
    cfg = build_config(args)
    ref = read_reference(args.reference)
    results = harness.optimize_threshold(cfg, cfg.cmax, ref, step=args.step, grid_max=args.grid_max)
    status = 0
    print("ebno_db,threshold,bler,ci95_lo,ci95_hi,avg_real_ops,reference")
    for e, res in results.items():
        if not res.found:
            print(f"{e!r},not found,,,,,{ref[e]!r}")
            status = 1
            continue
        point = next(p for t, p, ok in res.history if t == res.value)
        print(f"{e!r},{res.value!r},{point.bler!r},{point.ci95_lo!r},{point.ci95_hi!r},"
              f"{point.avg_real_ops!r},{ref[e]!r}")
    return status


def cmd_patterns(args):
    for p in pattern_iterator(args.n, args.count):
        print(" ".join(map(str, p.ranks)))
    return 0


def cmd_uncoded_ber(args):
    print("ebno_db,errors,bits,ber,theory,z_score")
    for row in harness.uncoded_ber_check(args.ebno, n_bits=args.bits, seed=args.seed):
        print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return 0


def cmd_plot(args):
    from .plotting import plot_curves

    curves = {}
    for path in args.csv:
        points, meta = read_results(path)
        label = meta.get("decoder") or Path(path).stem
        if label in curves:
            label = f"{label} ({Path(path).stem})"
        curves[label] = points
    plot_curves(curves, args.output, title=args.title)
    print(f"wrote {args.output}", file=sys.stderr)
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="ordept", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo BLER/complexity sweep")
    _sim_args(p)
    p.add_argument("--trace", help="write per-query decoder traces to this file")
    p.add_argument("--dump-instances", dest="dump_instances", help="write per-trial channel records")
    p.add_argument("--no-figure", dest="no_figure", action="store_true", help="skip the SVG figure")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize-cmax", help="smallest C_max beating a reference BLER curve")
    _sim_args(p, decoder=False)
    p.add_argument("--reference", required=True, help="CSV with ebno_db and bler columns")
    p.add_argument("--cmax-cap", dest="cmax_cap", type=int, default=64)
    p.set_defaults(func=cmd_optimize_cmax)

    p = sub.add_parser("optimize-threshold", help="largest epsilon_T per Eb/N0 at fixed C_max")
    _sim_args(p, decoder=False)
    p.add_argument("--reference", required=True, help="CSV with ebno_db and bler columns")
    p.add_argument("--step", type=float, default=0.25, help="threshold grid resolution")
    p.add_argument("--grid-max", dest="grid_max", type=float, default=32.0)
    p.set_defaults(func=cmd_optimize_threshold)

    p = sub.add_parser("patterns", help="print the first K rank patterns")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("uncoded-ber", help="uncoded BPSK hard-decision BER against Q(1/sigma)")
    p.add_argument("--ebno", type=float, nargs="+", default=[0.0, 2.0, 4.0])
    p.add_argument("--bits", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_uncoded_ber)

    p = sub.add_parser("plot", help="combine result CSVs into one figure")
    p.add_argument("csv", nargs="+")
    p.add_argument("-o", "--output", required=True, help="figure path (.svg, .png, .pdf)")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"ordept: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
