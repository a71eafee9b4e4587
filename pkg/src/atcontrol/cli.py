"""Command line entry point.

    atcontrol spectrum <scenario> [--samples N] [--out FILE]
    atcontrol evolve <scenario> [--out FILE] [--summary FILE]
    atcontrol sweep <scenario> --tf-grid a:b:n[log] [--out FILE] [--compare]
    atcontrol reproduce <figN> [--outdir DIR]

``<scenario>`` is a scenario file or the name of a built-in preset.  On
failure a single JSON error line is written to stderr and the exit code is 1.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import ATControlError
from .harness import (
    FIGURES,
    PRESETS,
    compare_models,
    load,
    parse_tf_grid,
    preset,
    reproduce,
    run_scenario,
    sweep_tf,
)
from .harness.runs import dataset_header
from .spectral import avoided_crossings, spectral_flow, write_columns

log = logging.getLogger("atcontrol")


def resolve_scenario(arg):
    if os.path.exists(arg):
        return load(arg)
    if arg in PRESETS:
        return preset(arg)
    raise FileNotFoundError(f"no scenario file or preset named {arg!r}; presets: {sorted(PRESETS)}")


def _sink(path):
    return sys.stdout if path in (None, "-") else path


def cmd_spectrum(args):
    s = resolve_scenario(args.scenario)
    flow = spectral_flow(s.model, s.manifold, s.drive, s.protocol, n_samples=args.samples)
    head = dataset_header(s, validity_flag="not applicable (instantaneous spectrum)")
    flow.to_csv(_sink(args.out), header=head)
    for c in avoided_crossings(flow):
        log.info("avoided crossing |1>-|%s> at tau=%.6g, gap=%.6g ns^-1", c.partner, c.tau, c.gap)


def cmd_evolve(args):
    s = resolve_scenario(args.scenario)
    res = run_scenario(s, out=_sink(args.out), summary=args.summary, n_out=args.n_out)
    log.info("%s: F=%.6f I=%.3e valid=%s", s.name, res.fidelity, res.infidelity, res.valid)


def cmd_sweep(args):
    s = resolve_scenario(args.scenario)
    grid = parse_tf_grid(args.tf_grid)
    if args.compare:
        cmp = compare_models(s, grid, args.workers)
        names, rows = cmp.columns()
        write_columns(_sink(args.out), names, rows,
                      dataset_header(s, t_f="swept", max_abs_dF=cmp.max_abs_diff))
        return
    res = sweep_tf(s, grid, args.workers)
    res.to_csv(_sink(args.out), header=dataset_header(s, t_f="swept"))
    for t, msg in res.errors.items():
        log.warning("t_f=%g failed: %s", t, msg)


def cmd_reproduce(args):
    for path in reproduce(args.figure, args.outdir):
        print(path)


def build_parser():
    parser = argparse.ArgumentParser(prog="atcontrol", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="instantaneous eigenvalues along the sweep")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--out", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("evolve", help="integrate one scenario")
    p.add_argument("scenario")
    p.add_argument("--out", help="population CSV (default stdout)")
    p.add_argument("--summary", help="JSON summary file")
    p.add_argument("--n-out", type=int, default=501)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("sweep", help="fidelity over a grid of final times")
    p.add_argument("scenario")
    p.add_argument("--tf-grid", required=True, help="a:b:n or a:b:nlog")
    p.add_argument("--out", help="CSV output (default stdout)")
    p.add_argument("--compare", action="store_true", help="run both 3- and 4-level models")
    p.add_argument("--workers", type=int, default=None,
                   help="worker processes (default $ATCONTROL_WORKERS or CPU count)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="write the datasets of one figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (ATControlError, OSError, ValueError, KeyError) as e:
        line = {"error": type(e).__name__, "message": str(e).strip("'\"")}
        print("error: " + json.dumps(line), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
