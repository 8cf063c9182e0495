"""Command-line front end: ``qcorr {measures,sweep,boundary,designs,experiment}``.

Exit status is 0 on success, 1 on a domain error and 2 on an I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from . import __version__
from .bell import appendix_c_settings
from .errors import QcorrError
from .expsim import MEASURE_NAMES, analytic_measures, estimate_measures
from .states import StatePoint, family_state
from .steering import C16_REPORTED, DESIGNS, design, lhs_bound
from .sweep import MEASURES, evaluate_point, sweep_grid, trace_boundary_curve

SWEEP_HEADER = [
    "theta", "damping", "concurrence", "bell_S", "bell_branch", "steering_T16",
    "unsteering_tU", "unsteering_TU", "entangled", "bell_nonlocal", "steerable",
    "unsteerable", "undetermined",
]
FLAG_NAMES = SWEEP_HEADER[8:]


def parse_angle(text: str) -> float:
    """Radians, or a multiple of pi written with a ``pi`` suffix (``0.35pi``)."""
    s = text.strip().lower()
    try:
        if s.endswith("pi"):
            head = s[:-2].strip().rstrip("*")
            return (float(head) if head else 1.0) * math.pi
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def num(x: float) -> float | None:
    """JSON-ready float rounded to 12 significant digits; NaN becomes null."""
    x = float(x)
    return None if math.isnan(x) else float(fmt(x))


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_output(text: str, out: str | None):
    """Write to stdout, or atomically replace ``out`` via a temporary sibling file."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qcorr-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _report_row(r) -> list[str]:
    return [fmt(r.point.theta), fmt(r.point.damping), fmt(r.concurrence), fmt(r.bell_s),
            r.bell_branch, fmt(r.t16), fmt(r.t_u), fmt(r.T_u)] + \
           [str(int(r.flags[f])) for f in FLAG_NAMES]


def _report_json(r) -> dict:
    return {
        "theta": num(r.point.theta),
        "damping": num(r.point.damping),
        "concurrence": num(r.concurrence),
        "bell_S": num(r.bell_s),
        "bell_branch": r.bell_branch,
        "steering_T16": num(r.t16),
        "unsteering_tU": num(r.t_u),
        "unsteering_TU": num(r.T_u),
        "flags": r.flags,
    }


def cmd_measures(args) -> str:
    r = evaluate_point(StatePoint(args.theta, args.damping))
    if args.format == "json":
        return _json_text(_report_json(r))
    return _csv_text(SWEEP_HEADER, [_report_row(r)])


def cmd_sweep(args) -> str:
    reports = sweep_grid((args.theta_min, args.theta_max), (args.d_min, args.d_max),
                         (args.theta_steps, args.d_steps))
    if args.format == "json":
        return _json_text([_report_json(r) for r in reports])
    return _csv_text(SWEEP_HEADER, [_report_row(r) for r in reports])


def cmd_boundary(args) -> str:
    curve = trace_boundary_curve(args.measure, args.theta_min, args.theta_max,
                                 args.theta_steps, scan_step=args.scan_step)
    if args.format == "json":
        return _json_text({
            "measure": curve.measure,
            "samples": [{"theta": num(t), "d_star": num(d), "branch": b}
                        for t, d, b in curve.samples],
            "switch_points": [{"theta": num(t), "damping": num(d)}
                              for t, d in curve.switch_points],
            "tangencies": [{"theta": num(t), "damping": num(d)}
                           for t, d in curve.tangencies],
        })
    rows = [["sample", fmt(t), fmt(d), b or ""] for t, d, b in curve.samples]
    rows += [["switch", fmt(t), fmt(d), ""] for t, d in curve.switch_points]
    rows += [["tangency", fmt(t), fmt(d), ""] for t, d in curve.tangencies]
    return _csv_text(["kind", "theta", "damping", "branch"], rows)


def cmd_designs(args) -> str:
    axes = design(args.set)
    bound = lhs_bound(axes)
    if args.format == "json":
        obj = {"set": axes.label, "m": len(axes), "lhs_bound": num(bound),
               "axes": [[num(c) for c in v] for v in axes.axes]}
        if args.set == "combined16":
            obj["reported_bound"] = C16_REPORTED
        return _json_text(obj)
    rows = [[axes.label, str(len(axes)), fmt(bound), str(k)] + [fmt(c) for c in v]
            for k, v in enumerate(axes.axes, start=1)]
    return _csv_text(["set", "m", "lhs_bound", "index", "nx", "ny", "nz"], rows)


def cmd_experiment(args) -> str:
    p = StatePoint(args.theta, args.damping)
    rho = family_state(p)
    # the fixed settings are tuned for the maximally entangled input only
    chsh = appendix_c_settings(p.damping) if abs(p.theta - math.pi / 4) < 1e-12 else None
    est = estimate_measures(rho, args.counts, seed=args.seed, replicas=args.replicas, chsh=chsh)
    truth = analytic_measures(rho, chsh)
    if args.format == "json":
        return _json_text({
            "theta": num(p.theta), "damping": num(p.damping),
            "mean_counts": num(args.counts), "seed": args.seed, "replicas": args.replicas,
            "estimates": {k: {"value": num(est[k].value), "std_error": num(est[k].std_error),
                              "replicas": est[k].replicas, "analytic": num(truth[k])}
                          for k in MEASURE_NAMES},
        })
    rows = [[k, fmt(est[k].value), fmt(est[k].std_error), str(est[k].replicas), fmt(truth[k])]
            for k in MEASURE_NAMES]
    return _csv_text(["measure", "value", "std_error", "replicas", "analytic"], rows)


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _steps(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("steps must be at least 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_format):
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=default_format)

    p = sub.add_parser("measures", help="all quantifiers at one (theta, D) point")
    p.add_argument("--theta", type=parse_angle, required=True)
    p.add_argument("--damping", type=float, required=True)
    common(p, "json")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("sweep", help="quantifiers on a (theta, D) grid")
    p.add_argument("--theta-min", type=parse_angle, default=0.0)
    p.add_argument("--theta-max", type=parse_angle, default=math.pi / 2)
    p.add_argument("--theta-steps", type=_steps, default=51)
    p.add_argument("--d-min", type=float, default=0.0)
    p.add_argument("--d-max", type=float, default=1.0)
    p.add_argument("--d-steps", type=_steps, default=51)
    common(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("boundary", help="sudden-death boundary curve of one measure")
    p.add_argument("--measure", choices=MEASURES, required=True)
    p.add_argument("--theta-min", type=parse_angle, required=True)
    p.add_argument("--theta-max", type=parse_angle, required=True)
    p.add_argument("--theta-steps", type=_steps, default=100)
    p.add_argument("--scan-step", type=float, default=1e-3)
    common(p, "csv")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("designs", help="measurement axes and their LHS bound")
    p.add_argument("--set", choices=DESIGNS, required=True)
    common(p, "json")
    p.set_defaults(func=cmd_designs)

    p = sub.add_parser("experiment", help="simulated counting experiment with error bars")
    p.add_argument("--theta", type=parse_angle, default=math.pi / 4)
    p.add_argument("--damping", type=float, required=True)
    p.add_argument("--counts", type=float, default=1e5, help="mean counts per setting")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--replicas", type=int, default=100)
    common(p, "json")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except QcorrError as exc:
        print(f"qcorr: error: {exc}", file=sys.stderr)
        return 1
    try:
        write_output(text, args.out)
    except OSError as exc:
        print(f"qcorr: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
