"""Command-line interface.

Exit status: 0 on success, 1 when a comparison or property check fails,
2 on configuration or data errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import report
from .config import parse_config
from .errors import ConfigError, FixedPointError
from .mappings import CATALOG
from .runner import run
from .schemes import ParamSeq

log = logging.getLogger("fpscheme")

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _add_run_flags(p: argparse.ArgumentParser, multi_scheme: bool):
    p.add_argument("--config", help="JSON configuration file; flags override its entries")
    p.add_argument("--map", help="catalog map id (see list-maps)")
    p.add_argument("--scheme", action="append",
                   help="picard|mann|ishikawa|noor|new" + (" (repeatable)" if multi_scheme else ""))
    for c in ("alpha", "beta", "gamma"):
        p.add_argument(f"--{c}", help="coefficient sequence: 0.2, rational:a,b,c,d or table:v1,v2,...")
    p.add_argument("--x0", action="append",
                   help="initial point as comma-separated reals (repeatable)")
    p.add_argument("--p", help="norm exponent (>= 1 or 'inf')")
    p.add_argument("--tol", type=float, help="residual tolerance")
    p.add_argument("--max-iter", type=int, help="maximum number of iterates")
    p.add_argument("--steps", type=int, help="run exactly this many iterates")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=report_formats(), help="output format")
    p.add_argument("--seed", type=int, help="seed for randomized probes")


def report_formats():
    return ("csv", "json")


def build_config(args, default_schemes):
    """Merge the optional config file with command-line flags into a RunConfig."""
    doc = {}
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: line {exc.lineno}: {exc.msg}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
    problems = []
    if args.map:
        doc["map"] = args.map
    coeffs = {}
    for c in ("alpha", "beta", "gamma"):
        text = getattr(args, c)
        if text is not None:
            try:
                coeffs[c] = ParamSeq.parse(text).to_config()
            except FixedPointError as exc:
                problems.append(f"--{c}: {exc}")
    if args.scheme:
        doc["schemes"] = [{"kind": k, **coeffs} for k in args.scheme]
    elif coeffs or "schemes" not in doc:
        doc["schemes"] = [{"kind": k, **coeffs} for k in default_schemes]
    if args.x0:
        try:
            doc["initial_points"] = [[float(v) for v in x.split(",")] for x in args.x0]
        except ValueError:
            problems.append(f"--x0: cannot parse {args.x0}")
    if args.p is not None:
        doc["p"] = args.p
    stop = dict(doc.get("stop", {})) if isinstance(doc.get("stop", {}), dict) else {}
    if args.tol is not None:
        stop["residual_tol"] = args.tol
    if args.max_iter is not None:
        stop["max_iters"] = args.max_iter
    if args.steps is not None:
        stop["fixed_steps"] = args.steps
        stop.setdefault("max_iters", args.steps)
    if stop:
        doc["stop"] = stop
    for key in ("out", "format", "seed"):
        if getattr(args, key) is not None:
            doc[key] = getattr(args, key)
    try:
        cfg = parse_config(doc)
    except ConfigError as exc:
        raise ConfigError(problems + exc.problems) from None
    if problems:
        raise ConfigError(problems)
    return cfg


def _write(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    cfg = build_config(args, ["new"])
    trajs = []
    multi = len(cfg.initial_points) > 1 or len(cfg.schemes) > 1
    for spec in cfg.schemes:
        for x0 in cfg.initial_points:
            label = f"{spec.kind}@{','.join(f'{v:g}' for v in x0)}" if multi else spec.kind
            trajs.append(run(cfg.mapping, spec, x0, cfg.space, cfg.stop, label=label))
    for t in trajs:
        log.info("%s: %d iterates, stop reason %s, final residual %.3g",
                 t.label, len(t), t.stop_reason, t.final.residual)
    if cfg.format == "json":
        _write(report.to_json([report.trajectory_dict(t) for t in trajs]), cfg.out)
    else:
        _write(report.plot_data_csv(trajs), cfg.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = build_config(args, ["mann", "ishikawa", "noor", "new"])
    rep = report.compare(cfg)
    if cfg.format == "json":
        sys.stdout.write(report.to_json(rep.to_dict()))
    else:
        sys.stdout.write(report.summary_csv(rep.summaries))
    return EXIT_OK


def cmd_reproduce_table(args) -> int:
    golden = report.load_golden(args.golden)
    rep = report.reproduce_table(steps=args.steps, golden=golden)
    print(report.format_table(rep))
    print()
    print(report.format_summary(rep.summaries))
    if args.out:
        if args.format == "json":
            report.write_json(rep.to_dict(), args.out)
        else:
            _write(report.cells_csv(rep), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_check_properties(args) -> int:
    props = None
    if args.properties is not None:
        props = [p.strip() for p in args.properties.split(",") if p.strip()]
    maps = None
    if args.map:
        unknown = [m for m in args.map if m not in CATALOG]
        if unknown:
            raise ConfigError([f"unknown map {m!r}" for m in unknown])
        maps = [CATALOG[m] for m in args.map]
    reports, status = report.check_properties(
        maps=maps, properties=props, seed=args.seed, n_coeffs=args.coeff_samples,
        n_starts=args.start_samples, steps=args.steps, include_picard=args.include_picard)
    if args.format == "json":
        text = report.to_json([r.to_dict() for r in reports])
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["property_id", "passed", "worst_violation", "tolerance", "value",
                    "expected_failure", "context"])
        for r in reports:
            ctx = {k: v for k, v in r.context.items() if k != "expected_failure"}
            w.writerow([r.property_id, int(r.passed), format(r.worst_violation, ".17g"),
                        format(r.tolerance, ".17g"),
                        "" if r.value is None else format(r.value, ".17g"),
                        int(bool(r.context.get("expected_failure"))),
                        json.dumps(report._jsonable(ctx), sort_keys=True)])
        text = buf.getvalue()
    _write(text, args.out)
    n_fail = sum(not r.passed for r in reports)
    print(f"{len(reports)} reports, {n_fail} failed, exit status {status}", file=sys.stderr)
    return status


def cmd_list_maps(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "dim", "lower", "upper", "ball_radius", "known_fixed_points",
                "claims_nonexpansive", "description"])
    for m in CATALOG.values():
        w.writerow([m.id, m.dim, " ".join(f"{v:g}" for v in m.lower),
                    " ".join(f"{v:g}" for v in m.upper),
                    "" if m.ball_radius is None else f"{m.ball_radius:g}",
                    ";".join(" ".join(f"{v:g}" for v in fp) for fp in m.known_fixed_points),
                    int(m.claims_nonexpansive), m.description])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpscheme", description="Fixed-point iteration schemes for nonexpansive maps.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run schemes and emit trajectories")
    _add_run_flags(p, multi_scheme=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare schemes by steps and evaluations to tolerance")
    _add_run_flags(p, multi_scheme=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce-table", help="regress against the published iterate table")
    p.add_argument("--steps", type=int, help="compare only the first N steps")
    p.add_argument("--golden", help="alternative golden table file")
    p.add_argument("--out", help="write the cell-by-cell comparison here")
    p.add_argument("--format", choices=report_formats(), default="csv")
    p.set_defaults(func=cmd_reproduce_table)

    p = sub.add_parser("check-properties", help="run the convergence-theory property suite")
    p.add_argument("--map", action="append", help="restrict to catalog map (repeatable)")
    p.add_argument("--properties", help="comma-separated subset of "
                   + ",".join(report.PROPERTY_IDS) + "; empty string selects none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--coeff-samples", type=int, default=20)
    p.add_argument("--start-samples", type=int, default=100)
    p.add_argument("--include-picard", action="store_true",
                   help="add Picard on paper_example as a documented expected failure")
    p.add_argument("--out", help="output path")
    p.add_argument("--format", choices=report_formats(), default="csv")
    p.set_defaults(func=cmd_check_properties)

    p = sub.add_parser("list-maps", help="list catalog mappings")
    p.set_defaults(func=cmd_list_maps)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FixedPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
