"""Golden-table regression, scheme comparison and CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .config import PAPER_INITIAL_POINTS, RunConfig, point_label
from .diagnostics import (PropertyReport, check_afps, check_fejer, check_mann_equivalence,
                          condition_I_margin)
from .errors import ConfigError, DataFormatError, InvalidInputError
from .mappings import CATALOG, get_map, nonexpansiveness_probe
from .runner import StopRule, Trajectory, TrajectoryRecord, evals_to_tol, iterations_to_tol, run
from .schemes import AVERAGED_KINDS, ParamSeq, SchemeSpec
from .space import as_point

TABLE_TOLERANCE = 5e-5
TABLE_SCHEMES = AVERAGED_KINDS
# Row 17 of the published table for x0 = 0.01 repeats row 7 verbatim.
ERRATUM_STEP = 17
ERRATUM_X0 = 0.01


# -- golden table -----------------------------------------------------------

@dataclass(frozen=True)
class GoldenTable:
    """The published iterate table, cell literals kept exactly as printed."""

    columns: tuple          # ((scheme, x0), ...)
    rows: tuple             # one tuple of literal strings per step
    erratum_cells: frozenset = frozenset()

    @property
    def steps(self) -> int:
        return len(self.rows)

    def literal(self, step: int, scheme: str, x0: float) -> str:
        return self.rows[step - 1][self.columns.index((scheme, x0))]

    def value(self, step: int, scheme: str, x0: float) -> float:
        return float(self.literal(step, scheme, x0))

    def is_erratum(self, step: int, scheme: str, x0: float) -> bool:
        return (step, scheme, x0) in self.erratum_cells


def parse_golden(text: str) -> GoldenTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataFormatError("missing header", 1)
    header = lines[0].split()
    if header[0] != "step":
        raise DataFormatError("header must start with 'step'", 1)
    columns = []
    for name in header[1:]:
        scheme, sep, x0 = name.partition("@")
        try:
            columns.append((scheme, float(x0)))
        except ValueError:
            raise DataFormatError(f"bad column name {name!r}", 1) from None
        if not sep or scheme not in TABLE_SCHEMES:
            raise DataFormatError(f"bad column name {name!r}", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split()
        if len(cells) != len(header):
            raise DataFormatError(f"expected {len(header)} fields, found {len(cells)}", lineno)
        if cells[0] != str(len(rows) + 1):
            raise DataFormatError(f"expected step {len(rows) + 1}, found {cells[0]!r}", lineno)
        for c in cells[1:]:
            try:
                v = float(c)
            except ValueError:
                raise DataFormatError(f"not a number: {c!r}", lineno) from None
            if not math.isfinite(v):
                raise DataFormatError(f"not a finite number: {c!r}", lineno)
        rows.append(tuple(cells[1:]))
    if not rows:
        raise DataFormatError("table has no data rows", len(lines))
    errata = frozenset((ERRATUM_STEP, s, x0) for s, x0 in columns
                       if x0 == ERRATUM_X0 and len(rows) >= ERRATUM_STEP)
    return GoldenTable(tuple(columns), tuple(rows), errata)


def load_golden(path=None) -> GoldenTable:
    if path is None:
        text = resources.files("fpscheme").joinpath("data/table1.txt").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataFormatError(f"cannot read golden table {path}: {exc}") from exc
    return parse_golden(text)


# -- comparison reports -----------------------------------------------------

@dataclass
class CellComparison:
    step: int
    scheme: str
    x0: float
    computed: float
    reference: str
    abs_diff: float
    passed: bool
    erratum: bool = False


@dataclass
class ConvergenceSummary:
    label: str
    scheme: str
    x0: str
    tol: float
    iterations: Optional[int]
    evals: Optional[int]
    steps_run: int
    final_value: list


@dataclass
class ComparisonReport:
    cells: list = field(default_factory=list)
    summaries: list = field(default_factory=list)
    tolerance: float = TABLE_TOLERANCE
    trajectories: list = field(default_factory=list, repr=False)

    @property
    def counted(self) -> list:
        return [c for c in self.cells if not c.erratum]

    @property
    def n_passed(self) -> int:
        return sum(c.passed for c in self.counted)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.counted)

    def column_max_diff(self) -> dict:
        out = {}
        for c in self.counted:
            key = f"{c.scheme}@{c.x0:g}"
            out[key] = max(out.get(key, 0.0), c.abs_diff)
        return out

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "cells_compared": len(self.counted),
            "cells_passed": self.n_passed,
            "erratum_cells": sum(c.erratum for c in self.cells),
            "column_max_diff": self.column_max_diff(),
            "cells": [vars(c).copy() for c in self.cells],
            "summaries": [vars(s).copy() for s in self.summaries],
        }


def _summarise(traj: Trajectory, x0: str, tol: float, target) -> ConvergenceSummary:
    return ConvergenceSummary(
        traj.label, traj.spec.kind if traj.spec else "", x0, tol,
        iterations_to_tol(traj, target, tol), evals_to_tol(traj, target, tol),
        len(traj), [float(v) for v in traj.final.iterate])


def reproduce_table(steps: Optional[int] = None, golden: Optional[GoldenTable] = None,
                    tolerance: float = TABLE_TOLERANCE) -> ComparisonReport:
    """Recompute the published table and compare it cell by cell.

    Runs the four averaged schemes with alpha_n = 0.2, beta_n = n/(2n+1) and
    gamma_n = n/(n+1) on K(x) = 1 - x from 0.01 and -0.5.
    """
    golden = golden or load_golden()
    steps = golden.steps if steps is None else steps
    if not 1 <= steps <= golden.steps:
        raise InvalidInputError(f"steps must lie in 1..{golden.steps}")
    mapping = get_map("paper_example")
    report = ComparisonReport(tolerance=tolerance)
    for x0 in PAPER_INITIAL_POINTS:
        for kind in TABLE_SCHEMES:
            traj = run(mapping, SchemeSpec.paper(kind), [x0], stop=StopRule.fixed(steps),
                       label=f"{kind}@{x0:g}")
            report.trajectories.append(traj)
            for rec in traj.records:
                ref = golden.literal(rec.n, kind, x0)
                computed = float(rec.iterate[0])
                diff = abs(computed - float(ref))
                report.cells.append(CellComparison(
                    rec.n, kind, x0, computed, ref, diff, diff <= tolerance,
                    golden.is_erratum(rec.n, kind, x0)))
            report.summaries.append(_summarise(traj, f"{x0:g}", tolerance, [0.5]))
    return report


def _dedupe_labels(specs) -> list:
    labels, seen = [], {}
    for spec in specs:
        seen[spec.kind] = seen.get(spec.kind, 0) + 1
        labels.append(spec.kind if seen[spec.kind] == 1 else f"{spec.kind}#{seen[spec.kind]}")
    return labels


def compare(config: RunConfig) -> ComparisonReport:
    """Run every configured scheme from every initial point and tabulate how
    many steps and evaluations each needs to reach the configured tolerances.

    The target for each trajectory is the known fixed point nearest its last
    iterate, or the last iterate itself when F(K) is unknown. When
    ``config.out`` is set the long-format trajectories are written there and
    the summary next to it as ``<stem>_summary.<format>``.
    """
    if len(config.schemes) < 2:
        raise ConfigError("compare needs at least two schemes")
    report = ComparisonReport(tolerance=min(config.tolerances))
    multi = len(config.initial_points) > 1
    for spec, label in zip(config.schemes, _dedupe_labels(config.schemes)):
        for x0 in config.initial_points:
            xl = point_label(x0)
            traj = run(config.mapping, spec, x0, config.space, config.stop,
                       label=f"{label}@{xl}" if multi else label)
            report.trajectories.append(traj)
            target = config.mapping.nearest_fixed_point(traj.final.iterate, config.space)
            if target is None:
                target = traj.final.iterate
            for tol in config.tolerances:
                report.summaries.append(_summarise(traj, xl, tol, target))
    if config.out is not None:
        out = Path(config.out)
        emit_plot_data(report.trajectories, out)
        summary_path = out.with_name(f"{out.stem}_summary.{config.format}")
        if config.format == "json":
            write_json(report.to_dict(), summary_path)
        else:
            summary_path.write_text(summary_csv(report.summaries), newline="")
    return report


# -- emission ---------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def plot_data_csv(trajectories) -> str:
    """Long-format CSV text: one row per (trajectory, step)."""
    trajectories = list(trajectories)
    if not trajectories:
        raise InvalidInputError("no trajectories to emit")
    d = trajectories[0].dim
    if any(t.dim != d for t in trajectories):
        raise InvalidInputError("trajectories have inconsistent dimensions")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme_id", "n", *(f"x{i + 1}" for i in range(d)),
                "residual", "error_to_F", "cumulative_evals"])
    for t in trajectories:
        for r in t.records:
            w.writerow([t.label, r.n, *(_fmt(v) for v in r.iterate),
                        _fmt(r.residual), _fmt(r.error_to_F), r.cumulative_evals])
    return buf.getvalue()


def emit_plot_data(trajectories, path) -> Path:
    path = Path(path)
    text = plot_data_csv(trajectories)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def parse_plot_data(text: str) -> list:
    """Inverse of :func:`plot_data_csv`. Loaded trajectories carry no stop reason."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataFormatError("empty plot-data file", 1)
    header = rows[0]
    d = len(header) - 5
    expected = ["scheme_id", "n", *(f"x{i + 1}" for i in range(d)),
                "residual", "error_to_F", "cumulative_evals"]
    if d < 1 or header != expected:
        raise DataFormatError(f"unexpected header {header}", 1)
    groups: dict = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataFormatError(f"expected {len(header)} fields, found {len(row)}", lineno)
        try:
            rec = TrajectoryRecord(
                int(row[1]), as_point([float(v) for v in row[2:2 + d]]), float(row[2 + d]),
                float(row[3 + d]) if row[3 + d] else None, int(row[4 + d]))
        except (ValueError, InvalidInputError) as exc:
            raise DataFormatError(str(exc), lineno) from None
        groups.setdefault(row[0], []).append(rec)
    return [Trajectory(tuple(recs), None, label) for label, recs in groups.items()]


def read_plot_data(path) -> list:
    with open(path, newline="") as fh:
        return parse_plot_data(fh.read())


def summary_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme_id", "x0", "tol", "iterations_to_tol", "evals_to_tol",
                "steps_run", "final_value", "final_value_5dp"])
    for s in summaries:
        final = ";".join(_fmt(v) for v in s.final_value)
        rounded = ";".join(f"{v:.5f}" for v in s.final_value)
        w.writerow([s.label, s.x0, repr(float(s.tol)), "" if s.iterations is None else s.iterations,
                    "" if s.evals is None else s.evals, s.steps_run, final, rounded])
    return buf.getvalue()


def cells_csv(report: ComparisonReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "scheme", "x0", "computed", "computed_5dp", "reference",
                "abs_diff", "passed", "erratum"])
    for c in report.cells:
        w.writerow([c.step, c.scheme, f"{c.x0:g}", _fmt(c.computed), f"{c.computed:.5f}",
                    c.reference, _fmt(c.abs_diff), int(c.passed), int(c.erratum)])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def write_json(obj, path) -> Path:
    path = Path(path)
    path.write_text(to_json(obj))
    return path


def trajectory_dict(traj: Trajectory) -> dict:
    return {
        "scheme_id": traj.label,
        "stop_reason": traj.stop_reason,
        "records": [
            {"n": r.n, "iterate": [float(v) for v in r.iterate], "residual": r.residual,
             "error_to_F": r.error_to_F, "cumulative_evals": r.cumulative_evals}
            for r in traj.records
        ],
    }


def format_table(report: ComparisonReport) -> str:
    """Human-facing rendering of the reproduced table, five decimals like the original."""
    by_key = {(c.step, c.scheme, c.x0): c for c in report.cells}
    steps = sorted({c.step for c in report.cells})
    cols = [(s, x0) for x0 in PAPER_INITIAL_POINTS for s in TABLE_SCHEMES]
    head = "step " + " ".join(f"{s[:4]}@{x0:g}".rjust(11) for s, x0 in cols)
    lines = [head]
    for n in steps:
        cells = []
        for s, x0 in cols:
            c = by_key.get((n, s, x0))
            mark = "*" if c and c.erratum else ("!" if c and not c.passed else " ")
            cells.append((f"{c.computed:.5f}" + mark).rjust(11) if c else " " * 11)
        lines.append(f"{n:>4} " + " ".join(cells))
    lines.append(f"{report.n_passed}/{len(report.counted)} cells within "
                 f"{report.tolerance:g}; * = erratum cell (not counted), ! = mismatch")
    return "\n".join(lines)


def format_summary(summaries) -> str:
    lines = [f"{'scheme_id':<22}{'tol':>9}{'iters':>8}{'evals':>8}  final (5 dp)"]
    for s in summaries:
        it = "-" if s.iterations is None else str(s.iterations)
        ev = "-" if s.evals is None else str(s.evals)
        final = ", ".join(f"{v:.5f}" for v in s.final_value)
        lines.append(f"{s.label:<22}{s.tol:>9.0e}{it:>8}{ev:>8}  {final}")
    return "\n".join(lines)


# -- property suite ---------------------------------------------------------

PROPERTY_IDS = ("nonexpansive", "fejer", "afps", "convergence", "condition_I",
                "mann_equivalence")


def _random_spec(kind: str, rng: np.random.Generator) -> SchemeSpec:
    c = {k: ParamSeq.constant(float(rng.uniform(0.05, 0.95))) for k in ("alpha", "beta", "gamma")}
    if kind == "mann":
        c = {"alpha": c["alpha"]}
    elif kind in ("ishikawa", "new"):
        c.pop("gamma")
    return SchemeSpec(kind, **c)


def check_properties(maps=None, properties=None, seed: int = 0, n_coeffs: int = 20,
                     n_starts: int = 100, steps: int = 200, include_picard: bool = False):
    """Run the diagnostics suite and return ``(reports, exit_status)``.

    ``maps`` defaults to the whole catalog and ``properties`` to every id in
    :data:`PROPERTY_IDS`; an empty selection yields no reports and status 0.
    With ``include_picard`` the Picard iteration on ``paper_example`` is added
    to the afps check; it oscillates, so that report fails and is tagged
    ``expected_failure`` without affecting the exit status.
    """
    maps = list(CATALOG.values()) if maps is None else list(maps)
    wanted = PROPERTY_IDS if properties is None else tuple(properties)
    unknown = [p for p in wanted if p not in PROPERTY_IDS]
    if unknown:
        raise ConfigError([f"unknown property {p!r}" for p in unknown])
    rng = np.random.default_rng(seed)
    stop = StopRule.fixed(steps)
    reports = []

    def tag(rep, **ctx):
        rep.context.update(ctx)
        reports.append(rep)

    if "nonexpansive" in wanted:
        for m in maps:
            if m.claims_nonexpansive:
                ratio = nonexpansiveness_probe(m, 10_000, seed)
                tag(PropertyReport("nonexpansive", ratio <= 1 + 1e-9, max(0.0, ratio - 1.0),
                                   1e-9, value=ratio), map=m.id)

    if "fejer" in wanted:
        for m in maps:
            if not (m.claims_nonexpansive and m.known_fixed_points):
                continue
            for kind in AVERAGED_KINDS:
                specs = [SchemeSpec.paper(kind)] + [_random_spec(kind, rng) for _ in range(n_coeffs)]
                starts = list(m.sample(rng, len(specs)))
                if m.id == "paper_example":
                    starts[0] = np.array([PAPER_INITIAL_POINTS[0]])
                for spec, x0 in zip(specs, starts):
                    traj = run(m, spec, x0, stop=stop)
                    worst = max((check_fejer(traj, w) for w in m.known_fixed_points),
                                key=lambda r: r.worst_violation)
                    tag(worst, map=m.id, scheme=kind, spec=spec.to_config(),
                        x0=[float(v) for v in x0])

    paper = CATALOG["paper_example"]
    if any(p in wanted for p in ("afps", "convergence")) and paper in maps:
        starts = [[x] for x in PAPER_INITIAL_POINTS] + [[x] for x in rng.uniform(-1, 1, n_starts)]
        for kind in AVERAGED_KINDS:
            spec = SchemeSpec.paper(kind)
            for x0 in starts:
                traj = run(paper, spec, x0, stop=stop)
                if "afps" in wanted:
                    tag(check_afps(traj, 10, 1e-8), map=paper.id, scheme=kind, x0=x0)
                if "convergence" in wanted and x0[0] in PAPER_INITIAL_POINTS:
                    err = traj.final.error_to_F
                    tag(PropertyReport("convergence", err <= 1e-10, err, 1e-10,
                                       (traj.final.n, traj.final.iterate)),
                        map=paper.id, scheme=kind, x0=x0)
        if include_picard and "afps" in wanted:
            traj = run(paper, SchemeSpec("picard"), [0.01], stop=stop)
            tag(check_afps(traj, 10, 1e-8), map=paper.id, scheme="picard", x0=[0.01],
                expected_failure=True)

    if "condition_I" in wanted:
        for m in maps:
            if m.known_fixed_points or m.fixed_set_distance is not None:
                tag(condition_I_margin(m, 1000, seed), map=m.id)

    if "mann_equivalence" in wanted:
        for m in maps:
            for _ in range(n_coeffs):
                a, b = rng.uniform(0.05, 0.95, 2)
                x0 = m.sample(rng, 1)[0]
                rep = check_mann_equivalence(m, x0, ParamSeq.constant(a), ParamSeq.constant(b), 50)
                tag(rep, map=m.id, alpha=float(a), beta=float(b))

    failed = [r for r in reports if not r.passed and not r.context.get("expected_failure")]
    return reports, (1 if failed else 0)
