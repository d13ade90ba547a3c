"""CSV and text writers for run results, traces and reconciliation summaries.

Floats are written with ``repr`` so they parse back exactly; NaN becomes an
empty field. Files are UTF-8 with ``\\n`` line endings.
"""

import csv
import math
from pathlib import Path

RESULTS_HEADER = (
    "problem", "strategy", "bounds_mode", "seed", "best_objective", "constraint_values",
    "attempts", "evaluations", "elapsed_ms", "feasible",
)
TRACE_HEADER = ("attempt", "best_objective", "max_rel_width", "agg_violation")
SUMMARY_HEADER = (
    "problem", "strategy", "runs", "best", "mean", "sd", "mean_attempts", "mean_ms",
    "oracle_best", "paper_ref_value", "paper_ref_table", "delta_oracle_pct", "delta_paper_pct",
)


def fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def _write(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_results_csv(results, path):
    rows = []
    for r in results:
        rows.append([
            r.problem, r.strategy, r.bounds_mode, r.seed, fmt(r.best_objective),
            ";".join(fmt(float(g)) for g in r.best_constraints),
            r.attempts, r.evaluations, fmt(r.elapsed * 1000.0), fmt(bool(r.feasible)),
        ])
    return _write(path, RESULTS_HEADER, rows)


def read_results_csv(path):
    """Parse a results file back into plain dicts with numeric fields."""
    with open(path, encoding="utf-8", newline="") as handle:
        rows = []
        for row in csv.DictReader(handle):
            rows.append({
                "problem": row["problem"],
                "strategy": row["strategy"],
                "bounds_mode": row["bounds_mode"],
                "seed": int(row["seed"]),
                "best_objective": _parse(row["best_objective"]),
                "constraint_values": [_parse(v) for v in row["constraint_values"].split(";") if v],
                "attempts": int(row["attempts"]),
                "evaluations": int(row["evaluations"]),
                "elapsed_ms": _parse(row["elapsed_ms"]),
                "feasible": row["feasible"] == "true",
            })
    return rows


def _parse(text):
    return float(text) if text else float("nan")


def write_trace_csv(trace, path):
    data = trace.as_arrays()
    rows = zip(
        (int(a) for a in data["attempt"]),
        map(fmt, data["best_objective"]),
        map(fmt, data["max_rel_width"]),
        map(fmt, data["agg_violation"]),
    )
    return _write(path, TRACE_HEADER, rows)


def write_summary_csv(rows, path):
    out = []
    for r in rows:
        out.append([
            r.problem, r.strategy, r.runs, fmt(r.best), fmt(r.mean), fmt(r.sd),
            fmt(r.mean_attempts), fmt(r.mean_ms), fmt(r.oracle_best), fmt(r.paper_ref_value),
            r.paper_ref_table, fmt(r.delta_oracle_pct), fmt(r.delta_paper_pct),
        ])
    return _write(path, SUMMARY_HEADER, out)


def _num(value, spec=".6g"):
    value = float(value)
    return "-" if math.isnan(value) else format(value, spec)


def _grid(header, rows):
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip())
    return lines


def comparison_text(report):
    """Human-readable table: this run's statistics beside the published rows."""
    lines = [f"Table {report.table} reproduction", ""]
    head = ("problem", "strategy", "best", "mean", "sd", "attempts", "oracle",
            "published", "d_oracle%", "d_paper%", "flags")
    body = []
    notes = []
    for r in report.rows:
        flags = []
        if r.matches_oracle:
            flags.append("oracle-ok")
        if r.matches_paper:
            flags.append("paper-ok")
        if r.infeasible_model:
            flags.append("infeasible-model")
        body.append((
            r.problem, r.strategy, _num(r.best), _num(r.mean), _num(r.sd, ".3g"),
            _num(r.mean_attempts, ".0f"), _num(r.oracle_best), _num(r.paper_ref_value),
            _num(r.delta_oracle_pct, ".3f"), _num(r.delta_paper_pct, ".3f"),
            ",".join(flags) or "-",
        ))
        if r.note:
            notes.append(f"{r.problem}/{r.strategy}: {r.note}")
    lines += _grid(head, body)
    lines += ["", "SD is the population standard deviation of per-run bests.", ""]
    lines.append(f"Published rows (Table {report.table})")
    ref_rows = [
        (ref.problem, ref.algorithm, _num(ref.value),
         ";".join(_num(c) for c in ref.constraint_values) or "-", _num(ref.sd, ".3g"),
         _num(ref.iterations, ".0f"))
        for ref in report.references
    ]
    lines += _grid(("problem", "algorithm", "value", "constraints", "sd", "iterations"), ref_rows)
    if notes:
        lines += ["", "Notes"] + [f"- {n}" for n in notes]
    return "\n".join(lines) + "\n"


def write_text(text, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return path
