"""Command line front end: run, oracle, reproduce and list.

Exit codes: 0 success, 1 usage or configuration error, 2 finished but the
oracle found the model infeasible, 3 I/O or internal failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np
import yaml

from .exceptions import CIOptError, ConfigurationError, UsageError
from .harness import (
    TABLES,
    ExperimentPlan,
    load_reference_values,
    oracle_search,
    reconcile,
    reference_for,
    reproduce_table,
    run_batch,
    summarize,
)
from .problems import PROBLEM_NAMES, get_problem
from .reports import (
    comparison_text,
    write_results_csv,
    write_summary_csv,
    write_text,
    write_trace_csv,
)
from .strategies import STRATEGY_KINDS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_FAILURE = 3

BOUNDS_CHOICES = ("as-written", "paper-calibrated")
# published table holding each problem's comparison rows
PROBLEM_TABLES = {"ajmb": 11, "ajmd": 12, "wjm": 13, "usm": 14, "grinding": 15}

DEFAULTS = {
    "candidates": 5,
    "reduction": 0.99,
    "runs": 30,
    "seed": 42,
    "bounds_mode": "as-written",
    "max_attempts": 5000,
    "out": "out",
    "budget": 1_000_000,
    "oracle_budget": 1_000_000,
}
STRATEGY_KEYS = ("delta", "phi", "a_mod", "outside_prob")
CONFIG_KEYS = {
    "problem", "strategy", "candidates", "reduction", "runs", "seed", "bounds_mode",
    "max_attempts", "k1", "k2", "out", "budget", "oracle_budget", "table", *STRATEGY_KEYS,
}


class CLIUsageError(UsageError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIUsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="ci-opt", description="Cohort Intelligence experiments")
    parser.add_argument("--config", help="YAML file of flag values; flags given here win")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run seeded CI batches for one problem and strategy")
    p.add_argument("--problem", choices=PROBLEM_NAMES)
    p.add_argument("--strategy", choices=STRATEGY_KINDS)
    p.add_argument("--candidates", type=int)
    p.add_argument("--reduction", type=float)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bounds-mode", choices=BOUNDS_CHOICES)
    p.add_argument("--max-attempts", type=int)
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--out")
    p.add_argument("--oracle-budget", type=int, help="oracle samples for the summary; 0 skips it")

    p = sub.add_parser("oracle", help="brute-force reference optimum of one problem")
    p.add_argument("--problem", choices=PROBLEM_NAMES)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bounds-mode", choices=BOUNDS_CHOICES)

    p = sub.add_parser("reproduce", help="rerun the batches behind a published table")
    p.add_argument("--table", type=int, choices=sorted(TABLES))
    p.add_argument("--out")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)

    sub.add_parser("list", help="list problems and their default strategy bounds")
    return parser


def load_config(path):
    """Flat key/value overrides from a YAML file; keys mirror the CLI flags."""
    try:
        with open(path, encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise CLIUsageError(f"config {path}: parse error{where}: {exc}") from None
    except OSError as exc:
        raise CLIUsageError(f"config {path}: {exc.strerror}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CLIUsageError(f"config {path}: expected key/value pairs")
    out = {}
    for key, value in data.items():
        name = str(key).replace("-", "_")
        if name not in CONFIG_KEYS:
            raise CLIUsageError(f"config {path}: unknown key {key!r}")
        out[name] = value
    return out


def resolve(args):
    """Merge built-in defaults, config file values and flags, in that order."""
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(load_config(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "verb"):
            settings[key] = value
    return settings


def _require(settings, *keys):
    for key in keys:
        if settings.get(key) is None:
            raise CLIUsageError(f"missing required option --{key.replace('_', '-')}")


def _mode(settings):
    mode = str(settings["bounds_mode"]).replace("_", "-")
    if mode not in BOUNDS_CHOICES:
        raise CLIUsageError(f"unknown bounds mode {settings['bounds_mode']!r}")
    return mode.replace("-", "_")


def _reference_table(problem, strategy):
    if problem in PROBLEM_TABLES:
        return PROBLEM_TABLES[problem]
    return 6 if strategy == "tanh" else 7


def cmd_run(settings, out):
    from .engine import CohortConfig

    _require(settings, "problem", "strategy")
    mode = _mode(settings)
    problem = get_problem(settings["problem"], mode)
    config = CohortConfig.for_problem(
        problem,
        candidates=settings["candidates"],
        reduction=settings["reduction"],
        max_attempts=settings["max_attempts"],
    )
    overrides = {k: settings[k] for k in ("k1", "k2", *STRATEGY_KEYS) if settings.get(k) is not None}
    plan = ExperimentPlan(settings["problem"], settings["strategy"], mode, runs=settings["runs"],
                          base_seed=settings["seed"], config=config, strategy_overrides=overrides)
    plan.build_strategy(problem)
    results = run_batch(plan)
    stats = summarize(results, problem.sense)

    out_dir = Path(settings["out"])
    write_results_csv(results, out_dir / "results.csv")
    ok = [r for r in results if r.error is None]
    best_run = next(r for r in ok if r.seed == stats.best_seed)
    write_trace_csv(best_run.trace, out_dir / "trace.csv")
    for r in ok:
        write_trace_csv(r.trace, out_dir / "traces" / f"trace_seed{r.seed}.csv")

    budget = int(settings["oracle_budget"])
    infeasible = False
    if budget > 0:
        oracle = oracle_search(problem, budget, seed=0)
        infeasible = not oracle.feasible
        table = _reference_table(problem.name, plan.strategy)
        ref = reference_for(load_reference_values(), table, problem.name, plan.strategy)
        row = reconcile(problem.name, plan.strategy, stats, oracle, ref)
        write_summary_csv([row], out_dir / "summary.csv")

    sign = "max" if problem.maximize else "min"
    print(f"{problem.name} {plan.strategy} ({mode}, {sign}): best {stats.best:.10g} "
          f"violation {stats.best_violation:.3g} mean {stats.mean:.6g} sd {stats.sd:.4g} "
          f"attempts {stats.mean_attempts:.0f} feasible runs {stats.feasible_run_count}/{stats.runs}",
          file=out)
    if stats.failed_run_count:
        print(f"{stats.failed_run_count} run(s) failed; see results.csv", file=out)
    print(f"wrote {out_dir}", file=out)
    return EXIT_INFEASIBLE if infeasible else EXIT_OK


def cmd_oracle(settings, out):
    _require(settings, "problem")
    problem = get_problem(settings["problem"], _mode(settings))
    result = oracle_search(problem, int(settings["budget"]), seed=settings["seed"])
    x = np.array2string(result.best_x, precision=10, separator=", ")
    g = np.array2string(result.best_constraints, precision=6, separator=", ")
    status = "feasible" if result.feasible else f"infeasible (min violation {result.min_violation:.6g})"
    print(f"{problem.name}: {status}", file=out)
    print(f"best objective {result.best_objective:.10g} at x = {x}", file=out)
    print(f"constraints {g}; samples {result.samples_used}", file=out)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_reproduce(settings, out):
    _require(settings, "table")
    report = reproduce_table(int(settings["table"]), runs=settings["runs"], base_seed=settings["seed"])
    out_dir = Path(settings["out"])
    write_summary_csv(report.rows, out_dir / "summary.csv")
    text = comparison_text(report)
    write_text(text, out_dir / f"table{report.table}.txt")
    out.write(text)
    return EXIT_INFEASIBLE if report.infeasible_model else EXIT_OK


def cmd_list(settings, out):
    for name in PROBLEM_NAMES:
        p = get_problem(name)
        bounds = ", ".join(f"{v}=[{lo:g}, {hi:g}]" for v, lo, hi in zip(p.variables, p.lower, p.upper))
        print(f"{name:9s} {p.sense:8s} d={p.dimension} m={p.constraint_count} "
              f"k1={p.default_k1:g} k2={p.default_k2:g}  {p.description}", file=out)
        print(f"{'':9s} {bounds}", file=out)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "oracle": cmd_oracle, "reproduce": cmd_reproduce, "list": cmd_list}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        settings = resolve(args)
        return COMMANDS[args.verb](settings, out)
    except (UsageError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        target = exc.filename or ""
        print(f"error: I/O failure {target}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_FAILURE
    except CIOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
