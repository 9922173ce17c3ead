"""Command-line interface: ingest, summarize, filter, sampling
diagnostics, optimization, importance experiments, synthetic data, and
serving the HTTP API.

Numbers in tables use the same 12-significant-digit convention as the
service wire format, so CSV output matches service JSON values byte for
byte after format conversion.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .dataset import Dataset, DatasetError, load_csv
from .filtering import FilterState, aggregate_summary, explorer_summaries
from .importance import recovery_experiment
from .provenance import ProvenanceLog
from .sampling import (
    DEFAULT_LADDER,
    DEFAULT_THRESHOLD,
    FULL_DATA_THRESHOLD,
    choose_sample_size,
    sample_diagnostics,
)
from .search import (
    DEFAULT_ALPHA,
    DEFAULT_SPACE_CAP,
    OBJECTIVES,
    ConfigTable,
    exhaustive_best,
    random_search,
    simulated_annealing,
)
from .stats import DEFAULT_CUTS
from .synthetic import generate_synthetic, parse_spec_text
from .wire import wire_real


def _fmt(value) -> str:
    """One table cell: ints plain, reals at 12 significant digits in
    JSON notation, missing values empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return json.dumps(wire_real(value))
    return str(value)


def _emit_table(headers: list[str], rows: list[list], fmt: str) -> None:
    cells = [[_fmt(v) for v in row] for row in rows]
    if fmt == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(headers)
        writer.writerows(cells)
        return
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


def _parse_floats(text: str, what: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise DatasetError(f"{what} must be a comma-separated list of numbers") from None


def _load(args) -> Dataset:
    path = Path(args.csv)
    if not path.exists():
        raise DatasetError(f"no such file: {path}")
    return load_csv(path.read_bytes(), args.target)


def _cut_headers(cuts: tuple[float, ...]) -> list[str]:
    return [f"p{q:g}" for q in cuts]


def _level_rows(summaries) -> list[list]:
    rows = []
    for s in summaries:
        row = [s.parameter, s.level, s.stats.count, s.stats.min]
        row.extend(s.stats.percentile_values if s.stats.count else [None] * len(s.stats.percentile_cuts))
        row.extend([s.stats.mean, s.stats.max, s.stats.range])
        rows.append(row)
    return rows


def _level_headers(cuts: tuple[float, ...]) -> list[str]:
    return ["parameter", "level", "count", "min", *_cut_headers(cuts), "mean", "max", "range"]


def cmd_summarize(args) -> int:
    dataset = _load(args)
    cuts = _parse_floats(args.cuts, "--cuts")
    summaries = explorer_summaries(
        dataset, FilterState.fresh(dataset), cuts=cuts, grid_points=None
    )
    _emit_table(_level_headers(cuts), _level_rows(summaries), args.format)
    return 0


def parse_filter_expression(dataset: Dataset, expression: str) -> list[FilterState]:
    """Each `;`-separated clause produces one successive filter state.

    Clause grammar: `param=level[,level...]` replaces the parameter's
    selection; `!param` disables the parameter.
    """
    states = [FilterState.fresh(dataset)]
    for clause in expression.split(";"):
        clause = clause.strip()
        if not clause:
            continue
        current = states[-1]
        if clause.startswith("!"):
            name = clause[1:].strip()
            dataset.parameter(name)
            states.append(current.with_enabled(name, False))
            continue
        if "=" not in clause:
            raise DatasetError(
                f"bad filter clause {clause!r}: expected param=level[,level...] or !param"
            )
        name, _, levels_text = clause.partition("=")
        name = name.strip()
        schema = dataset.parameter(name)
        levels = [v.strip() for v in levels_text.split(",")]
        for level in levels:
            if level not in schema.levels:
                raise DatasetError(f"unknown level {level!r} for parameter {name!r}")
        states.append(current.with_selection(name, levels))
    return states


def cmd_filter(args) -> int:
    dataset = _load(args)
    cuts = _parse_floats(args.cuts, "--cuts")
    states = parse_filter_expression(dataset, args.expression)

    aggregates = [
        aggregate_summary(dataset, state, cuts=cuts, grid_points=None)
        for state in states
    ]
    log = ProvenanceLog(states[0], aggregates[0].stats.min, aggregates[0].stats.max)
    for state, agg in zip(states[1:], aggregates[1:]):
        log.push(state, agg.stats.min, agg.stats.max)

    final_state, final_agg = states[-1], aggregates[-1]
    if args.table == "levels":
        summaries = explorer_summaries(dataset, final_state, cuts=cuts, grid_points=None)
        _emit_table(_level_headers(cuts), _level_rows(summaries), args.format)
    elif args.table == "aggregate":
        row = [final_agg.matched_rows, final_agg.stats.min]
        row.extend(
            final_agg.stats.percentile_values
            if final_agg.matched_rows
            else [None] * len(cuts)
        )
        row.extend([final_agg.stats.mean, final_agg.stats.max, final_agg.stats.range])
        _emit_table(
            ["matched_rows", "min", *_cut_headers(cuts), "mean", "max", "range"],
            [row],
            args.format,
        )
    else:
        _emit_table(
            ["stage", "label", "min", "max"],
            [[e.stage, e.label, e.min, e.max] for e in log.entries],
            args.format,
        )
    return 0


def cmd_sample_plan(args) -> int:
    dataset = _load(args)
    ladder = _parse_floats(args.ladder, "--ladder")
    plan = choose_sample_size(dataset, ladder, args.threshold, args.seed)
    if dataset.row_count >= FULL_DATA_THRESHOLD:
        rows = []
        for fraction, ks in sample_diagnostics(dataset, ladder, args.seed):
            chosen = plan.fraction == fraction and ks.p_value >= args.threshold
            rows.append(
                [fraction, round(fraction * dataset.row_count), ks.statistic, ks.p_value, "*" if chosen else ""]
            )
        _emit_table(["fraction", "rows", "ks_d", "p_value", "chosen"], rows, args.format)
    print(f"chosen: fraction {_fmt(plan.fraction)} ({plan.reason.value})")
    return 0


def _print_configuration(config: dict[str, str]) -> None:
    for name, level in config.items():
        print(f"  {name} = {level}")


def _write_trace_csv(trace, dataset: Dataset, path: str) -> None:
    names = list(dataset.parameter_names)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["step", *names, "feasible", "value", "best_so_far"])
        for step in trace.steps:
            writer.writerow(
                [
                    step.step,
                    *[step.configuration[n] for n in names],
                    "true" if step.feasible else "false",
                    _fmt(step.value),
                    _fmt(step.best_value),
                ]
            )


def cmd_optimize(args) -> int:
    dataset = _load(args)
    if args.algorithm == "exhaustive":
        config, value = exhaustive_best(dataset, args.objective)
        print(f"algorithm: exhaustive  objective: {args.objective}")
        print(f"best value: {_fmt(value)}")
        print("best configuration:")
        _print_configuration(config)
        return 0

    if args.algorithm == "random":
        trace = random_search(dataset, args.objective, args.budget, args.seed)
    else:
        trace = simulated_annealing(
            dataset, args.objective, args.budget, args.seed, t0=args.t0, alpha=args.alpha
        )

    optimum = None
    if ConfigTable(dataset).space_size <= DEFAULT_SPACE_CAP:
        optimum = exhaustive_best(dataset, args.objective)[1]

    print(
        f"algorithm: {trace.algorithm}  objective: {trace.objective}  "
        f"budget: {trace.budget}  seed: {trace.seed}"
    )
    if optimum is not None:
        print(f"optimum (exhaustive): {_fmt(optimum)}")
    rows = []
    last_best = None
    for step in trace.steps:
        if step.best_value is not None and step.best_value != last_best:
            last_best = step.best_value
            marker = "*" if optimum is not None and step.best_value == optimum else ""
            rows.append([step.step, step.best_value, marker])
    _emit_table(["evaluations", "best_so_far", "optimal"], rows, args.format)
    print(f"best value: {_fmt(trace.best_value)}")
    if trace.best_configuration is not None:
        print("best configuration:")
        _print_configuration(trace.best_configuration)
    if args.trace_csv:
        _write_trace_csv(trace, dataset, args.trace_csv)
        print(f"trace written to {args.trace_csv}")
    return 0


def cmd_importance(args) -> int:
    dataset = _load(args)
    fractions = _parse_floats(args.fractions, "--fractions")
    report = recovery_experiment(dataset, fractions, repeats=args.repeats, seed=args.seed)
    print("scores (full data):")
    _emit_table(
        ["parameter", "score", "rank"],
        [
            [name, report.score_of(name), report.ranking.index(name) + 1]
            for name in report.parameters
        ],
        args.format,
    )
    print("recovery:")
    _emit_table(
        ["fraction", "top1", "top2", "top3"],
        [[p.fraction, p.top1, p.top2, p.top3] for p in report.recovery],
        args.format,
    )
    return 0


def cmd_synth(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.exists():
        raise DatasetError(f"no such file: {spec_path}")
    spec = parse_spec_text(spec_path.read_text())
    dataset, truth = generate_synthetic(spec, args.seed)

    out = Path(args.out)
    names = list(dataset.parameter_names)
    with open(out, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([*names, dataset.target_name])
        levels = {
            name: dataset.parameter(name).levels for name in names
        }
        codes = {name: dataset.codes[name] for name in names}
        for i in range(dataset.row_count):
            writer.writerow(
                [*[levels[n][codes[n][i]] for n in names], repr(float(dataset.target[i]))]
            )

    truth_path = Path(args.truth) if args.truth else out.with_suffix(".truth.json")
    truth_path.write_text(
        json.dumps(
            {
                "seed": args.seed,
                "best_config": truth.best_config,
                "best_value": truth.best_value,
                "importance_scores": list(truth.importance_scores),
                "importance_ranking": list(truth.importance_ranking),
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {dataset.row_count} rows to {out}; ground truth in {truth_path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    config = ServiceConfig(
        cuts=_parse_floats(args.cuts, "--cuts"),
        ladder=_parse_floats(args.ladder, "--ladder"),
        threshold=args.threshold,
        grid_points=args.grid_points,
        seed=args.seed,
        search_workers=args.workers,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port)
    return 0


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("csv", help="input CSV file")
    parser.add_argument("--target", required=True, help="name of the target column")


def _add_format_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("text", "csv"), default="text", help="table output format"
    )


_CUTS_TEXT = ",".join(f"{q:g}" for q in DEFAULT_CUTS)
_LADDER_TEXT = ",".join(f"{f:g}" for f in DEFAULT_LADDER)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tunescope",
        description="Explore, filter, and optimize categorical parameter spaces "
        "against one numeric target.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="per-level statistics table")
    _add_dataset_args(p)
    p.add_argument("--cuts", default=_CUTS_TEXT, help="percentile cuts")
    _add_format_arg(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("filter", help="apply a filter expression and summarize")
    _add_dataset_args(p)
    p.add_argument(
        "expression",
        help="clauses joined by ';': param=level[,level...] selects, !param disables",
    )
    p.add_argument("--cuts", default=_CUTS_TEXT, help="percentile cuts")
    p.add_argument(
        "--table",
        choices=("levels", "aggregate", "provenance"),
        default="levels",
        help="which table to print",
    )
    _add_format_arg(p)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("sample-plan", help="choose a sample size via the KS ladder")
    _add_dataset_args(p)
    p.add_argument("--ladder", default=_LADDER_TEXT, help="sample fraction ladder")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--seed", type=int, default=0)
    _add_format_arg(p)
    p.set_defaults(func=cmd_sample_plan)

    p = sub.add_parser("optimize", help="search for the best configuration")
    _add_dataset_args(p)
    p.add_argument(
        "--algorithm",
        choices=("exhaustive", "random", "simulated_annealing"),
        default="simulated_annealing",
    )
    p.add_argument("--objective", choices=OBJECTIVES, default="maximize_mean")
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t0", type=float, default=None, help="initial temperature")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="geometric decay")
    p.add_argument("--trace-csv", default=None, help="write full per-step trace CSV")
    _add_format_arg(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("importance", help="rank parameters and measure recovery")
    _add_dataset_args(p)
    p.add_argument("--fractions", default="0.001,0.002,0.004,0.01")
    p.add_argument("--repeats", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_format_arg(p)
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("spec", help="key/value spec file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--truth", default=None, help="ground-truth JSON path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cuts", default=_CUTS_TEXT)
    p.add_argument("--ladder", default=_LADDER_TEXT)
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--grid-points", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=4)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
