"""Command-line entry point.

Subcommands cover each pipeline stage plus evaluation: generate, check,
emit-nusmv, crosscheck, render, evaluate, report, sweep. Exit codes:
0 success, 1 domain errors (invalid config, schema violations, label
mismatches), 2 environment errors (missing NuSMV binary). Errors print to
stderr as ``error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dataset as ds
from . import evaluation as ev
from .checking import check, totalize
from .errors import DomainError, EnvironmentFailure
from .formulas import event_name, parse_formula
from .graphs import EventGraph
from .smv import STYLES, emit_smv, run_nusmv


def _parse_graph_argument(text: str) -> EventGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"--graph is not valid JSON: {exc}") from exc
    return ds.graph_from_json(data)


def _parse_values(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise DomainError(f"--values must be comma-separated integers: {exc}") from exc


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    elif text:
        print(text)


def _info(args: argparse.Namespace, message: str) -> None:
    if not args.quiet:
        print(message, file=sys.stderr)


def _endpoint_config(args: argparse.Namespace) -> ev.EndpointConfig:
    return ev.EndpointConfig(
        base_url=args.base_url,
        model_name=args.model,
        api_key=ev.api_key_from_env(args.api_key_env),
        temperature=args.temperature,
        timeout=args.timeout,
        max_concurrency=args.jobs,
    )


def _cmd_generate(args: argparse.Namespace) -> int:
    spec = ds.DatasetSpec(
        count=args.count,
        n=args.events,
        m=args.operators,
        master_seed=args.seed,
        edge_prob=args.edge_prob,
        balanced=args.balanced,
    )
    problems = ds.build_dataset(spec)
    ds.write_dataset(problems, args.out)
    n_true = sum(1 for p in problems if p.label)
    _emit(
        args,
        {"written": len(problems), "path": args.out, "true": n_true,
         "false": len(problems) - n_true},
        "",
    )
    _info(args, f"wrote {len(problems)} problems to {args.out} "
                f"({n_true} true / {len(problems) - n_true} false)")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    graph = _parse_graph_argument(args.graph)
    formula = parse_formula(args.formula, universe=range(1, graph.n + 1))
    result = check(totalize(graph), formula)
    if args.json:
        payload: dict = {"holds": result.holds}
        if result.counterexample is not None:
            payload["counterexample"] = {
                "stem": list(result.counterexample.stem),
                "loop": list(result.counterexample.loop),
            }
        print(json.dumps(payload))
        return 0
    print("true" if result.holds else "false")
    if result.counterexample is not None:
        stem = ",".join(event_name(s) for s in result.counterexample.stem)
        loop = ",".join(event_name(s) for s in result.counterexample.loop)
        print(f"counterexample: stem={stem} loop={loop}")
    return 0


def _cmd_emit_nusmv(args: argparse.Namespace) -> int:
    graph = _parse_graph_argument(args.graph)
    formula = parse_formula(args.formula, universe=range(1, graph.n + 1))
    document = emit_smv(graph, formula, style=args.nusmv_style)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(document.text)
        _emit(args, {"path": args.out, "style": document.style}, "")
        _info(args, f"wrote SMV model to {args.out}")
    else:
        _emit(args, {"text": document.text, "style": document.style},
              document.text.rstrip("\n"))
    return 0


def _cmd_crosscheck(args: argparse.Namespace) -> int:
    problems = ds.read_dataset(args.dataset)
    if args.limit is not None:
        problems = problems[: args.limit]
    disagreements = []
    for problem in problems:
        formula = parse_formula(problem.formula, universe=range(1, problem.n + 1))
        document = emit_smv(problem.graph, formula, style=args.nusmv_style)
        verdict = run_nusmv(document, args.nusmv_path)
        if verdict != problem.label:
            disagreements.append(problem.id)
    payload = {
        "checked": len(problems),
        "agreements": len(problems) - len(disagreements),
        "disagreements": disagreements,
        "style": args.nusmv_style,
    }
    _emit(args, payload,
          f"checked {len(problems)} records: "
          f"{len(problems) - len(disagreements)} agree, "
          f"{len(disagreements)} disagree")
    if disagreements:
        _info(args, f"label mismatches: {', '.join(disagreements)}")
        return 1
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    from .render import render_problem

    graph = _parse_graph_argument(args.graph)
    formula = parse_formula(args.formula, universe=range(1, graph.n + 1))
    rendered = render_problem(graph, formula)
    _emit(
        args,
        {"context": rendered.context, "hypothesis": rendered.hypothesis,
         "prompt": rendered.prompt},
        rendered.prompt,
    )
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    problems = ds.read_dataset(args.dataset)
    cfg = _endpoint_config(args)
    records = ev.evaluate_dataset(problems, cfg)
    ev.write_records(records, args.out)
    metrics = ev.compute_metrics(records)
    _emit(
        args,
        {"records": len(records), "path": args.out,
         "accuracy": metrics.accuracy, "f1": metrics.f1, "auc": metrics.auc,
         "invalid": metrics.n_invalid},
        ev.format_report(metrics, args.model),
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    records = ev.read_records(args.results)
    metrics = ev.compute_metrics(records)
    _emit(
        args,
        {"model": args.model, "accuracy": metrics.accuracy, "f1": metrics.f1,
         "auc": metrics.auc, "n_total": metrics.n_total,
         "n_invalid": metrics.n_invalid,
         "confusion": {"tp": metrics.tp, "fp": metrics.fp,
                       "fn": metrics.fn, "tn": metrics.tn}},
        ev.format_report(metrics, args.model),
    )
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    values = _parse_values(args.values) if args.values else list(
        ev.OPERATOR_SWEEP_VALUES if args.axis == "operators" else ev.EVENT_SWEEP_VALUES
    )
    cfg = _endpoint_config(args)
    cells = ev.run_sweep(
        axis=args.axis,
        fixed_value=args.fixed,
        values=values,
        per_cell_count=args.count,
        cfg=cfg,
        seed=args.seed,
        edge_prob=args.edge_prob,
    )
    csv_text = ev.sweep_to_csv(cells)
    with open(args.out_csv, "w", encoding="utf-8") as handle:
        handle.write(csv_text)
    payload = {
        "axis": args.axis,
        "cells": [
            {"value": cell.value, "n": cell.n, "m": cell.m,
             "accuracy": cell.metrics.accuracy, "f1": cell.metrics.f1,
             "auc": cell.metrics.auc}
            for cell in cells
        ],
        "csv": args.out_csv,
    }
    _emit(args, payload, csv_text.rstrip("\n"))
    _info(args, f"wrote sweep curve data to {args.out_csv}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="machine-readable JSON output on stdout")
    common.add_argument("--quiet", action="store_true",
                        help="suppress informational stderr output")

    endpoint = argparse.ArgumentParser(add_help=False)
    endpoint.add_argument("--base-url", required=True,
                          help="endpoint base URL (POST <base-url>/chat/completions)")
    endpoint.add_argument("--model", required=True, help="model name sent per request")
    endpoint.add_argument("--api-key-env", default="OPENAI_API_KEY",
                          help="env var holding the API key (default: %(default)s)")
    endpoint.add_argument("--temperature", type=float, default=0.0,
                          help="sampling temperature (default: %(default)s)")
    endpoint.add_argument("--timeout", type=float, default=60.0,
                          help="per-request timeout in seconds (default: %(default)s)")
    endpoint.add_argument("--jobs", type=int, default=4,
                          help="max in-flight requests (default: %(default)s)")

    parser = argparse.ArgumentParser(
        prog="ltlsmith",
        description="Generate, label, and evaluate temporal-reasoning problems "
                    "built from random event graphs and temporal-logic formulas.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="build a labeled benchmark JSONL file")
    p.add_argument("--events", type=int, required=True, help="number of events n")
    p.add_argument("--operators", type=int, required=True,
                   help="formula operator count m")
    p.add_argument("--count", type=int, required=True, help="number of problems")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--edge-prob", type=float, default=0.5,
                   help="edge inclusion probability (default: %(default)s)")
    p.add_argument("--balanced", action="store_true",
                   help="rejection-sample to exactly half true / half false labels")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("check", parents=[common],
                       help="decide whether a formula holds on all paths of a graph")
    p.add_argument("--formula", required=True, help="formula in canonical syntax")
    p.add_argument("--graph", required=True,
                   help='graph JSON, e.g. \'{"n":3,"initial":3,"edges":[[1,2]]}\'')
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("emit-nusmv", parents=[common],
                       help="emit the SMV model for a graph and formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--nusmv-style", choices=STYLES, default="sets",
                   help="transition encoding (default: %(default)s)")
    p.add_argument("--out", help="write to file instead of stdout")
    p.set_defaults(func=_cmd_emit_nusmv)

    p = sub.add_parser("crosscheck", parents=[common],
                       help="validate stored labels against an installed NuSMV")
    p.add_argument("--dataset", required=True, help="dataset JSONL path")
    p.add_argument("--nusmv-path", required=True, help="NuSMV executable")
    p.add_argument("--nusmv-style", choices=STYLES, default="sets")
    p.add_argument("--limit", type=int, help="only check the first N records")
    p.set_defaults(func=_cmd_crosscheck)

    p = sub.add_parser("render", parents=[common],
                       help="render the natural-language prompt for a graph and formula")
    p.add_argument("--formula", required=True)
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("evaluate", parents=[common, endpoint],
                       help="query an endpoint on every problem and write records")
    p.add_argument("--dataset", required=True, help="dataset JSONL path")
    p.add_argument("--out", required=True, help="results JSONL path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("report", parents=[common],
                       help="score a results file and print the metrics table")
    p.add_argument("--results", required=True, help="results JSONL path")
    p.add_argument("--model", default="model", help="row label for the table")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("sweep", parents=[common, endpoint],
                       help="run a complexity sweep and emit plot-ready CSV")
    p.add_argument("--axis", choices=("operators", "events"), required=True)
    p.add_argument("--fixed", type=int, required=True,
                   help="value of the non-swept knob")
    p.add_argument("--values", help="comma-separated axis values "
                                    "(default: the standard grid for the axis)")
    p.add_argument("--count", type=int, default=ev.SWEEP_CELL_COUNT,
                   help="problems per cell (default: %(default)s)")
    p.add_argument("--seed", type=int, required=True, help="sweep master seed")
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--out-csv", required=True, help="CSV output path")
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 1
    except EnvironmentFailure as exc:
        print(f"error: {exc.kind}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
