"""Command-line client over the same engine the HTTP service uses.

Exit codes: 0 success, 2 usage or configuration error, 3 concept not
found, 4 formula not quizzable (or question generation impossible),
5 upstream knowledge base unavailable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_settings
from .dimensions import UnitError, parse_unit_answer, to_isq_string
from .grader import ValueParseError, grade, parse_value
from .harness import evaluate_corpus, format_table, report_to_csv, report_to_json
from .knowledge import (
    ConceptNotFound,
    NetworkError,
    StoreError,
    record_to_dict,
    snapshot_fixture,
)
from .latex_frontend import TranslationError
from .pipeline import (
    PipelineError,
    format_value,
    format_value_with_unit,
    generate_question,
    render_explanation,
)
from .service import build_store
from .solver import NotQuizzable

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_NON_QUIZZABLE = 4
EXIT_UPSTREAM = 5


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a JSON settings file")
    common.add_argument(
        "--fixture", help="snapshot path, or 'bundled' for the packaged corpus"
    )
    common.add_argument(
        "--store", choices=("fixture", "live"), help="knowledge store backend"
    )
    common.add_argument("--seed", type=int, help="random seed for reproducible runs")
    common.add_argument(
        "--range",
        nargs=2,
        type=int,
        metavar=("LO", "HI"),
        help="inclusive integer range for drawn values",
    )
    common.add_argument("--json", action="store_true", help="machine-readable output")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog="physquiz",
        description="Generate, grade, and evaluate physics quiz questions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_generate = sub.add_parser(
        "generate", parents=[common], help="generate a question for a concept"
    )
    p_generate.add_argument("--concept", required=True, help="concept label or item id")
    p_generate.add_argument("--target", help="identifier to solve for")
    p_generate.add_argument(
        "--show-solution", action="store_true", help="print solution and explanation"
    )
    p_generate.add_argument("--template", help="path to a question template file")

    p_grade = sub.add_parser(
        "grade", parents=[common], help="grade a value/unit answer pair"
    )
    p_grade.add_argument("--value", required=True, help="student value answer")
    p_grade.add_argument("--unit", required=True, help="student unit answer")
    p_grade.add_argument("--solution-value", required=True, help="reference value")
    p_grade.add_argument("--solution-unit", required=True, help="reference unit")
    p_grade.add_argument("--tolerance", help="relative tolerance, default 1/100")

    p_lookup = sub.add_parser(
        "lookup", parents=[common], help="show a stored concept record"
    )
    p_lookup.add_argument("query", help="concept label or item id")

    p_snapshot = sub.add_parser(
        "snapshot", parents=[common], help="write a snapshot file from the store"
    )
    p_snapshot.add_argument("--out", required=True, help="output snapshot path")
    p_snapshot.add_argument(
        "--concepts",
        help="comma-separated labels or ids to include (default: every record)",
    )

    p_eval = sub.add_parser(
        "eval", parents=[common], help="run the per-stage corpus evaluation"
    )
    p_eval.add_argument("--csv", action="store_true", help="CSV output")
    p_eval.add_argument("--out", help="write the report to a file instead of stdout")

    p_serve = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p_serve.add_argument("--host", help="bind address")
    p_serve.add_argument("--port", type=int, help="bind port")

    return parser


def _settings_from_args(args: argparse.Namespace):
    cli: dict = {}
    for name in ("fixture", "store"):
        value = getattr(args, name, None)
        if value is not None:
            cli[name] = value
    if getattr(args, "range", None) is not None:
        cli["range_lo"], cli["range_hi"] = args.range
    if getattr(args, "tolerance", None) is not None:
        cli["tolerance"] = args.tolerance
    if getattr(args, "host", None) is not None:
        cli["host"] = args.host
    if getattr(args, "port", None) is not None:
        cli["port"] = args.port
    return load_settings(cli=cli, config_path=getattr(args, "config", None))


def _fail(message: str, code: int) -> int:
    print(message, file=sys.stderr)
    return code


def _cmd_generate(args, settings, store) -> int:
    template = None
    if args.template:
        template = Path(args.template).read_text(encoding="utf-8").strip()
    record = store.lookup(args.concept)
    question = generate_question(
        record,
        target=args.target,
        value_range=settings.value_range,
        seed=args.seed,
        template=template,
        heuristic_derivatives=settings.heuristic_derivatives,
    )
    value_text = format_value(question.solution_value, question.solution_approximate)
    if args.json:
        payload = {
            "concept_qid": question.concept_qid,
            "concept_label": question.concept_label,
            "target_symbol": str(question.target.symbol),
            "target_name": question.target.name,
            "question_text": question.question_text,
            "seed": question.seed,
        }
        if args.show_solution:
            explanation = render_explanation(question)
            payload["solution"] = {
                "value": str(question.solution_value),
                "value_text": value_text,
                "approximate": question.solution_approximate,
                "unit": question.solution_unit.text,
            }
            payload["explanation"] = {
                "reference": explanation.reference,
                "steps": [{"label": l, "text": t} for l, t in explanation.steps],
            }
        print(json.dumps(payload, indent=2))
        return EXIT_OK
    print(question.question_text)
    if args.show_solution:
        explanation = render_explanation(question)
        print()
        print(
            "Solution:",
            format_value_with_unit(value_text, question.solution_unit),
        )
        for label, text in explanation.steps:
            print(f"  {label}: {text}")
    return EXIT_OK


def _cmd_grade(args) -> int:
    try:
        solution_value = parse_value(args.solution_value)
        solution_unit = parse_unit_answer(args.solution_unit)
        tolerance = args.tolerance if args.tolerance is not None else "1/100"
        report = grade(
            args.value, args.unit, solution_value, solution_unit, tolerance
        )
    except (ValueParseError, UnitError, ValueError, ZeroDivisionError) as err:
        return _fail(f"error: {err}", EXIT_USAGE)
    if args.json:
        print(
            json.dumps(
                {
                    "value_correct": report.value_correct,
                    "unit_correct": report.unit_correct,
                    "messages": list(report.messages),
                    "relative_error": report.relative_error,
                },
                indent=2,
            )
        )
        return EXIT_OK
    print("value:", "correct" if report.value_correct else "incorrect")
    print("unit:", "correct" if report.unit_correct else "incorrect")
    for message in report.messages:
        print(message)
    return EXIT_OK


def _cmd_lookup(args, store) -> int:
    record = store.lookup(args.query)
    if args.json:
        print(json.dumps(record_to_dict(record), indent=2))
        return EXIT_OK
    print(f"{record.label} ({record.qid})")
    print(f"  formula: {record.defining_formula_latex}")
    dim = record.formula_dimension
    print(f"  dimension: {to_isq_string(dim) if dim is not None else 'unknown'}")
    for info in record.identifiers:
        idim = to_isq_string(info.dimension) if info.dimension else "unknown"
        print(f"  {info.symbol}: {info.name} [{idim}]")
    return EXIT_OK


def _cmd_snapshot(args, store) -> int:
    if args.concepts:
        records = [store.lookup(term.strip()) for term in args.concepts.split(",")]
    else:
        records = list(store.records)
    snapshot_fixture(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_eval(args, store) -> int:
    seed = args.seed if args.seed is not None else 0
    report = evaluate_corpus(list(store.records), seed=seed)
    if args.json:
        text = report_to_json(report)
    elif args.csv:
        text = report_to_csv(report)
    else:
        text = format_table(report)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote report to {args.out}")
    else:
        print(text)
    return EXIT_OK


def _cmd_serve(args, settings) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _settings_from_args(args)
    except ConfigError as err:
        return _fail(f"error: {err}", EXIT_USAGE)

    if args.command == "grade":
        return _cmd_grade(args)
    if args.command == "serve":
        return _cmd_serve(args, settings)

    try:
        store = build_store(settings)
        if args.command == "generate":
            return _cmd_generate(args, settings, store)
        if args.command == "lookup":
            return _cmd_lookup(args, store)
        if args.command == "snapshot":
            return _cmd_snapshot(args, store)
        if args.command == "eval":
            return _cmd_eval(args, store)
    except ConceptNotFound as err:
        return _fail(str(err), EXIT_NOT_FOUND)
    except NotQuizzable as err:
        return _fail(f"not quizzable: {err.verdict.reason.value}", EXIT_NON_QUIZZABLE)
    except (TranslationError, PipelineError) as err:
        return _fail(f"cannot generate a question: {err}", EXIT_NON_QUIZZABLE)
    except NetworkError as err:
        return _fail(f"knowledge base unreachable: {err}", EXIT_UPSTREAM)
    except StoreError as err:
        return _fail(f"store error: {err}", EXIT_UPSTREAM)
    except (OSError, ValueError) as err:
        return _fail(f"error: {err}", EXIT_USAGE)
    raise AssertionError(f"unhandled command {args.command}")


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
