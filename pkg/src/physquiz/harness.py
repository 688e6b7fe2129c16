"""Per-stage evaluation over a concept corpus.

For every record in a snapshot the harness probes six stages in the
production order (identifier semantics, unit retrieval, formula
translation, rearrangement, value substitution, explanation rendering)
and sorts each concept into buckets by whether it yielded a full
question and whether answering with the known solution grades correct.
Failures land in the report as data, never as exceptions, so one broken
record cannot hide the rest of the corpus.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction

from .expr_core import Identifier, evaluate
from .grader import grade
from .knowledge import ConceptRecord, missing_identifiers
from .latex_frontend import TranslationError, translate
from .pipeline import PipelineError, QuizQuestion, generate_question, render_explanation
from .solver import NotQuizzable, SolverError, rearrange_all

HARNESS_SEED = 0

STAGE_COLUMNS = (
    "identifier_semantics_ok",
    "unit_retrieval_ok",
    "translation_ok",
    "rearrangement_ok",
    "substitution_ok",
    "explanation_ok",
)

BUCKET_BOTH = "question_and_correction"
BUCKET_ONLY_QUESTION = "only_question"
BUCKET_NONE = "none"


@dataclass(frozen=True)
class StageFlags:
    qid: str
    label: str
    identifier_semantics_ok: bool
    unit_retrieval_ok: bool
    translation_ok: bool
    rearrangement_ok: bool
    substitution_ok: bool
    explanation_ok: bool
    bucket: str
    failure_reasons: tuple[str, ...]

    def stage(self, column: str) -> bool:
        return getattr(self, column)


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[StageFlags, ...]
    aggregates: dict[str, str | None]
    buckets: dict[str, int]


def _semantics_ok(record: ConceptRecord, reasons: list[str]) -> bool:
    if not record.identifiers:
        reasons.append("identifier_semantics: record lists no identifiers")
        return False
    unnamed = [str(i.symbol) for i in record.identifiers if not i.name.strip()]
    if unnamed:
        reasons.append(f"identifier_semantics: unnamed symbols {unnamed}")
        return False
    missing = missing_identifiers(record)
    if missing:
        names = ", ".join(str(s) for s in missing)
        reasons.append(f"identifier_semantics: no entry for {names}")
        return False
    return True


def _unit_ok(record: ConceptRecord, reasons: list[str]) -> bool:
    if record.formula_dimension is not None:
        return True
    if record.identifiers and all(i.dimension is not None for i in record.identifiers):
        return True
    bare = [str(i.symbol) for i in record.identifiers if i.dimension is None]
    reasons.append(
        f"unit_retrieval: no formula dimension and no dimension for {bare or 'any symbol'}"
    )
    return False


def _self_grade_ok(question: QuizQuestion) -> bool:
    report = grade(
        str(question.solution_value),
        question.solution_unit.text,
        question.solution_value,
        question.solution_unit.dimension,
    )
    return report.correct


def _explanation_ok(question: QuizQuestion, reasons: list[str]) -> bool:
    try:
        explanation = render_explanation(question)
    except Exception as err:  # a rendering crash is a finding, not a halt
        reasons.append(f"explanation: {err}")
        return False
    if not explanation.final_value or len(explanation.steps) != 3:
        reasons.append("explanation: incomplete rendering")
        return False
    values = {sym: Fraction(av.value) for sym, av in question.assignment.items()}
    result = evaluate(question.rearranged.rhs, values)
    if result.value != question.solution_value:
        reasons.append("explanation: substituted step disagrees with the solution")
        return False
    return True


def evaluate_record(record: ConceptRecord, seed: int = HARNESS_SEED) -> StageFlags:
    reasons: list[str] = []
    semantics = _semantics_ok(record, reasons)
    unit = _unit_ok(record, reasons)

    translation = False
    rearrangement = False
    equation = None
    try:
        equation, _ = translate(
            record.defining_formula_latex, heuristic_derivatives=True
        )
        translation = True
    except TranslationError as err:
        reasons.append(f"translation: {err}")

    if translation:
        try:
            rset = rearrange_all(equation)
            rearrangement = bool(rset.solved_for)
            if not rearrangement:
                reasons.append("rearrangement: every target was skipped")
        except NotQuizzable as err:
            reasons.append(f"rearrangement: {err.verdict.reason.value}")
        except SolverError as err:
            reasons.append(f"rearrangement: {err}")

    substitution = False
    question = None
    if rearrangement:
        target = (
            equation.lhs.symbol if isinstance(equation.lhs, Identifier) else None
        )
        try:
            question = generate_question(record, target=target, seed=seed)
            substitution = True
        except (PipelineError, SolverError, TranslationError, ValueError) as err:
            reasons.append(f"substitution: {err}")

    explanation = False
    if substitution and question is not None:
        explanation = _explanation_ok(question, reasons)

    correction = substitution and question is not None and _self_grade_ok(question)
    if substitution and not correction:
        reasons.append("correction: grading the known solution failed")
    if substitution:
        bucket = BUCKET_BOTH if correction else BUCKET_ONLY_QUESTION
    else:
        bucket = BUCKET_NONE

    return StageFlags(
        qid=record.qid,
        label=record.label,
        identifier_semantics_ok=semantics,
        unit_retrieval_ok=unit,
        translation_ok=translation,
        rearrangement_ok=rearrangement,
        substitution_ok=substitution,
        explanation_ok=explanation,
        bucket=bucket,
        failure_reasons=tuple(reasons),
    )


def _percent(count: int, total: int) -> str:
    pct = 100.0 * count / total
    if pct == int(pct):
        return f"{int(pct)}% yes"
    return f"{pct:.1f}% yes"


def evaluate_corpus(
    records: list[ConceptRecord], seed: int = HARNESS_SEED
) -> EvalReport:
    rows = tuple(evaluate_record(record, seed=seed) for record in records)
    total = len(rows)
    aggregates: dict[str, str | None] = {}
    for column in STAGE_COLUMNS:
        if total == 0:
            aggregates[column] = None
        else:
            aggregates[column] = _percent(
                sum(1 for r in rows if r.stage(column)), total
            )
    buckets = {
        BUCKET_BOTH: sum(1 for r in rows if r.bucket == BUCKET_BOTH),
        BUCKET_ONLY_QUESTION: sum(1 for r in rows if r.bucket == BUCKET_ONLY_QUESTION),
        BUCKET_NONE: sum(1 for r in rows if r.bucket == BUCKET_NONE),
    }
    buckets["question_or_correction"] = (
        buckets[BUCKET_BOTH] + buckets[BUCKET_ONLY_QUESTION]
    )
    return EvalReport(rows=rows, aggregates=aggregates, buckets=buckets)


def report_to_dict(report: EvalReport) -> dict:
    return {
        "schema_version": 1,
        "rows": [
            {
                "qid": r.qid,
                "label": r.label,
                **{column: r.stage(column) for column in STAGE_COLUMNS},
                "bucket": r.bucket,
                "failure_reasons": list(r.failure_reasons),
            }
            for r in report.rows
        ],
        "aggregates": dict(report.aggregates),
        "buckets": dict(report.buckets),
    }


def report_to_json(report: EvalReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)


def report_to_csv(report: EvalReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["qid", "label", *STAGE_COLUMNS, "bucket", "failure_reasons"])
    for r in report.rows:
        writer.writerow(
            [
                r.qid,
                r.label,
                *(("yes" if r.stage(c) else "no") for c in STAGE_COLUMNS),
                r.bucket,
                "; ".join(r.failure_reasons),
            ]
        )
    return out.getvalue()


_SHORT_HEADERS = {
    "identifier_semantics_ok": "semantics",
    "unit_retrieval_ok": "units",
    "translation_ok": "translation",
    "rearrangement_ok": "rearrange",
    "substitution_ok": "substitute",
    "explanation_ok": "explanation",
}


def format_table(report: EvalReport) -> str:
    headers = ["concept", *_SHORT_HEADERS.values(), "bucket"]
    body = [
        [
            f"{r.label} ({r.qid})",
            *(("yes" if r.stage(c) else "NO") for c in STAGE_COLUMNS),
            r.bucket,
        ]
        for r in report.rows
    ]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in body)) if body else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(c.ljust(widths[i]) for i, c in enumerate(row)) for row in body]
    lines.append("")
    for column in STAGE_COLUMNS:
        value = report.aggregates[column] or "n/a (no concepts)"
        lines.append(f"{_SHORT_HEADERS[column]}: {value}")
    lines.append("")
    total = len(report.rows)
    for bucket in (BUCKET_BOTH, BUCKET_ONLY_QUESTION, BUCKET_NONE):
        count = report.buckets[bucket]
        share = _percent(count, total).removesuffix(" yes") if total else "n/a"
        lines.append(f"{bucket}: {count} ({share})")
    return "\n".join(lines)
