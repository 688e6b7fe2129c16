"""Turn a concept record into a numeric quiz question.

The pipeline rearranges the defining formula for a target identifier,
draws integer values for every remaining identifier, evaluates the
rearranged right-hand side exactly, and renders a question sentence from
a template.  The solution (value, unit, and a worked explanation) stays
attached to the question object so graders and the service can reveal it
later without recomputing anything.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .dimensions import (
    DimensionVector,
    MissingIdentifierDimension,
    UnitString,
    infer_lhs_dimension,
    si_unit_string,
)
from .expr_core import (
    DivisionByZero,
    Equation,
    Identifier,
    NegativeRadicand,
    Symbol,
    evaluate,
    free_identifiers,
    render_equation,
    render_infix,
)
from .knowledge import ConceptRecord, IdentifierInfo, parse_symbol_text
from .latex_frontend import MultipleEqualitySigns, translate
from .solver import NotQuizzable, QuizReason, QuizzabilityVerdict, rearrange_all

DEFAULT_VALUE_RANGE = (1, 10)
MAX_REDRAWS = 100


class PipelineError(Exception):
    """Base class for question generation failures."""


class NoQuizzableRearrangement(PipelineError):
    """The formula offers no rearrangement for the requested target."""

    def __init__(self, message: str, verdict: QuizzabilityVerdict | None = None):
        super().__init__(message)
        self.verdict = verdict


class MissingIdentifierInfo(PipelineError):
    """A symbol in the formula has no entry in the concept record."""

    def __init__(self, symbol: Symbol):
        super().__init__(f"no identifier information stored for '{symbol}'")
        self.symbol = symbol


class UnitUnavailable(PipelineError):
    """No dimension could be determined for a symbol."""

    def __init__(self, symbol: Symbol):
        super().__init__(f"no dimension available for '{symbol}'")
        self.symbol = symbol


class RetriesExhausted(PipelineError):
    """Every drawn assignment hit a division by zero or negative radicand."""

    def __init__(self, attempts: int):
        super().__init__(f"no evaluable assignment found in {attempts} draws")
        self.attempts = attempts


class TemplatePlaceholderUnbound(PipelineError):
    """The question template names a placeholder the pipeline does not fill."""

    def __init__(self, placeholder: str):
        super().__init__(f"template placeholder '{placeholder}' is not bound")
        self.placeholder = placeholder


@dataclass(frozen=True)
class AssignedValue:
    value: int
    unit: UnitString


@dataclass(frozen=True)
class QuizQuestion:
    """A generated question together with its hidden solution."""

    concept_qid: str
    concept_label: str
    target: IdentifierInfo
    original: Equation
    rearranged: Equation
    assignment: dict[Symbol, AssignedValue]
    question_text: str
    solution_value: Fraction
    solution_approximate: bool
    solution_unit: UnitString
    seed: int | None
    value_range: tuple[int, int]


@dataclass(frozen=True)
class Explanation:
    reference: str
    steps: tuple[tuple[str, str], ...]
    final_value: str
    final_unit: str


def load_default_template() -> str:
    return (
        resources.files("physquiz.data")
        .joinpath("question_template.txt")
        .read_text(encoding="utf-8")
        .strip()
    )


def format_value(value: Fraction, approximate: bool) -> str:
    """Render an exact result as-is and an approximate one to six figures."""
    if approximate:
        return "%.6g" % float(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "%s/%s (= %.6g)" % (value.numerator, value.denominator, float(value))


def format_value_with_unit(value_text: str, unit: UnitString) -> str:
    if unit.dimension.is_dimensionless:
        return f"{value_text} (dimensionless)"
    return f"{value_text} {unit.text}"


class _StrictPlaceholders(dict):
    def __missing__(self, key: str) -> str:
        raise TemplatePlaceholderUnbound(key)


def render_question_text(
    template: str,
    concept_label: str,
    target: IdentifierInfo,
    givens: list[tuple[IdentifierInfo, AssignedValue]],
) -> str:
    parts = [
        f"{info.name} {info.symbol} = {format_value_with_unit(str(av.value), av.unit)}"
        for info, av in givens
    ]
    if len(parts) > 1:
        givens_text = ", ".join(parts[:-1]) + " and " + parts[-1]
    else:
        givens_text = parts[0]
    fields = _StrictPlaceholders(
        concept=concept_label,
        givens=givens_text,
        target_name=target.name,
        target_symbol=str(target.symbol),
    )
    try:
        return template.format_map(fields)
    except (ValueError, IndexError) as err:
        # stray or positional braces in the template text
        raise TemplatePlaceholderUnbound(str(err)) from None


def _identifier_info(record: ConceptRecord, symbol: Symbol) -> IdentifierInfo:
    info = record.identifier_for(symbol)
    if info is None:
        raise MissingIdentifierInfo(symbol)
    return info


def _dimension_for(
    record: ConceptRecord, original_lhs: Symbol | None, symbol: Symbol
) -> DimensionVector | None:
    info = record.identifier_for(symbol)
    if info is not None and info.dimension is not None:
        return info.dimension
    if original_lhs is not None and symbol == original_lhs:
        return record.formula_dimension
    return None


def _solution_dimension(
    record: ConceptRecord,
    original_lhs: Symbol | None,
    target: Symbol,
    rearranged: Equation,
) -> DimensionVector:
    # The stored formula dimension belongs to the original left-hand side.
    # Any other target gets its unit from the dimension calculus over the
    # rearranged right-hand side, falling back to the identifier's own
    # stored dimension when some operand dimension is unknown.
    if original_lhs is not None and target == original_lhs:
        dim = record.formula_dimension
        if dim is None:
            dim = _dimension_for(record, None, target)
        if dim is not None:
            return dim
    else:
        known = {
            sym: d
            for sym in free_identifiers(rearranged.rhs)
            if (d := _dimension_for(record, original_lhs, sym)) is not None
        }
        try:
            return infer_lhs_dimension(known, rearranged.rhs)
        except MissingIdentifierDimension:
            pass
        info = record.identifier_for(target)
        if info is not None and info.dimension is not None:
            return info.dimension
    raise UnitUnavailable(target)


def generate_question(
    record: ConceptRecord,
    target: Symbol | str | None = None,
    value_range: tuple[int, int] = DEFAULT_VALUE_RANGE,
    seed: int | None = None,
    template: str | None = None,
    heuristic_derivatives: bool = True,
    max_redraws: int = MAX_REDRAWS,
) -> QuizQuestion:
    """Build a quiz question from a concept record.

    ``target`` picks which identifier to solve for; ``None`` draws one at
    random from the quizzable rearrangements.  ``seed`` makes the whole
    construction reproducible.  Raises ``NotQuizzable`` for formulas the
    solver rejects and subclasses of ``PipelineError`` for everything the
    pipeline itself cannot supply.
    """
    lo, hi = value_range
    if lo > hi or lo < 1:
        raise ValueError("value range must satisfy 1 <= lo <= hi")
    try:
        equation, _report = translate(
            record.defining_formula_latex, heuristic_derivatives=heuristic_derivatives
        )
    except MultipleEqualitySigns as err:
        raise NotQuizzable(
            QuizzabilityVerdict.rejected(QuizReason.MultipleEqualities)
        ) from err

    rset = rearrange_all(equation)
    if not rset.solved_for:
        raise NoQuizzableRearrangement("no identifier can be isolated", None)

    rng = random.Random(seed)
    if target is None:
        target_sym = rng.choice(sorted(rset.solved_for, key=str))
    elif isinstance(target, str):
        target_sym = parse_symbol_text(target)
    else:
        target_sym = target
    rearranged = rset.solved_for.get(target_sym)
    if rearranged is None:
        skip_reason = rset.skipped.get(target_sym)
        if skip_reason is not None:
            raise NoQuizzableRearrangement(
                f"'{target_sym}' cannot be isolated: {skip_reason}", None
            )
        raise NoQuizzableRearrangement(
            f"'{target_sym}' does not occur in the formula", None
        )

    original_lhs = (
        equation.lhs.symbol if isinstance(equation.lhs, Identifier) else None
    )
    target_info = _identifier_info(record, target_sym)
    given_symbols = free_identifiers(rearranged.rhs)

    given_units: dict[Symbol, UnitString] = {}
    for sym in given_symbols:
        _identifier_info(record, sym)
        dim = _dimension_for(record, original_lhs, sym)
        if dim is None:
            raise UnitUnavailable(sym)
        given_units[sym] = si_unit_string(dim)
    solution_unit = si_unit_string(
        _solution_dimension(record, original_lhs, target_sym, rearranged)
    )

    for _attempt in range(max_redraws):
        values = {sym: rng.randint(lo, hi) for sym in given_symbols}
        try:
            result = evaluate(rearranged.rhs, values)
        except (DivisionByZero, NegativeRadicand):
            continue
        break
    else:
        raise RetriesExhausted(max_redraws)

    assignment = {
        sym: AssignedValue(values[sym], given_units[sym]) for sym in given_symbols
    }
    givens = [(_identifier_info(record, sym), assignment[sym]) for sym in given_symbols]
    text = render_question_text(
        template if template is not None else load_default_template(),
        record.label,
        target_info,
        givens,
    )
    return QuizQuestion(
        concept_qid=record.qid,
        concept_label=record.label,
        target=target_info,
        original=equation,
        rearranged=rearranged,
        assignment=assignment,
        question_text=text,
        solution_value=result.value,
        solution_approximate=result.approximate,
        solution_unit=solution_unit,
        seed=seed,
        value_range=value_range,
    )


def render_explanation(question: QuizQuestion) -> Explanation:
    """Produce the three worked steps backing a question's solution."""

    def substitute(symbol: Symbol) -> str | None:
        av = question.assignment.get(symbol)
        if av is None:
            return None
        if av.unit.dimension.is_dimensionless:
            return str(av.value)
        return f"{av.value} {av.unit.text}"

    target_text = str(question.target.symbol)
    value_text = format_value(question.solution_value, question.solution_approximate)
    steps = (
        ("Rearranged formula", render_equation(question.rearranged)),
        (
            "Substituted values",
            f"{target_text} = "
            f"{render_infix(question.rearranged.rhs, substitute=substitute)}",
        ),
        (
            "Result",
            f"{target_text} = "
            f"{format_value_with_unit(value_text, question.solution_unit)}",
        ),
    )
    return Explanation(
        reference=f"{question.concept_label} ({question.concept_qid})",
        steps=steps,
        final_value=value_text,
        final_unit=question.solution_unit.text,
    )
