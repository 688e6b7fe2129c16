"""Per-field answer grading.

Value and unit are judged independently: the value against the exact
solution within a relative tolerance band, the unit by dimension-vector
equality.  Parse failures never raise out of ``grade``; they become
false verdicts so a mistyped answer reads as a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dimensions import DimensionVector, UnitError, parse_unit_answer

DEFAULT_TOLERANCE = Fraction(1, 100)

VALUE_INCORRECT = "Value incorrect!"
UNIT_INCORRECT = "Unit incorrect!"


class ValueParseError(ValueError):
    def __init__(self, text: str):
        super().__init__(f"cannot read {text!r} as a number")
        self.text = text


@dataclass(frozen=True)
class GradeReport:
    value_correct: bool
    unit_correct: bool
    parsed_value: Fraction | None
    parsed_unit: DimensionVector | None
    relative_error: float | None
    messages: tuple[str, ...]

    @property
    def correct(self) -> bool:
        return self.value_correct and self.unit_correct


def parse_value(text: str) -> Fraction:
    """Read an integer, decimal, fraction, or aEb string as an exact rational."""
    stripped = text.strip()
    if not stripped:
        raise ValueParseError(text)
    try:
        return Fraction(stripped)
    except (ValueError, ZeroDivisionError):
        raise ValueParseError(text) from None


def _as_fraction(tolerance: Fraction | float | int | str) -> Fraction:
    if isinstance(tolerance, Fraction):
        return tolerance
    if isinstance(tolerance, float):
        # repr round-trip keeps 0.01 meaning 1/100, not its binary neighbour
        return Fraction(str(tolerance))
    return Fraction(tolerance)


def value_within_tolerance(
    answer: Fraction, solution: Fraction, tolerance: Fraction
) -> bool:
    if solution == 0:
        return abs(answer) <= tolerance
    return abs(answer - solution) <= tolerance * abs(solution)


def grade(
    answer_value: str,
    answer_unit: str,
    solution_value: Fraction,
    solution_unit: DimensionVector,
    tolerance: Fraction | float | int | str = DEFAULT_TOLERANCE,
) -> GradeReport:
    """Grade a (value, unit) answer pair against the computed solution.

    The tolerance band is closed: exactly solution*(1 +/- tolerance) still
    passes.  A solution of zero is graded with the tolerance as an absolute
    threshold instead, since a relative band collapses there.
    """
    tol = _as_fraction(tolerance)
    if tol < 0:
        raise ValueError("tolerance must be non-negative")

    parsed_value: Fraction | None
    try:
        parsed_value = parse_value(answer_value)
    except ValueParseError:
        parsed_value = None
    parsed_unit: DimensionVector | None
    try:
        parsed_unit = parse_unit_answer(answer_unit)
    except UnitError:
        parsed_unit = None

    value_ok = parsed_value is not None and value_within_tolerance(
        parsed_value, solution_value, tol
    )
    unit_ok = parsed_unit is not None and parsed_unit == solution_unit

    relative_error: float | None = None
    if parsed_value is not None and solution_value != 0:
        relative_error = float(abs(parsed_value - solution_value) / abs(solution_value))

    messages: list[str] = []
    if not value_ok:
        messages.append(VALUE_INCORRECT)
    if not unit_ok:
        messages.append(UNIT_INCORRECT)
    return GradeReport(
        value_correct=value_ok,
        unit_correct=unit_ok,
        parsed_value=parsed_value,
        parsed_unit=parsed_unit,
        relative_error=relative_error,
        messages=tuple(messages),
    )
