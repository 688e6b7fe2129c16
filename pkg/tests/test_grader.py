"""Answer grading: tolerance band, per-field verdicts, parse robustness."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from physquiz.dimensions import parse_isq
from physquiz.grader import (
    DEFAULT_TOLERANCE,
    GradeReport,
    ValueParseError,
    grade,
    parse_value,
    value_within_tolerance,
)

METRE_PER_SECOND = parse_isq("L T^-1")
METRE = parse_isq("L")


class TestParseValue:
    @pytest.mark.parametrize(
        "text, expected",
        [
            ("60", Fraction(60)),
            ("5/2", Fraction(5, 2)),
            ("2.5", Fraction(5, 2)),
            ("6e1", Fraction(60)),
            ("-3", Fraction(-3)),
            ("+0.25", Fraction(1, 4)),
            ("  42 ", Fraction(42)),
            ("1.5E2", Fraction(150)),
        ],
    )
    def test_accepted(self, text, expected):
        assert parse_value(text) == expected

    @pytest.mark.parametrize("text", ["", "   ", "sixty", "1/0", "2..5", "1 2", "m"])
    def test_rejected(self, text):
        with pytest.raises(ValueParseError) as exc:
            parse_value(text)
        assert exc.value.text == text


class TestVerdicts:
    def test_both_correct(self):
        report = grade("60", "m", Fraction(60), METRE)
        assert report.correct
        assert report.value_correct and report.unit_correct
        assert report.messages == ()
        assert report.relative_error == 0.0

    def test_wrong_value(self):
        report = grade("59", "m", Fraction(60), METRE)
        assert not report.value_correct
        assert report.unit_correct
        assert report.messages == ("Value incorrect!",)

    def test_wrong_unit(self):
        report = grade("60", "s", Fraction(60), METRE)
        assert report.value_correct
        assert not report.unit_correct
        assert report.messages == ("Unit incorrect!",)

    def test_both_wrong_value_message_first(self):
        report = grade("59", "s", Fraction(60), METRE)
        assert report.messages == ("Value incorrect!", "Unit incorrect!")
        assert not report.correct

    def test_fields_judged_independently(self):
        # a wrong unit must not poison the value verdict and vice versa
        assert grade("60", "kg", Fraction(60), METRE).value_correct
        assert grade("sixty", "m", Fraction(60), METRE).unit_correct

    def test_derived_unit_symbols_accepted(self):
        newton = parse_isq("L M T^-2")
        assert grade("5", "N", Fraction(5), newton).unit_correct
        assert grade("5", "kg m s^-2", Fraction(5), newton).unit_correct
        assert grade("5", "kg m/s^2", Fraction(5), newton).unit_correct


class TestParseFailuresAreVerdicts:
    def test_garbage_value_never_raises(self):
        report = grade("sixty", "m", Fraction(60), METRE)
        assert not report.value_correct
        assert report.parsed_value is None
        assert report.relative_error is None

    def test_garbage_unit_never_raises(self):
        report = grade("60", "furlongs", Fraction(60), METRE)
        assert not report.unit_correct
        assert report.parsed_unit is None

    def test_prefixed_unit_is_wrong_not_error(self):
        report = grade("60", "km", Fraction(60), METRE)
        assert not report.unit_correct

    def test_zero_denominator_value(self):
        report = grade("1/0", "m", Fraction(60), METRE)
        assert not report.value_correct
        assert report.parsed_value is None


class TestToleranceBand:
    def test_boundary_inclusive(self):
        solution = Fraction(100)
        assert grade("101", "m", solution, METRE).value_correct
        assert grade("99", "m", solution, METRE).value_correct
        assert not grade("101.000001", "m", solution, METRE).value_correct
        assert not grade("98.999999", "m", solution, METRE).value_correct

    def test_negative_solution_band(self):
        solution = Fraction(-100)
        assert grade("-101", "m", solution, METRE).value_correct
        assert not grade("-102", "m", solution, METRE).value_correct

    def test_zero_solution_absolute_band(self):
        zero = Fraction(0)
        assert grade("0", "m", zero, METRE).value_correct
        assert grade("0.01", "m", zero, METRE).value_correct
        assert grade("-1/100", "m", zero, METRE).value_correct
        assert not grade("0.011", "m", zero, METRE).value_correct

    def test_float_tolerance_means_decimal(self):
        # 0.01 the float must behave as 1/100 exactly, so the boundary holds
        assert grade("101", "m", Fraction(100), METRE, tolerance=0.01).value_correct
        assert not grade(
            "101.0000001", "m", Fraction(100), METRE, tolerance=0.01
        ).value_correct

    def test_custom_tolerance(self):
        assert grade("110", "m", Fraction(100), METRE, tolerance="1/10").value_correct
        assert not grade("111", "m", Fraction(100), METRE, tolerance="1/10").value_correct
        assert grade("100", "m", Fraction(100), METRE, tolerance=0).value_correct
        assert not grade("100.0001", "m", Fraction(100), METRE, tolerance=0).value_correct

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            grade("60", "m", Fraction(60), METRE, tolerance=Fraction(-1, 100))

    def test_relative_error_reported(self):
        report = grade("102", "m", Fraction(100), METRE)
        assert report.relative_error == pytest.approx(0.02)

    @given(
        st.fractions(min_value=-1000, max_value=1000),
        st.fractions(min_value=-1000, max_value=1000).filter(lambda f: f != 0),
    )
    def test_band_membership_matches_inequality(self, answer, solution):
        inside = abs(answer - solution) <= DEFAULT_TOLERANCE * abs(solution)
        assert value_within_tolerance(answer, solution, DEFAULT_TOLERANCE) == inside

    def test_thousand_random_boundary_pairs(self):
        rng = random.Random(170)
        for _ in range(1000):
            solution = Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 999))
            if solution == 0:
                solution = Fraction(1)
            tol = Fraction(rng.randint(0, 50), 1000)
            margin = tol * abs(solution)
            epsilon = Fraction(1, 10**12) * abs(solution)
            assert value_within_tolerance(solution + margin, solution, tol)
            assert value_within_tolerance(solution - margin, solution, tol)
            assert not value_within_tolerance(solution + margin + epsilon, solution, tol)
            assert not value_within_tolerance(solution - margin - epsilon, solution, tol)


class TestEquivalentSpellings:
    def test_fraction_and_decimal_agree(self):
        a = grade("5/2", "m", Fraction(5, 2), METRE)
        b = grade("2.5", "m", Fraction(5, 2), METRE)
        assert a == b
        assert a.correct

    def test_spelling_equivalence_over_random_rationals(self):
        rng = random.Random(9)
        for _ in range(300):
            numerator = rng.randint(-999, 999)
            power = rng.randint(0, 3)
            solution = Fraction(numerator, 10**power)
            as_fraction = f"{solution.numerator}/{solution.denominator}"
            as_decimal = str(float(solution))
            one = grade(as_fraction, "m s^-1", solution, METRE_PER_SECOND)
            two = grade(as_decimal, "m s^-1", solution, METRE_PER_SECOND)
            assert one.value_correct and two.value_correct
            assert one.value_correct == two.value_correct

    def test_scientific_notation(self):
        assert grade("6e1", "m", Fraction(60), METRE).value_correct


class TestReportShape:
    def test_parsed_fields_exposed(self):
        report = grade("5/2", "m s^-1", Fraction(5, 2), METRE_PER_SECOND)
        assert report.parsed_value == Fraction(5, 2)
        assert report.parsed_unit == METRE_PER_SECOND

    def test_report_is_frozen(self):
        report = grade("60", "m", Fraction(60), METRE)
        with pytest.raises(AttributeError):
            report.value_correct = False

    def test_correct_property(self):
        assert GradeReport(True, True, None, None, None, ()).correct
        assert not GradeReport(True, False, None, None, None, ()).correct
