"""Dimension vectors, ISQ strings, SI unit formatting, unit answers."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from physquiz.dimensions import (
    BASE_DIMENSIONS,
    DimensionMismatch,
    DimensionVector,
    MalformedDimensionString,
    MalformedUnitExpression,
    MissingIdentifierDimension,
    NonIntegerExponent,
    UnknownUnitSymbol,
    UnsupportedDimensionNode,
    infer_lhs_dimension,
    parse_isq,
    parse_unit_answer,
    si_unit_string,
    to_isq_string,
    to_si_symbols,
    unit_table,
)
from physquiz.expr_core import Symbol, parse_infix


def vec(**exponents) -> DimensionVector:
    return DimensionVector.from_mapping(exponents)


class TestVectorAlgebra:
    def test_seven_base_dimensions(self):
        assert len(BASE_DIMENSIONS) == 7
        assert BASE_DIMENSIONS == ("L", "M", "T", "I", "Θ", "N", "J")

    def test_multiplication_adds_exponents(self):
        assert vec(L=1) * vec(L=2, T=-1) == vec(L=3, T=-1)

    def test_division_subtracts(self):
        assert vec(L=1) / vec(T=1) == vec(L=1, T=-1)

    def test_power_scales(self):
        assert vec(L=1, T=-1) ** 2 == vec(L=2, T=-2)

    def test_fractional_power(self):
        assert vec(L=2) ** Fraction(1, 2) == vec(L=1)

    def test_inverse(self):
        assert vec(T=1).inverse() == vec(T=-1)

    def test_dimensionless_identity(self):
        one = DimensionVector.dimensionless()
        assert one.is_dimensionless
        assert vec(L=1) * one == vec(L=1)


_exponents = st.builds(
    Fraction,
    st.integers(min_value=-8, max_value=8),
    st.integers(min_value=1, max_value=3),
)
_vectors = st.builds(
    lambda a, b, c: DimensionVector.from_mapping({"L": a, "M": b, "T": c}),
    _exponents,
    _exponents,
    _exponents,
)


class TestGroupLaws:
    @given(_vectors, _vectors, _vectors)
    def test_associative(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(_vectors, _vectors)
    def test_commutative(self, a, b):
        assert a * b == b * a

    @given(_vectors)
    def test_inverse_cancels(self, a):
        assert a * a.inverse() == DimensionVector.dimensionless()

    @given(_vectors)
    def test_division_is_inverse_multiplication(self, a):
        assert a / a == DimensionVector.dimensionless()

    @given(_vectors)
    def test_isq_round_trip(self, a):
        assert parse_isq(to_isq_string(a)) == a


class TestIsqStrings:
    def test_parse_simple(self):
        assert parse_isq("L T^-1") == vec(L=1, T=-1)

    def test_parse_dimensionless_forms(self):
        assert parse_isq("1") == DimensionVector.dimensionless()
        assert parse_isq("") == DimensionVector.dimensionless()

    def test_repeated_letters_accumulate(self):
        assert parse_isq("L L") == vec(L=2)

    def test_fractional_exponent(self):
        half = DimensionVector.from_mapping({"T": Fraction(1, 2)})
        assert parse_isq("T^(1/2)") == half
        assert parse_isq("T^(-3/2)") == DimensionVector.from_mapping(
            {"T": Fraction(-3, 2)}
        )
        # bare p/q without parentheses is not a token this grammar knows
        with pytest.raises(MalformedDimensionString):
            parse_isq("T^1/2")

    def test_fractional_round_trip(self):
        v = DimensionVector.from_mapping({"L": Fraction(1, 2), "T": Fraction(-1)})
        assert to_isq_string(v) == "L^(1/2) T^-1"
        assert parse_isq(to_isq_string(v)) == v

    def test_unknown_letter_rejected(self):
        with pytest.raises(MalformedDimensionString):
            parse_isq("L X")

    def test_garbage_rejected(self):
        with pytest.raises(MalformedDimensionString):
            parse_isq("L^")

    def test_render_dimensionless(self):
        assert to_isq_string(DimensionVector.dimensionless()) == "1"


class TestSiSymbols:
    def test_velocity(self):
        assert to_si_symbols(parse_isq("L T^-1")) == "m s^-1"

    def test_mass_first_ordering(self):
        # energy: kg before m before s
        assert to_si_symbols(parse_isq("L^2 M T^-2")) == "kg m^2 s^-2"

    def test_exponent_one_omitted(self):
        assert to_si_symbols(parse_isq("M")) == "kg"

    def test_dimensionless_is_one(self):
        assert to_si_symbols(DimensionVector.dimensionless()) == "1"

    def test_all_seven_bases(self):
        full = DimensionVector.from_mapping(
            {"M": 1, "L": 1, "T": 1, "I": 1, "Θ": 1, "N": 1, "J": 1}
        )
        assert to_si_symbols(full) == "kg m s A K mol cd"

    def test_non_integer_exponent_fails_with_rendering(self):
        with pytest.raises(NonIntegerExponent) as exc:
            to_si_symbols(DimensionVector.from_mapping({"L": Fraction(1, 2)}))
        assert exc.value.rendered

    def test_si_unit_string_carries_both_views(self):
        unit = si_unit_string(parse_isq("L T^-1"))
        assert unit.text == "m s^-1"
        assert unit.dimension == vec(L=1, T=-1)


class TestUnitAnswers:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("m", {"L": 1}),
            ("m/s", {"L": 1, "T": -1}),
            ("m s^-1", {"L": 1, "T": -1}),
            ("m * s^-1", {"L": 1, "T": -1}),
            ("kg m^2 s^-2", {"L": 2, "M": 1, "T": -2}),
            ("N", {"M": 1, "L": 1, "T": -2}),
            ("J", {"M": 1, "L": 2, "T": -2}),
            ("W", {"M": 1, "L": 2, "T": -3}),
            ("Pa", {"M": 1, "L": -1, "T": -2}),
            ("Hz", {"T": -1}),
            ("V", {"M": 1, "L": 2, "T": -3, "I": -1}),
            ("N m", {"M": 1, "L": 2, "T": -2}),
            ("kg/m^3", {"M": 1, "L": -3}),
            ("1", {}),
            ("m/s/s", {"L": 1, "T": -2}),
        ],
    )
    def test_accepted_forms(self, text, expected):
        assert parse_unit_answer(text) == DimensionVector.from_mapping(expected)

    def test_slash_inverts_next_factor_only(self):
        # m/s * kg: only s is inverted
        assert parse_unit_answer("m/s kg") == vec(L=1, T=-1, M=1)

    def test_derived_and_base_mix(self):
        assert parse_unit_answer("J/s") == parse_unit_answer("W")

    def test_case_sensitive(self):
        with pytest.raises(UnknownUnitSymbol):
            parse_unit_answer("M")

    @pytest.mark.parametrize("text", ["km", "ms", "cm", "mA"])
    def test_si_prefixes_rejected_with_hint(self, text):
        with pytest.raises(UnknownUnitSymbol) as exc:
            parse_unit_answer(text)
        assert "prefix" in str(exc.value).lower()

    def test_unknown_symbol_named(self):
        with pytest.raises(UnknownUnitSymbol) as exc:
            parse_unit_answer("zorkmid")
        assert exc.value.symbol == "zorkmid"

    @pytest.mark.parametrize("text", ["", "  ", "m^", "m^x", "/s", "m//s", "m^1.5"])
    def test_malformed_rejected(self, text):
        with pytest.raises((MalformedUnitExpression, UnknownUnitSymbol)):
            parse_unit_answer(text)

    def test_unit_table_versioned(self):
        table = unit_table()
        assert table["N"] == vec(M=1, L=1, T=-2)
        assert "V" in table


class TestInference:
    def _dims(self):
        return {
            Symbol("v"): vec(L=1, T=-1),
            Symbol("s"): vec(L=1),
            Symbol("t"): vec(T=1),
            Symbol("m"): vec(M=1),
        }

    def test_product(self):
        rhs = parse_infix("m * v")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(M=1, L=1, T=-1)

    def test_quotient(self):
        rhs = parse_infix("s / t")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(L=1, T=-1)

    def test_power(self):
        rhs = parse_infix("v^2")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(L=2, T=-2)

    def test_sqrt_halves(self):
        rhs = parse_infix("sqrt(s^2)")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(L=1)

    def test_constants_are_dimensionless(self):
        rhs = parse_infix("1/2 * m * v^2")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(M=1, L=2, T=-2)

    def test_sum_requires_matching_terms(self):
        rhs = parse_infix("s + v")
        with pytest.raises(DimensionMismatch):
            infer_lhs_dimension(self._dims(), rhs)

    def test_matching_sum_passes(self):
        rhs = parse_infix("s + s")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(L=1)

    def test_derivative_divides(self):
        rhs = parse_infix("deriv(v, t)")
        assert infer_lhs_dimension(self._dims(), rhs) == vec(L=1, T=-2)

    def test_missing_symbol_named(self):
        rhs = parse_infix("s * q")
        with pytest.raises(MissingIdentifierDimension) as exc:
            infer_lhs_dimension(self._dims(), rhs)
        assert exc.value.symbol == Symbol("q")

    def test_function_unsupported(self):
        rhs = parse_infix("f(s)")
        with pytest.raises(UnsupportedDimensionNode):
            infer_lhs_dimension(self._dims(), rhs)
