"""Dimensional analysis over the seven ISQ base dimensions.

A :class:`DimensionVector` maps the base dimensions L, M, T, I, Θ, N, J to
rational exponents.  Vectors form a group under multiplication (exponents
add), which is all the unit algebra this engine needs: the unit of a
product is the product of units, powers scale exponents, and two sides of
a sum must agree.

Unit strings exist in two dialects:

* ISQ dimension strings, e.g. ``"L T^-1"``, the storage format;
* SI base-symbol strings, e.g. ``"m s^-1"``, shown to users.

Answers may also use a small table of derived symbols (N, J, W, Pa, Hz, C,
V) that expand into base dimensions.  The table ships as a versioned data
file so it can grow without touching code.  SI prefixes are rejected.
Correctness of an answered unit is dimension-vector equality, so ``m/s``
and ``m s^-1`` are the same unit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterator, Mapping

from .expr_core import (
    Add,
    Derivative,
    Expression,
    Function,
    Identifier,
    Integer,
    Mul,
    Neg,
    Pow,
    Rational,
    Sqrt,
    Sum,
    Symbol,
)

BASE_DIMENSIONS = ("L", "M", "T", "I", "Θ", "N", "J")

# Base unit symbol per dimension, and the display order kg m s A K mol cd.
_SI_SYMBOL = {"L": "m", "M": "kg", "T": "s", "I": "A", "Θ": "K", "N": "mol", "J": "cd"}
_SI_ORDER = ("M", "L", "T", "I", "Θ", "N", "J")

_PREFIX_CHARS = ("da", "k", "c", "d", "m", "n", "p", "f", "a", "u", "µ", "h", "M", "G", "T", "P")


class UnitError(Exception):
    pass


class MalformedDimensionString(UnitError):
    pass


class NonIntegerExponent(UnitError):
    def __init__(self, rendered: str):
        super().__init__(f"unit has a non-integer exponent: {rendered}")
        self.rendered = rendered


class UnknownUnitSymbol(UnitError):
    def __init__(self, symbol: str, message: str | None = None):
        super().__init__(message or f"unknown unit symbol {symbol!r}")
        self.symbol = symbol


class MalformedUnitExpression(UnitError):
    pass


class DimensionMismatch(UnitError):
    pass


class MissingIdentifierDimension(UnitError):
    def __init__(self, symbol: Symbol):
        super().__init__(f"no dimension known for identifier {symbol}")
        self.symbol = symbol


class UnsupportedDimensionNode(UnitError):
    pass


@dataclass(frozen=True)
class DimensionVector:
    """Exponents over (L, M, T, I, Θ, N, J), stored positionally."""

    exponents: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.exponents) != len(BASE_DIMENSIONS):
            raise ValueError("dimension vector needs one exponent per base dimension")

    @classmethod
    def dimensionless(cls) -> "DimensionVector":
        return cls(tuple(Fraction(0) for _ in BASE_DIMENSIONS))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, int | Fraction]) -> "DimensionVector":
        exps = []
        for letter in BASE_DIMENSIONS:
            exps.append(Fraction(mapping.get(letter, 0)))
        unknown = set(mapping) - set(BASE_DIMENSIONS)
        if unknown:
            raise MalformedDimensionString(f"unknown base dimension(s): {sorted(unknown)}")
        return cls(tuple(exps))

    def to_mapping(self) -> dict[str, Fraction]:
        return {
            letter: exp
            for letter, exp in zip(BASE_DIMENSIONS, self.exponents)
            if exp != 0
        }

    def exponent(self, letter: str) -> Fraction:
        return self.exponents[BASE_DIMENSIONS.index(letter)]

    @property
    def is_dimensionless(self) -> bool:
        return all(e == 0 for e in self.exponents)

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.exponents)

    def __mul__(self, other: "DimensionVector") -> "DimensionVector":
        return DimensionVector(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __truediv__(self, other: "DimensionVector") -> "DimensionVector":
        return DimensionVector(tuple(a - b for a, b in zip(self.exponents, other.exponents)))

    def __pow__(self, scale: int | Fraction) -> "DimensionVector":
        s = Fraction(scale)
        return DimensionVector(tuple(e * s for e in self.exponents))

    def inverse(self) -> "DimensionVector":
        return DimensionVector(tuple(-e for e in self.exponents))

    def __iter__(self) -> Iterator[tuple[str, Fraction]]:
        return iter(zip(BASE_DIMENSIONS, self.exponents))

    def __str__(self) -> str:
        return to_isq_string(self)


def _format_exponent(exp: Fraction) -> str:
    if exp.denominator == 1:
        return str(exp.numerator)
    return f"({exp.numerator}/{exp.denominator})"


def to_isq_string(vector: DimensionVector) -> str:
    """Render in ISQ letters, dimension order L M T I Θ N J; '1' if empty."""
    parts = []
    for letter, exp in vector:
        if exp == 0:
            continue
        parts.append(letter if exp == 1 else f"{letter}^{_format_exponent(exp)}")
    return " ".join(parts) if parts else "1"


_ISQ_TOKEN = re.compile(
    r"^([LMTINJΘ])(?:\^(?:([+-]?\d+)|\(([+-]?\d+)/(\d+)\)))?$"
)


def parse_isq(text: str) -> DimensionVector:
    """Parse an ISQ dimension string such as ``"L T^-1"``.

    The empty string and ``"1"`` denote the dimensionless vector.  Repeated
    letters multiply (exponents add).  Fractional exponents use the same
    parenthesised form ``to_isq_string`` produces, e.g. ``"L^(1/2)"``.
    """
    stripped = text.strip()
    if stripped in ("", "1"):
        return DimensionVector.dimensionless()
    acc: dict[str, Fraction] = {}
    for token in stripped.split():
        match = _ISQ_TOKEN.match(token)
        if not match:
            raise MalformedDimensionString(f"bad dimension token {token!r} in {text!r}")
        letter, whole, num, den = match.groups()
        if num is not None:
            exp = Fraction(int(num), int(den))
        elif whole is not None:
            exp = Fraction(int(whole))
        else:
            exp = Fraction(1)
        acc[letter] = acc.get(letter, Fraction(0)) + exp
    return DimensionVector.from_mapping(acc)


def to_si_symbols(vector: DimensionVector) -> str:
    """Render as SI base symbols ordered kg m s A K mol cd.

    Exponent 1 is omitted, the dimensionless vector renders as ``"1"``.
    Raises NonIntegerExponent for fractional exponents; the error carries
    the fractional rendering for display.
    """
    if not vector.is_integral:
        parts = []
        for letter in _SI_ORDER:
            exp = vector.exponent(letter)
            if exp == 0:
                continue
            sym = _SI_SYMBOL[letter]
            parts.append(sym if exp == 1 else f"{sym}^{_format_exponent(exp)}")
        raise NonIntegerExponent(" ".join(parts))
    parts = []
    for letter in _SI_ORDER:
        exp = vector.exponent(letter)
        if exp == 0:
            continue
        sym = _SI_SYMBOL[letter]
        parts.append(sym if exp == 1 else f"{sym}^{exp.numerator}")
    return " ".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# Answer-unit parsing

_DERIVED_SCHEMA_VERSION = 1


def _load_unit_table() -> dict[str, DimensionVector]:
    raw = json.loads(
        resources.files("physquiz").joinpath("data/derived_units.json").read_text("utf-8")
    )
    if raw.get("schema_version") != _DERIVED_SCHEMA_VERSION:
        raise UnitError(
            f"derived unit table schema_version {raw.get('schema_version')!r} unsupported"
        )
    table: dict[str, DimensionVector] = {}
    for letter, sym in _SI_SYMBOL.items():
        table[sym] = DimensionVector.from_mapping({letter: 1})
    for sym, mapping in raw["units"].items():
        table[sym] = DimensionVector.from_mapping(mapping)
    return table


_UNIT_TABLE: dict[str, DimensionVector] | None = None


def unit_table() -> dict[str, DimensionVector]:
    global _UNIT_TABLE
    if _UNIT_TABLE is None:
        _UNIT_TABLE = _load_unit_table()
    return _UNIT_TABLE


_UNIT_FACTOR = re.compile(r"([A-Za-zµ]+)(?:\^([+-]?\d+))?")


def parse_unit_answer(text: str) -> DimensionVector:
    """Parse a user-entered unit into a dimension vector.

    Accepts products and quotients of SI base symbols and the derived
    symbols from the expansion table, separated by spaces, ``*`` or ``/``,
    with optional integer ``^`` exponents.  ``"1"`` means dimensionless.
    """
    table = unit_table()
    stripped = text.strip()
    if stripped == "":
        raise MalformedUnitExpression("empty unit")
    if stripped == "1":
        return DimensionVector.dimensionless()
    result = DimensionVector.dimensionless()
    invert_next = False
    pos = 0
    expect_factor = True
    while pos < len(stripped):
        ch = stripped[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in "*/":
            if expect_factor:
                raise MalformedUnitExpression(f"misplaced {ch!r} in {text!r}")
            if ch == "/":
                invert_next = True
            expect_factor = True
            pos += 1
            continue
        match = _UNIT_FACTOR.match(stripped, pos)
        if not match:
            raise MalformedUnitExpression(f"cannot read unit at {stripped[pos:]!r}")
        symbol, exp_text = match.group(1), match.group(2)
        if symbol not in table:
            for prefix in _PREFIX_CHARS:
                if symbol.startswith(prefix) and symbol[len(prefix):] in table:
                    raise UnknownUnitSymbol(
                        symbol, f"SI prefixes are not supported: {symbol!r}"
                    )
            raise UnknownUnitSymbol(symbol)
        exponent = Fraction(int(exp_text)) if exp_text else Fraction(1)
        if invert_next:
            exponent = -exponent
            invert_next = False
        result = result * (table[symbol] ** exponent)
        expect_factor = False
        pos = match.end()
    if expect_factor:
        raise MalformedUnitExpression(f"dangling operator in {text!r}")
    return result


def units_equivalent(answer: str, expected: DimensionVector) -> bool:
    return parse_unit_answer(answer) == expected


@dataclass(frozen=True)
class UnitString:
    """A display unit plus the vector it denotes; text '1' is dimensionless."""

    text: str
    dimension: DimensionVector


def si_unit_string(vector: DimensionVector) -> UnitString:
    return UnitString(to_si_symbols(vector), vector)


# ---------------------------------------------------------------------------
# Dimension inference over expression trees


def _literal_fraction(e: Expression) -> Fraction | None:
    if isinstance(e, Integer):
        return Fraction(e.value)
    if isinstance(e, Rational):
        return Fraction(e.numerator, e.denominator)
    if isinstance(e, Neg):
        inner = _literal_fraction(e.child)
        return None if inner is None else -inner
    return None


def infer_lhs_dimension(
    dims: Mapping[Symbol, DimensionVector], rhs: Expression
) -> DimensionVector:
    """Dimension of an expression given the dimensions of its identifiers.

    Products multiply vectors, powers scale by the literal exponent, both
    sides of a sum must match, square roots halve exponents.  Constants are
    dimensionless.
    """
    if isinstance(rhs, (Integer, Rational)):
        return DimensionVector.dimensionless()
    if isinstance(rhs, Identifier):
        if rhs.symbol not in dims:
            raise MissingIdentifierDimension(rhs.symbol)
        return dims[rhs.symbol]
    if isinstance(rhs, Add):
        child_dims = [infer_lhs_dimension(dims, c) for c in rhs.children]
        first = child_dims[0]
        for other in child_dims[1:]:
            if other != first:
                raise DimensionMismatch(
                    f"sum mixes dimensions {to_isq_string(first)} and {to_isq_string(other)}"
                )
        return first
    if isinstance(rhs, Mul):
        acc = DimensionVector.dimensionless()
        for c in rhs.children:
            acc = acc * infer_lhs_dimension(dims, c)
        return acc
    if isinstance(rhs, Pow):
        base = infer_lhs_dimension(dims, rhs.base)
        literal = _literal_fraction(rhs.exponent)
        if literal is None:
            if base.is_dimensionless:
                return base
            raise DimensionMismatch("non-literal exponent over a dimensioned base")
        return base**literal
    if isinstance(rhs, Neg):
        return infer_lhs_dimension(dims, rhs.child)
    if isinstance(rhs, Sqrt):
        return infer_lhs_dimension(dims, rhs.child) ** Fraction(1, 2)
    if isinstance(rhs, Derivative):
        for sym in (rhs.dependent, rhs.independent):
            if sym not in dims:
                raise MissingIdentifierDimension(sym)
        return dims[rhs.dependent] / dims[rhs.independent]
    if isinstance(rhs, Sum):
        return infer_lhs_dimension(dims, rhs.body)
    if isinstance(rhs, Function):
        raise UnsupportedDimensionNode(
            f"cannot infer a dimension through function {rhs.name!r}"
        )
    raise TypeError(f"not an expression node: {rhs!r}")
