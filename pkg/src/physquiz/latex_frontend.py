"""LaTeX formula cleaning and translation into expression trees.

Raw formula markup arrives with presentation noise (spacing macros,
``\\left``/``\\right`` sizing, ``\\mathrm`` wrappers) that carries no
mathematical content.  ``clean_latex`` strips that noise in a fixed rule
order and reports which rules fired; ``parse_latex`` turns the cleaned
string into an :class:`~physquiz.expr_core.Equation`.

Derivative notation is special-cased during cleaning.  ``\\frac{d v}{d t}``
(with a space after ``d``) and partial-derivative fractions are always
rewritten to an internal ``\\deriv{v}{t}`` marker.  The spaceless form
``\\frac{dv}{dt}`` is ambiguous (it may mean d*v/(d*t)), so it is rewritten
only when the caller opts into the heuristic, and the report says so.

Anything the grammar does not cover fails loudly with the offending macro
named, never silently dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .expr_core import (
    GREEK_NAMES,
    Add,
    Derivative,
    DivisionByZero,
    Equation,
    Expression,
    Identifier,
    Integer,
    Neg,
    Sqrt,
    Sum,
    Symbol,
    add,
    div,
    from_fraction,
    invert,
    mul,
    pow_,
)


class TranslationError(Exception):
    pass


class ParseError(TranslationError):
    def __init__(self, message: str, macro: str | None = None, position: int = -1):
        super().__init__(message)
        self.macro = macro
        self.position = position


class MultipleEqualitySigns(TranslationError):
    def __init__(self, count: int):
        super().__init__(f"formula contains {count} equality signs, expected one")
        self.count = count


@dataclass(frozen=True)
class CleaningReport:
    original: str
    cleaned: str
    rules_applied: tuple[str, ...] = ()
    derivative_heuristic_fired: bool = False


_IDENT_PATTERN = r"(?:\\?[A-Za-z]+)(?:_(?:[A-Za-z0-9]|\{[^{}]*\}))?"

_EXPLICIT_DERIV = re.compile(
    r"\\frac\s*\{\s*d\s+(" + _IDENT_PATTERN + r")\s*\}\s*\{\s*d\s+(" + _IDENT_PATTERN + r")\s*\}"
)
_PARTIAL_DERIV = re.compile(
    r"\\frac\s*\{\s*\\partial\s*(" + _IDENT_PATTERN + r")\s*\}\s*\{\s*\\partial\s*(" + _IDENT_PATTERN + r")\s*\}"
)
_HEURISTIC_DERIV = re.compile(
    r"\\frac\s*\{\s*d((?:\\[A-Za-z]+|[A-Za-z])(?:_(?:[A-Za-z0-9]|\{[^{}]*\}))?)\s*\}"
    r"\s*\{\s*d((?:\\[A-Za-z]+|[A-Za-z])(?:_(?:[A-Za-z0-9]|\{[^{}]*\}))?)\s*\}"
)


def _strip_delimiters(text: str) -> str:
    return re.sub(r"\\(left|right)(?![A-Za-z])", "", text)


def _strip_spacing(text: str) -> str:
    return re.sub(r"\\[,;!]", "", text)


def _unwrap(macro: str, text: str) -> str:
    pattern = re.compile(r"\\" + macro + r"\s*\{([^{}]*)\}")
    while True:
        new = pattern.sub(r"\1", text)
        if new == text:
            return new
        text = new


def _normalize_multiplication(text: str) -> str:
    return re.sub(r"\\(times|cdot)(?![A-Za-z])", " * ", text)


def _normalize_frac_variants(text: str) -> str:
    return re.sub(r"\\[dt]frac(?![A-Za-z])", r"\\frac", text)


def _mark_explicit_derivatives(text: str) -> str:
    text = _EXPLICIT_DERIV.sub(r"\\deriv{\1}{\2}", text)
    return _PARTIAL_DERIV.sub(r"\\deriv{\1}{\2}", text)


def _mark_heuristic_derivatives(text: str) -> str:
    return _HEURISTIC_DERIV.sub(r"\\deriv{\1}{\2}", text)


_RULES = (
    ("strip_delimiters", _strip_delimiters),
    ("strip_spacing", _strip_spacing),
    ("unwrap_mathrm", lambda t: _unwrap("mathrm", t)),
    ("unwrap_text", lambda t: _unwrap("text", t)),
    ("normalize_multiplication", _normalize_multiplication),
    ("normalize_frac_variants", _normalize_frac_variants),
    ("mark_explicit_derivatives", _mark_explicit_derivatives),
)


def clean_latex(latex: str, heuristic_derivatives: bool = False) -> CleaningReport:
    """Apply the cleaning rules in order and report what fired.

    Cleaning never fails and is idempotent: cleaning a cleaned string is a
    no-op.
    """
    cleaned = latex
    applied: list[str] = []
    for name, rule in _RULES:
        new = rule(cleaned)
        if new != cleaned:
            applied.append(name)
            cleaned = new
    heuristic_fired = False
    if heuristic_derivatives:
        new = _mark_heuristic_derivatives(cleaned)
        if new != cleaned:
            applied.append("mark_heuristic_derivatives")
            heuristic_fired = True
            cleaned = new
    return CleaningReport(
        original=latex,
        cleaned=cleaned,
        rules_applied=tuple(applied),
        derivative_heuristic_fired=heuristic_fired,
    )


# ---------------------------------------------------------------------------
# Tokenizer

_KNOWN_MACROS = frozenset({"frac", "sqrt", "sum", "deriv"}) | GREEK_NAMES

_OPS = set("+-*/^_{}()=,")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "\\":
            j = i + 1
            while j < n and text[j].isalpha():
                j += 1
            if j == i + 1:
                raise ParseError(f"stray backslash at position {i}", position=i)
            name = text[i + 1 : j]
            if name not in _KNOWN_MACROS:
                raise ParseError(
                    f"unsupported LaTeX macro '\\{name}'", macro=f"\\{name}", position=i
                )
            tokens.append(("macro", name, i))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            tokens.append(("letter", ch, i))
            i += 1
            continue
        if ch in _OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}", position=i)
    return tokens


class _LatexParser:
    """Recursive descent over cleaned LaTeX tokens."""

    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of formula")
        self.pos += 1
        return tok

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] == op

    def expect_op(self, op: str):
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}, found {tok[1]!r}", position=tok[2])

    def parse_expr(self) -> Expression:
        terms: list[Expression] = []
        if self.at_op("-"):
            self.next()
            terms.append(Neg(self.parse_term()))
        elif self.at_op("+"):
            self.next()
            terms.append(self.parse_term())
        else:
            terms.append(self.parse_term())
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                break
            self.next()
            term = self.parse_term()
            terms.append(Neg(term) if tok[1] == "-" else term)
        return add(*terms) if len(terms) > 1 else terms[0]

    def _starts_factor(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        kind, text, _ = tok
        if kind in ("num", "letter"):
            return True
        if kind == "macro":
            return True
        return kind == "op" and text in "({"

    def parse_term(self) -> Expression:
        factors: list[Expression] = [self.parse_factor()]
        while True:
            if self.at_op("*"):
                self.next()
                factors.append(self.parse_factor())
            elif self.at_op("/"):
                self.next()
                divisor = self.parse_factor()
                if len(factors) == 1 and isinstance(factors[0], Integer) and isinstance(divisor, Integer):
                    factors = [div(factors[0], divisor)]
                else:
                    factors.append(invert(divisor))
            elif self._starts_factor():
                factors.append(self.parse_factor())
            else:
                break
        return mul(*factors) if len(factors) > 1 else factors[0]

    def parse_factor(self) -> Expression:
        node = self.parse_primary()
        while self.at_op("^"):
            self.next()
            node = pow_(node, self.parse_exponent_group())
        return node

    def parse_exponent_group(self) -> Expression:
        if self.at_op("{"):
            self.next()
            inner = self.parse_expr()
            self.expect_op("}")
            return inner
        if self.at_op("-"):
            self.next()
            return Neg(self.parse_primary())
        return self.parse_primary()

    def parse_group(self) -> Expression:
        """A brace-delimited argument, e.g. of \\frac."""
        self.expect_op("{")
        inner = self.parse_expr()
        self.expect_op("}")
        return inner

    def parse_primary(self) -> Expression:
        tok = self.next()
        kind, text, pos = tok
        if kind == "num":
            if "." in text:
                return from_fraction(Fraction(text))
            return Integer(int(text))
        if kind == "macro":
            if text == "frac":
                numerator = self.parse_group()
                denominator = self.parse_group()
                return div(numerator, denominator)
            if text == "sqrt":
                return Sqrt(self.parse_group())
            if text == "deriv":
                self.expect_op("{")
                dependent = self.parse_symbol()
                self.expect_op("}")
                self.expect_op("{")
                independent = self.parse_symbol()
                self.expect_op("}")
                return Derivative(dependent, independent)
            if text == "sum":
                return self.parse_sum()
            # Greek letter identifier.
            return Identifier(self.finish_symbol(text))
        if kind == "letter":
            return Identifier(self.finish_symbol(text))
        if kind == "op" and text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        if kind == "op" and text == "{":
            inner = self.parse_expr()
            self.expect_op("}")
            return inner
        raise ParseError(f"unexpected token {text!r}", position=pos)

    def parse_sum(self) -> Expression:
        self.expect_op("_")
        self.expect_op("{")
        index = self.parse_symbol()
        self.expect_op("=")
        lower = self.parse_expr()
        self.expect_op("}")
        self.expect_op("^")
        if self.at_op("{"):
            self.next()
            upper = self.parse_expr()
            self.expect_op("}")
        else:
            upper = self.parse_primary()
        # The summand is the product immediately following the bounds.
        body = self.parse_term()
        return Sum(index, lower, upper, body)

    def parse_symbol(self) -> Symbol:
        tok = self.next()
        kind, text, pos = tok
        if kind == "letter":
            return self.finish_symbol(text)
        if kind == "macro" and text in GREEK_NAMES:
            return self.finish_symbol(text)
        raise ParseError(f"expected an identifier, found {text!r}", position=pos)

    def finish_symbol(self, base: str) -> Symbol:
        if not self.at_op("_"):
            return Symbol(base)
        self.next()
        tok = self.next()
        if tok[0] == "op" and tok[1] == "{":
            parts: list[str] = []
            while True:
                inner = self.peek()
                if inner is None:
                    raise ParseError("unterminated subscript")
                self.next()
                if inner[0] == "op" and inner[1] == "}":
                    break
                parts.append(inner[1])
            if not parts:
                raise ParseError("empty subscript")
            return Symbol(base, "".join(parts))
        if tok[0] in ("letter", "num"):
            return Symbol(base, tok[1])
        if tok[0] == "macro" and tok[1] in GREEK_NAMES:
            return Symbol(base, tok[1])
        raise ParseError(f"bad subscript after {base!r}", position=tok[2])


def _split_at_equality(tokens: list[tuple[str, str, int]]):
    """Split at the single top-level '='; bounds like \\sum_{i=1} do not count."""
    depth = 0
    positions: list[int] = []
    for i, (kind, text, _) in enumerate(tokens):
        if kind == "op" and text in "{(":
            depth += 1
        elif kind == "op" and text in "})":
            depth -= 1
        elif kind == "op" and text == "=" and depth == 0:
            positions.append(i)
    if len(positions) == 0:
        raise ParseError("formula has no equality sign")
    if len(positions) > 1:
        raise MultipleEqualitySigns(len(positions))
    split = positions[0]
    return tokens[:split], tokens[split + 1 :]


def _parse_tokens(tokens: list[tuple[str, str, int]]) -> Expression:
    parser = _LatexParser(tokens)
    try:
        node = parser.parse_expr()
    except DivisionByZero:
        # a literal zero denominator is malformed input, not an evaluation
        raise ParseError("division by a literal zero") from None
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(f"trailing input {trailing[1]!r}", position=trailing[2])
    return node


def parse_latex(cleaned: str) -> Equation:
    """Parse a cleaned formula string into an Equation.

    Raises ParseError for anything outside the grammar (the offending macro
    is named) and MultipleEqualitySigns when more than one top-level ``=``
    appears.
    """
    tokens = _tokenize(cleaned)
    lhs_tokens, rhs_tokens = _split_at_equality(tokens)
    if not lhs_tokens or not rhs_tokens:
        raise ParseError("equality sign with an empty side")
    return Equation(_parse_tokens(lhs_tokens), _parse_tokens(rhs_tokens))


def translate(latex: str, heuristic_derivatives: bool = False) -> tuple[Equation, CleaningReport]:
    """Clean then parse; the one-call form used by the pipeline."""
    report = clean_latex(latex, heuristic_derivatives=heuristic_derivatives)
    return parse_latex(report.cleaned), report
