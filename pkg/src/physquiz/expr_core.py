"""Expression trees with exact rational arithmetic.

The node grammar is deliberately small: integers, rationals, identifiers,
n-ary sums and products, powers, negation, square roots, derivatives,
bounded sums and opaque function applications.  Trees are immutable and
compare structurally; Add and Mul children compare as multisets so that
algebraically reordered products still count as the same tree.

Division is not a node.  ``div(a, b)`` builds ``Mul(a, Pow(b, -1))`` and the
renderer recognises that shape and prints ``a / b`` again.  Negation is kept
as an explicit ``Neg`` node for rendering; the solver normalises it away on
the fly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

GREEK_NAMES = frozenset(
    """alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu nu
    xi omicron pi rho sigma tau upsilon phi chi psi omega
    Gamma Theta Lambda Xi Pi Sigma Upsilon Phi Psi Omega""".split()
)

# Keywords understood by the plain-text parser in function position.
_KEYWORDS = frozenset({"sqrt", "deriv", "sum"})


class ExprError(Exception):
    """Base class for expression-layer failures."""


class EvaluationError(ExprError):
    pass


class DivisionByZero(EvaluationError):
    pass


class MissingAssignment(EvaluationError):
    def __init__(self, symbol: "Symbol"):
        super().__init__(f"no value assigned to {symbol}")
        self.symbol = symbol


class UnevaluatableNode(EvaluationError):
    """Raised for nodes with no numeric semantics (Derivative, Sum, Function)."""


class NegativeRadicand(EvaluationError):
    """Even root of a negative quantity; complex results are out of scope."""


class InfixParseError(ExprError):
    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Symbol:
    """An identifier name: a base letter or Greek word plus an optional subscript.

    ``Symbol("v")`` renders as ``v``; ``Symbol("p", "tot,1")`` renders as
    ``p_{tot,1}``.  Two symbols are the same identifier iff base and
    subscript both match.
    """

    base: str
    subscript: str | None = None

    def __post_init__(self):
        if not self.base:
            raise ValueError("symbol base must be non-empty")

    def __str__(self) -> str:
        if self.subscript is None:
            return self.base
        if len(self.subscript) == 1 and self.subscript.isalnum():
            return f"{self.base}_{self.subscript}"
        return f"{self.base}_{{{self.subscript}}}"


class Expression:
    """Common base class; concrete nodes are frozen dataclasses."""

    __slots__ = ()


@dataclass(frozen=True)
class Integer(Expression):
    value: int


@dataclass(frozen=True)
class Rational(Expression):
    """Reduced fraction with positive denominator. Use ``rational()`` to build."""

    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("rational literal must be reduced")


@dataclass(frozen=True)
class Identifier(Expression):
    symbol: Symbol


def _flatten(cls, children: Iterable[Expression]) -> tuple[Expression, ...]:
    out: list[Expression] = []
    for child in children:
        if isinstance(child, cls):
            out.extend(child.children)
        else:
            out.append(child)
    return tuple(out)


class _Nary(Expression):
    __slots__ = ("children",)

    def __init__(self, *children: Expression):
        flat = _flatten(type(self), children)
        if len(flat) < 2:
            raise ValueError(f"{type(self).__name__} needs at least two children")
        object.__setattr__(self, "children", flat)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if len(self.children) != len(other.children):
            return False
        # Multiset comparison: reordered factors/terms are the same tree.
        remaining = list(other.children)
        for child in self.children:
            try:
                remaining.remove(child)
            except ValueError:
                return False
        return True

    def __hash__(self):
        return hash((type(self).__name__, tuple(sorted(hash(c) for c in self.children))))

    def __repr__(self):
        inner = ", ".join(repr(c) for c in self.children)
        return f"{type(self).__name__}({inner})"


class Add(_Nary):
    pass


class Mul(_Nary):
    pass


@dataclass(frozen=True)
class Pow(Expression):
    base: Expression
    exponent: Expression


@dataclass(frozen=True)
class Neg(Expression):
    child: Expression


@dataclass(frozen=True)
class Sqrt(Expression):
    child: Expression


@dataclass(frozen=True)
class Derivative(Expression):
    dependent: Symbol
    independent: Symbol


@dataclass(frozen=True)
class Sum(Expression):
    index: Symbol
    lower: Expression
    upper: Expression
    body: Expression


@dataclass(frozen=True)
class Function(Expression):
    name: str
    args: tuple[Expression, ...]


@dataclass(frozen=True)
class Equation:
    lhs: Expression
    rhs: Expression


# ---------------------------------------------------------------------------
# Smart constructors


def integer(value: int) -> Integer:
    return Integer(value)


def rational(numerator: int, denominator: int) -> Expression:
    if denominator == 0:
        raise DivisionByZero("rational with zero denominator")
    if denominator < 0:
        numerator, denominator = -numerator, -denominator
    g = math.gcd(numerator, denominator)
    numerator //= g
    denominator //= g
    if denominator == 1:
        return Integer(numerator)
    return Rational(numerator, denominator)


def from_fraction(f: Fraction) -> Expression:
    return rational(f.numerator, f.denominator)


def ident(base: str, subscript: str | None = None) -> Identifier:
    return Identifier(Symbol(base, subscript))


def _is_inverse_factor(e: Expression) -> bool:
    if isinstance(e, Pow):
        if isinstance(e.exponent, Integer) and e.exponent.value < 0:
            return True
        if isinstance(e.exponent, Rational) and e.exponent.numerator < 0:
            return True
    return False


def add(*children: Expression) -> Expression:
    flat = _flatten(Add, children)
    if len(flat) == 1:
        return flat[0]
    if not flat:
        return Integer(0)
    return Add(*flat)


def mul(*children: Expression) -> Expression:
    flat = _flatten(Mul, children)
    # Plain factors before inverse factors, stable within each group, so that
    # the renderer sees numerators first.
    flat = tuple(c for c in flat if not _is_inverse_factor(c)) + tuple(
        c for c in flat if _is_inverse_factor(c)
    )
    if len(flat) == 1:
        return flat[0]
    if not flat:
        return Integer(1)
    return Mul(*flat)


def neg(child: Expression) -> Expression:
    return Neg(child)


def pow_(base: Expression, exponent: Expression) -> Expression:
    if isinstance(exponent, Integer) and exponent.value == 1:
        return base
    return Pow(base, exponent)


def sqrt(child: Expression) -> Sqrt:
    return Sqrt(child)


def _negated_literal(e: Expression) -> Expression:
    if isinstance(e, Integer):
        return Integer(-e.value)
    if isinstance(e, Rational):
        return rational(-e.numerator, e.denominator)
    raise TypeError(e)


def invert(e: Expression) -> Expression:
    """Multiplicative inverse, folding literals and power shapes."""
    if isinstance(e, Integer):
        if e.value == 0:
            raise DivisionByZero("division by constant zero")
        return rational(1, e.value)
    if isinstance(e, Rational):
        return rational(e.denominator, e.numerator)
    if isinstance(e, Pow) and isinstance(e.exponent, (Integer, Rational)):
        return pow_(e.base, _negated_literal(e.exponent))
    if isinstance(e, Sqrt):
        return Pow(e.child, Rational(-1, 2))
    if isinstance(e, Mul):
        return mul(*(invert(c) for c in e.children))
    if isinstance(e, Neg):
        return Neg(invert(e.child))
    return Pow(e, Integer(-1))


def div(numerator: Expression, denominator: Expression) -> Expression:
    if isinstance(numerator, Integer) and isinstance(denominator, Integer):
        return rational(numerator.value, denominator.value)
    inverse = invert(denominator)
    if isinstance(numerator, Integer) and numerator.value == 1:
        return inverse
    return mul(numerator, inverse)


def sub(lhs: Expression, rhs: Expression) -> Expression:
    return add(lhs, Neg(rhs))


# ---------------------------------------------------------------------------
# Queries


def free_identifiers(node: Expression | Equation) -> list[Symbol]:
    """Symbols in first-occurrence order, left to right.

    Sum indices are bound and excluded; symbols referenced by a Derivative
    count as occurrences.
    """
    seen: list[Symbol] = []

    def note(sym: Symbol):
        if sym not in seen:
            seen.append(sym)

    def walk(e: Expression, bound: frozenset[Symbol]):
        if isinstance(e, Identifier):
            if e.symbol not in bound:
                note(e.symbol)
        elif isinstance(e, (Add, Mul)):
            for c in e.children:
                walk(c, bound)
        elif isinstance(e, Pow):
            walk(e.base, bound)
            walk(e.exponent, bound)
        elif isinstance(e, (Neg, Sqrt)):
            walk(e.child, bound)
        elif isinstance(e, Derivative):
            for sym in (e.dependent, e.independent):
                if sym not in bound:
                    note(sym)
        elif isinstance(e, Sum):
            inner = bound | {e.index}
            walk(e.lower, bound)
            walk(e.upper, bound)
            walk(e.body, inner)
        elif isinstance(e, Function):
            for a in e.args:
                walk(a, bound)

    if isinstance(node, Equation):
        walk(node.lhs, frozenset())
        walk(node.rhs, frozenset())
    else:
        walk(node, frozenset())
    return seen


def count_occurrences(node: Expression | Equation, symbol: Symbol) -> int:
    total = 0

    def walk(e: Expression):
        nonlocal total
        if isinstance(e, Identifier):
            if e.symbol == symbol:
                total += 1
        elif isinstance(e, (Add, Mul)):
            for c in e.children:
                walk(c)
        elif isinstance(e, Pow):
            walk(e.base)
            walk(e.exponent)
        elif isinstance(e, (Neg, Sqrt)):
            walk(e.child)
        elif isinstance(e, Derivative):
            total += int(e.dependent == symbol) + int(e.independent == symbol)
        elif isinstance(e, Sum):
            if e.index != symbol:
                walk(e.lower)
                walk(e.upper)
                walk(e.body)
        elif isinstance(e, Function):
            for a in e.args:
                walk(a)

    if isinstance(node, Equation):
        walk(node.lhs)
        walk(node.rhs)
    else:
        walk(node)
    return total


def contains_node(node: Expression, kinds: tuple[type, ...]) -> bool:
    if isinstance(node, kinds):
        return True
    if isinstance(node, (Add, Mul)):
        return any(contains_node(c, kinds) for c in node.children)
    if isinstance(node, Pow):
        return contains_node(node.base, kinds) or contains_node(node.exponent, kinds)
    if isinstance(node, (Neg, Sqrt)):
        return contains_node(node.child, kinds)
    if isinstance(node, Sum):
        return (
            contains_node(node.lower, kinds)
            or contains_node(node.upper, kinds)
            or contains_node(node.body, kinds)
        )
    if isinstance(node, Function):
        return any(contains_node(a, kinds) for a in node.args)
    return False


# ---------------------------------------------------------------------------
# Evaluation

# Roots that are not exact are approximated to this many decimal digits and
# the result is flagged; downstream comparisons use far looser tolerances.
_ROOT_DIGITS = 40


@dataclass(frozen=True)
class EvalResult:
    value: Fraction
    approximate: bool = False


def _int_nth_root(n: int, k: int) -> int:
    """Floor of the k-th root of n >= 0."""
    if n < 0:
        raise ValueError("negative radicand")
    if n == 0:
        return 0
    if k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << (-(-n.bit_length() // k))
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def _root(value: Fraction, k: int) -> EvalResult:
    """Principal real k-th root of a rational."""
    if value < 0:
        if k % 2 == 0:
            raise NegativeRadicand(f"even root of negative value {value}")
        inner = _root(-value, k)
        return EvalResult(-inner.value, inner.approximate)
    num_root = _int_nth_root(value.numerator, k)
    den_root = _int_nth_root(value.denominator, k)
    if num_root**k == value.numerator and den_root**k == value.denominator:
        return EvalResult(Fraction(num_root, den_root), False)
    scale = 10**_ROOT_DIGITS
    scaled = (value.numerator * scale**k) // value.denominator
    return EvalResult(Fraction(_int_nth_root(scaled, k), scale), True)


def _pow(base: EvalResult, exponent: Fraction) -> EvalResult:
    if exponent.denominator == 1:
        n = exponent.numerator
        if base.value == 0 and n < 0:
            raise DivisionByZero("zero raised to a negative power")
        return EvalResult(base.value**n, base.approximate)
    raised = base.value**exponent.numerator if base.value != 0 else Fraction(0)
    if base.value == 0 and exponent.numerator < 0:
        raise DivisionByZero("zero raised to a negative power")
    rooted = _root(raised, exponent.denominator)
    return EvalResult(rooted.value, rooted.approximate or base.approximate)


def evaluate(node: Expression, assignment: Mapping[Symbol, Fraction | int]) -> EvalResult:
    """Evaluate under an identifier assignment, exactly where possible.

    All arithmetic is rational.  Only inexact roots introduce approximation
    and set the ``approximate`` flag on the result.

    Raises:
        MissingAssignment: an identifier has no value.
        DivisionByZero: a zero denominator or zero base with negative power.
        UnevaluatableNode: the tree contains Derivative, Sum or Function.
        NegativeRadicand: an even root of a negative value.
    """
    if isinstance(node, Integer):
        return EvalResult(Fraction(node.value))
    if isinstance(node, Rational):
        return EvalResult(Fraction(node.numerator, node.denominator))
    if isinstance(node, Identifier):
        if node.symbol not in assignment:
            raise MissingAssignment(node.symbol)
        return EvalResult(Fraction(assignment[node.symbol]))
    if isinstance(node, Add):
        total = Fraction(0)
        approx = False
        for c in node.children:
            r = evaluate(c, assignment)
            total += r.value
            approx = approx or r.approximate
        return EvalResult(total, approx)
    if isinstance(node, Mul):
        product = Fraction(1)
        approx = False
        for c in node.children:
            r = evaluate(c, assignment)
            product *= r.value
            approx = approx or r.approximate
        return EvalResult(product, approx)
    if isinstance(node, Pow):
        exp = evaluate(node.exponent, assignment)
        base = evaluate(node.base, assignment)
        try:
            return _pow(base, exp.value)
        except ZeroDivisionError:
            raise DivisionByZero("zero raised to a negative power") from None
    if isinstance(node, Neg):
        r = evaluate(node.child, assignment)
        return EvalResult(-r.value, r.approximate)
    if isinstance(node, Sqrt):
        r = evaluate(node.child, assignment)
        rooted = _root(r.value, 2)
        return EvalResult(rooted.value, rooted.approximate or r.approximate)
    if isinstance(node, (Derivative, Sum, Function)):
        raise UnevaluatableNode(f"{type(node).__name__} has no numeric value")
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Rendering

_P_ADD = 1
_P_MUL = 2
_P_POW = 3
_P_ATOM = 4

SubstitutionHook = Callable[[Symbol], "str | None"]


def _paren(text: str) -> str:
    return f"({text})"


def _needs_atom_parens(text: str, prec: int) -> bool:
    return prec < _P_ATOM or " " in text


def render_infix(node: Expression, substitute: SubstitutionHook | None = None) -> str:
    """Deterministic plain-text rendering with explicit ``*`` everywhere.

    ``substitute`` replaces identifier text (used for value substitution in
    explanations); replacements containing spaces are parenthesised only
    where ambiguity would otherwise arise (power bases, denominators).
    """

    def render(e: Expression) -> tuple[str, int]:
        if isinstance(e, Integer):
            return str(e.value), _P_ATOM if e.value >= 0 else _P_ADD
        if isinstance(e, Rational):
            text = f"{e.numerator}/{e.denominator}"
            return text, _P_MUL if e.numerator >= 0 else _P_ADD
        if isinstance(e, Identifier):
            if substitute is not None:
                replacement = substitute(e.symbol)
                if replacement is not None:
                    return replacement, _P_ATOM
            return str(e.symbol), _P_ATOM
        if isinstance(e, Add):
            return render_sum(e)
        if isinstance(e, Mul):
            return render_product(e)
        if isinstance(e, Pow):
            return render_power(e)
        if isinstance(e, Neg):
            text, prec = render(e.child)
            if prec <= _P_ADD:
                text = _paren(text)
            return f"-{text}", _P_ADD
        if isinstance(e, Sqrt):
            inner, _ = render(e.child)
            return f"sqrt({inner})", _P_ATOM
        if isinstance(e, Derivative):
            return f"deriv({e.dependent}, {e.independent})", _P_ATOM
        if isinstance(e, Sum):
            lower, _ = render(e.lower)
            upper, _ = render(e.upper)
            body, _ = render(e.body)
            return f"sum({e.index}, {lower}, {upper}, {body})", _P_ATOM
        if isinstance(e, Function):
            args = ", ".join(render(a)[0] for a in e.args)
            return f"{e.name}({args})", _P_ATOM
        raise TypeError(f"not an expression node: {e!r}")

    def render_sum(e: Add) -> tuple[str, int]:
        parts: list[str] = []
        for i, child in enumerate(e.children):
            if isinstance(child, Neg):
                text, prec = render(child.child)
                if prec <= _P_ADD:
                    text = _paren(text)
                parts.append(f"-{text}" if i == 0 else f"- {text}")
            else:
                text, prec = render(child)
                if prec <= _P_ADD and i > 0:
                    text = _paren(text)
                    parts.append(f"+ {text}")
                elif i == 0:
                    parts.append(text)
                else:
                    parts.append(f"+ {text}")
        return " ".join(parts), _P_ADD

    def split_factor(child: Expression) -> tuple[bool, Expression]:
        """(is_denominator, positive-exponent form)."""
        if isinstance(child, Pow):
            exp = child.exponent
            if isinstance(exp, Integer) and exp.value < 0:
                flipped = _negated_literal(exp)
                return True, child.base if flipped == Integer(1) else Pow(child.base, flipped)
            if isinstance(exp, Rational) and exp.numerator < 0:
                return True, Pow(child.base, _negated_literal(exp))
        return False, child

    def render_mul_operand(child: Expression, first: bool) -> str:
        if isinstance(child, Rational):
            text, _ = render(child)
            return text if first else _paren(text)
        text, prec = render(child)
        if prec < _P_MUL:
            return _paren(text)
        return text

    def render_product(e: Mul) -> tuple[str, int]:
        numerators: list[Expression] = []
        denominators: list[Expression] = []
        for child in e.children:
            is_den, body = split_factor(child)
            if is_den:
                denominators.append(body)
            else:
                numerators.append(child)
        if numerators:
            num_text = " * ".join(
                render_mul_operand(c, i == 0) for i, c in enumerate(numerators)
            )
        else:
            num_text = "1"
        if not denominators:
            return num_text, _P_MUL
        if len(denominators) == 1:
            text, prec = render(denominators[0])
            den_text = _paren(text) if prec < _P_POW or " " in text else text
        else:
            den_text = _paren(" * ".join(render_mul_operand(c, False) for c in denominators))
        return f"{num_text} / {den_text}", _P_MUL

    def render_power(e: Pow) -> tuple[str, int]:
        is_den, body = split_factor(e)
        if is_den:
            # Bare negative power prints as a reciprocal.
            text, prec = render(body)
            if prec < _P_POW or " " in text:
                text = _paren(text)
            return f"1 / {text}", _P_MUL
        base_text, base_prec = render(e.base)
        if _needs_atom_parens(base_text, base_prec):
            base_text = _paren(base_text)
        exp_text, exp_prec = render(e.exponent)
        if _needs_atom_parens(exp_text, exp_prec) or isinstance(e.exponent, Rational):
            exp_text = _paren(exp_text)
        return f"{base_text}^{exp_text}", _P_POW

    return render(node)[0]


def render_equation(eq: Equation, substitute: SubstitutionHook | None = None) -> str:
    return f"{render_infix(eq.lhs)} = {render_infix(eq.rhs, substitute)}"


# ---------------------------------------------------------------------------
# Plain-text parsing (the inverse of render_infix)


_TOKEN_OPS = set("+-*/^=(){}_,")


def _tokenize_infix(text: str) -> list[tuple[str, str, int]]:
    """Tokens as (kind, text, position); kind in {num, name, word, op}."""
    tokens: list[tuple[str, str, int]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
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
            j = i
            while j < n and text[j].isalpha():
                j += 1
            run = text[i:j]
            if run in _KEYWORDS or run in GREEK_NAMES:
                tokens.append(("word", run, i))
            else:
                for k, letter in enumerate(run):
                    tokens.append(("name", letter, i + k))
            i = j
            continue
        if ch in _TOKEN_OPS:
            tokens.append(("op", ch, i))
            i += 1
            continue
        raise InfixParseError(f"unexpected character {ch!r}", i)
    return tokens


class _InfixParser:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise InfixParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        tok = self.next()
        if tok[0] != "op" or tok[1] != op:
            raise InfixParseError(f"expected {op!r}, found {tok[1]!r}", tok[2])

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] == op

    # expr := ['-'] term (('+'|'-') term)*
    def parse_expr(self) -> Expression:
        terms: list[Expression] = []
        if self.at_op("-"):
            self.next()
            terms.append(Neg(self.parse_term()))
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
        if kind in ("num", "name", "word"):
            return True
        return kind == "op" and text == "("

    # term := factor (('*'|'/'| juxtaposition) factor)*
    def parse_term(self) -> Expression:
        factors: list[Expression] = [self.parse_factor()]
        while True:
            if self.at_op("*"):
                self.next()
                factors.append(self.parse_factor())
            elif self.at_op("/"):
                self.next()
                divisor = self.parse_factor()
                if len(factors) == 1 and factors[0] == Integer(1):
                    factors = [invert(divisor)]
                elif (
                    len(factors) == 1
                    and isinstance(factors[0], Integer)
                    and isinstance(divisor, Integer)
                ):
                    factors = [div(factors[0], divisor)]
                else:
                    factors.append(invert(divisor))
            elif self._starts_factor():
                factors.append(self.parse_factor())
            else:
                break
        return mul(*factors) if len(factors) > 1 else factors[0]

    # factor := primary ('^' exponent)*
    def parse_factor(self) -> Expression:
        node = self.parse_primary()
        while self.at_op("^"):
            self.next()
            node = pow_(node, self.parse_exponent())
        return node

    def parse_exponent(self) -> Expression:
        if self.at_op("-"):
            self.next()
            return Neg(self.parse_primary())
        return self.parse_primary()

    def parse_primary(self) -> Expression:
        tok = self.next()
        kind, text, pos = tok
        if kind == "num":
            if "." in text:
                return from_fraction(Fraction(text))
            return Integer(int(text))
        if kind == "word" and text == "sqrt":
            self.expect_op("(")
            inner = self.parse_expr()
            self.expect_op(")")
            return Sqrt(inner)
        if kind == "word" and text == "deriv":
            self.expect_op("(")
            dep = self.parse_symbol()
            self.expect_op(",")
            indep = self.parse_symbol()
            self.expect_op(")")
            return Derivative(dep, indep)
        if kind == "word" and text == "sum":
            self.expect_op("(")
            index = self.parse_symbol()
            self.expect_op(",")
            lower = self.parse_expr()
            self.expect_op(",")
            upper = self.parse_expr()
            self.expect_op(",")
            body = self.parse_expr()
            self.expect_op(")")
            return Sum(index, lower, upper, body)
        if kind in ("name", "word"):
            symbol = self.finish_symbol(text)
            if self.at_op("("):
                # Explicit call syntax; plain adjacency multiplies instead.
                self.next()
                args = [self.parse_expr()]
                while self.at_op(","):
                    self.next()
                    args.append(self.parse_expr())
                self.expect_op(")")
                return Function(str(symbol), tuple(args))
            return Identifier(symbol)
        if kind == "op" and text == "(":
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise InfixParseError(f"unexpected token {text!r}", pos)

    def parse_symbol(self) -> Symbol:
        tok = self.next()
        if tok[0] not in ("name", "word"):
            raise InfixParseError(f"expected identifier, found {tok[1]!r}", tok[2])
        return self.finish_symbol(tok[1])

    def finish_symbol(self, base: str) -> Symbol:
        if not self.at_op("_"):
            return Symbol(base)
        self.next()
        tok = self.next()
        if tok[0] == "op" and tok[1] == "{":
            parts: list[str] = []
            while True:
                inner = self.next()
                if inner[0] == "op" and inner[1] == "}":
                    break
                parts.append(inner[1])
            return Symbol(base, "".join(parts))
        if tok[0] in ("name", "word", "num"):
            return Symbol(base, tok[1])
        raise InfixParseError(f"bad subscript after {base!r}", tok[2])


def parse_infix(text: str) -> Expression:
    """Parse the plain-text form produced by ``render_infix``."""
    tokens = _tokenize_infix(text)
    if any(t[0] == "op" and t[1] == "=" for t in tokens):
        raise InfixParseError("equality sign not allowed in an expression")
    parser = _InfixParser(tokens)
    node = parser.parse_expr()
    if parser.peek() is not None:
        tok = parser.peek()
        raise InfixParseError(f"trailing input {tok[1]!r}", tok[2])
    return node


def parse_infix_equation(text: str) -> Equation:
    """Parse the plain-text form produced by ``render_equation``."""
    halves = text.split("=")
    if len(halves) != 2:
        raise InfixParseError(f"expected exactly one '=', found {len(halves) - 1}")
    return Equation(parse_infix(halves[0]), parse_infix(halves[1]))
