"""Quizzability checking and formula rearrangement.

A formula qualifies for question generation when it has a single
identifier on the left, a right-hand side that is not the constant zero,
at least one right-hand identifier distinct from the left one, and no
derivative, bounded-sum or opaque-function nodes on the right.  A bare
identity between two identifiers sharing a base (a conservation statement
like ``p_{tot,1} = p_{tot,2}``) expresses no functional linkage and is
rejected, while ``x = y`` relates two different quantities and is fine.

Rearrangement works purely by inverting the operator path from the
equation root down to the target identifier: addition becomes
subtraction, multiplication division, integer powers become roots (the
principal branch for even powers), square roots become squares.  A target
in an exponent has no inverse here (no logarithms), and a target that
occurs more than once is skipped rather than solved, both recorded in the
skipped-symbols report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .expr_core import (
    Add,
    Derivative,
    Equation,
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
    add,
    contains_node,
    count_occurrences,
    div,
    free_identifiers,
    from_fraction,
    invert,
    mul,
    pow_,
)


class QuizReason(str, Enum):
    OK = "OK"
    NoSingleLhsIdentifier = "NoSingleLhsIdentifier"
    RhsIsZero = "RhsIsZero"
    NoFunctionalLinkage = "NoFunctionalLinkage"
    MultipleEqualities = "MultipleEqualities"
    ContainsDerivative = "ContainsDerivative"
    ContainsUnevaluatable = "ContainsUnevaluatable"
    TargetOccursMultiply = "TargetOccursMultiply"


@dataclass(frozen=True)
class QuizzabilityVerdict:
    quizzable: bool
    reason: QuizReason

    def __post_init__(self):
        if self.quizzable != (self.reason == QuizReason.OK):
            raise ValueError("quizzable iff reason is OK")

    @classmethod
    def ok(cls) -> "QuizzabilityVerdict":
        return cls(True, QuizReason.OK)

    @classmethod
    def rejected(cls, reason: QuizReason) -> "QuizzabilityVerdict":
        return cls(False, reason)


class SolverError(Exception):
    pass


class NotQuizzable(SolverError):
    def __init__(self, verdict: QuizzabilityVerdict):
        super().__init__(f"formula is not quizzable: {verdict.reason.value}")
        self.verdict = verdict


class UnsupportedInverse(SolverError):
    def __init__(self, node: Expression, detail: str):
        super().__init__(f"cannot invert {type(node).__name__}: {detail}")
        self.node = node


class TargetOccursMultiplyError(SolverError):
    def __init__(self, symbol: Symbol):
        super().__init__(f"{symbol} occurs more than once; isolation by inversion needs one occurrence")
        self.symbol = symbol


class NoRearrangementsFound(SolverError):
    pass


SKIP_MULTIPLE = "TargetOccursMultiply"
SKIP_UNSUPPORTED = "UnsupportedInverse"


@dataclass(frozen=True)
class RearrangementSet:
    original: Equation
    solved_for: dict[Symbol, Equation]
    skipped: dict[Symbol, str] = field(default_factory=dict)


def check_quizzable(eq: Equation) -> QuizzabilityVerdict:
    """Decide whether an equation admits question generation.

    The MultipleEqualities reason never originates here: a formula with two
    equality signs fails at parse time and is mapped to that reason by the
    caller.
    """
    if not isinstance(eq.lhs, Identifier):
        return QuizzabilityVerdict.rejected(QuizReason.NoSingleLhsIdentifier)
    if eq.rhs == Integer(0):
        return QuizzabilityVerdict.rejected(QuizReason.RhsIsZero)
    if contains_node(eq.rhs, (Derivative,)):
        return QuizzabilityVerdict.rejected(QuizReason.ContainsDerivative)
    if contains_node(eq.rhs, (Sum, Function)):
        return QuizzabilityVerdict.rejected(QuizReason.ContainsUnevaluatable)
    lhs_symbol = eq.lhs.symbol
    rhs_symbols = free_identifiers(eq.rhs)
    if not any(sym != lhs_symbol for sym in rhs_symbols):
        return QuizzabilityVerdict.rejected(QuizReason.NoFunctionalLinkage)
    if isinstance(eq.rhs, Identifier) and eq.rhs.symbol.base == lhs_symbol.base:
        # Same quantity on both sides, only the subscript differs: a
        # conservation statement, not a function of other quantities.
        return QuizzabilityVerdict.rejected(QuizReason.NoFunctionalLinkage)
    return QuizzabilityVerdict.ok()


def _contains(e: Expression, symbol: Symbol) -> bool:
    return count_occurrences(e, symbol) > 0


def _negated(e: Expression) -> Expression:
    return e.child if isinstance(e, Neg) else Neg(e)


def _literal(e: Expression) -> Fraction | None:
    if isinstance(e, Integer):
        return Fraction(e.value)
    if isinstance(e, Rational):
        return Fraction(e.numerator, e.denominator)
    return None


def isolate(eq: Equation, target: Symbol) -> Equation:
    """Solve for ``target`` by walking the inverse-operator path.

    Requires the target to occur exactly once in the whole equation.
    """
    if count_occurrences(eq, target) > 1:
        raise TargetOccursMultiplyError(target)
    if isinstance(eq.lhs, Identifier) and eq.lhs.symbol == target:
        return eq
    if not _contains(eq.rhs, target):
        raise UnsupportedInverse(eq.rhs, f"{target} does not occur on the right")
    expr: Expression = eq.rhs
    acc: Expression = eq.lhs
    while not (isinstance(expr, Identifier) and expr.symbol == target):
        if isinstance(expr, Add):
            inner = [c for c in expr.children if _contains(c, target)]
            others = [c for c in expr.children if not _contains(c, target)]
            acc = add(acc, *(_negated(o) for o in others))
            expr = inner[0]
        elif isinstance(expr, Mul):
            inner = [c for c in expr.children if _contains(c, target)]
            others = [c for c in expr.children if not _contains(c, target)]
            divisor = others[0] if len(others) == 1 else mul(*others)
            acc = div(acc, divisor)
            expr = inner[0]
        elif isinstance(expr, Pow):
            if _contains(expr.exponent, target):
                raise UnsupportedInverse(expr, "target sits in an exponent (no logarithms)")
            exponent = _literal(expr.exponent)
            if exponent is None or exponent == 0:
                raise UnsupportedInverse(expr, "non-literal or zero exponent")
            inverse_exponent = 1 / exponent
            if exponent == 2:
                acc = Sqrt(acc)
            elif inverse_exponent == -1:
                acc = invert(acc)
            elif inverse_exponent < 0:
                acc = pow_(invert(acc), from_fraction(-inverse_exponent))
            else:
                acc = pow_(acc, from_fraction(inverse_exponent))
            expr = expr.base
        elif isinstance(expr, Sqrt):
            acc = pow_(acc, Integer(2))
            expr = expr.child
        elif isinstance(expr, Neg):
            acc = _negated(acc)
            expr = expr.child
        else:
            raise UnsupportedInverse(expr, "no inverse operation for this node")
    return Equation(Identifier(target), acc)


def rearrange_all(eq: Equation) -> RearrangementSet:
    """Solve for every identifier that occurs exactly once.

    Multi-occurrence identifiers and exponent-position targets land in the
    skipped report rather than failing the whole set.  Raises NotQuizzable
    when the verdict is not OK, and NoRearrangementsFound in the degenerate
    case where nothing at all could be solved.
    """
    verdict = check_quizzable(eq)
    if not verdict.quizzable:
        raise NotQuizzable(verdict)
    lhs_symbol = eq.lhs.symbol
    solved: dict[Symbol, Equation] = {}
    skipped: dict[Symbol, str] = {}
    for symbol in free_identifiers(eq):
        if count_occurrences(eq, symbol) > 1:
            skipped[symbol] = SKIP_MULTIPLE
            continue
        if symbol == lhs_symbol:
            solved[symbol] = eq
            continue
        try:
            solved[symbol] = isolate(eq, symbol)
        except UnsupportedInverse:
            skipped[symbol] = SKIP_UNSUPPORTED
    if not solved:
        raise NoRearrangementsFound("no identifier could be isolated")
    return RearrangementSet(original=eq, solved_for=solved, skipped=skipped)


def count_question_space(rset: RearrangementSet, value_range: tuple[int, int]) -> int:
    """Number of distinct (target, assignment) pairs over an integer range.

    Each rearrangement contributes |range| to the power of the number of
    identifiers on its right-hand side.
    """
    lo, hi = value_range
    if hi < lo:
        raise ValueError(f"empty value range [{lo}, {hi}]")
    width = hi - lo + 1
    return sum(
        width ** len(free_identifiers(solved.rhs))
        for solved in rset.solved_for.values()
    )
