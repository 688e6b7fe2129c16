"""Physics quiz engine: formula retrieval, rearrangement, question
generation, per-field answer grading, and worked explanations.

The subpackages compose in pipeline order: ``knowledge`` supplies
concept records, ``latex_frontend`` turns their formulas into
``expr_core`` equations, ``solver`` isolates each identifier,
``pipeline`` draws values and renders questions, ``grader`` judges
answers, and ``service``/``cli`` expose the whole engine over HTTP and
the command line.  ``harness`` measures every stage over a corpus.
"""

from .config import Settings, load_settings
from .dimensions import DimensionVector, UnitString, parse_isq, parse_unit_answer
from .expr_core import Equation, Symbol, parse_infix, render_equation, render_infix
from .grader import GradeReport, grade, parse_value
from .harness import EvalReport, StageFlags, evaluate_corpus
from .knowledge import (
    ConceptNotFound,
    ConceptRecord,
    FixtureStore,
    IdentifierInfo,
    LiveStore,
)
from .latex_frontend import clean_latex, parse_latex, translate
from .pipeline import QuizQuestion, generate_question, render_explanation
from .service import create_app
from .solver import check_quizzable, rearrange_all

__version__ = "0.1.0"

__all__ = [
    "ConceptNotFound",
    "ConceptRecord",
    "DimensionVector",
    "Equation",
    "EvalReport",
    "FixtureStore",
    "GradeReport",
    "IdentifierInfo",
    "LiveStore",
    "QuizQuestion",
    "Settings",
    "StageFlags",
    "Symbol",
    "UnitString",
    "check_quizzable",
    "clean_latex",
    "create_app",
    "evaluate_corpus",
    "generate_question",
    "grade",
    "load_settings",
    "parse_infix",
    "parse_isq",
    "parse_latex",
    "parse_unit_answer",
    "parse_value",
    "render_equation",
    "render_explanation",
    "render_infix",
    "translate",
    "__version__",
]
