"""HTTP API over the question pipeline.

All quiz state lives server-side in the session store, so the generate
response can describe the question without ever carrying the solution;
grading happens against the session's stored question.  Errors use a
stable ``{code, message}`` JSON shape at conventional status codes.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import Settings
from .grader import grade
from .knowledge import (
    AmbiguousLabel,
    ConceptNotFound,
    FixtureStore,
    LiveConfig,
    LiveStore,
    NetworkError,
    StoreError,
    record_to_dict,
)
from .latex_frontend import TranslationError
from .pipeline import (
    PipelineError,
    generate_question,
    load_default_template,
    render_explanation,
)
from .session import (
    InMemorySessionStore,
    SessionExpired,
    SessionStore,
    UnknownSession,
    deterministic_session_id,
)
from .solver import NotQuizzable

SCHEMA_VERSION = 1

UNIT_HINT = (
    "SI base symbols joined by spaces, '*' or '/', with integer '^' exponents "
    "(for example 'm s^-1' or 'm/s')"
)


class QuestionRequest(BaseModel):
    concept: str
    target: str | None = None
    seed: int | None = None
    value_range: tuple[int, int] | None = Field(default=None, alias="range")

    model_config = {"populate_by_name": True}


class QuestionResponse(BaseModel):
    schema_version: int
    session_id: str
    concept_qid: str
    concept_label: str
    question_text: str
    target_symbol: str
    target_name: str
    unit_hint: str


class AnswerRequest(BaseModel):
    session_id: str
    value: str
    unit: str
    reveal: bool = False


class ExplanationStep(BaseModel):
    label: str
    text: str


class ExplanationBody(BaseModel):
    reference: str
    steps: list[ExplanationStep]
    final_value: str
    final_unit: str


class AnswerResponse(BaseModel):
    schema_version: int
    session_id: str
    value_correct: bool
    unit_correct: bool
    messages: list[str]
    attempts: int
    explanation: ExplanationBody | None = None


def _error(status: int, code: str, message: str, **extra) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"code": code, "message": message, **extra}
    )


def build_store(settings: Settings):
    if settings.store == "live":
        return LiveStore(
            LiveConfig(
                api_url=settings.api_url,
                cache_dir=settings.cache_dir,
                cache_ttl_seconds=settings.cache_ttl_seconds,
            )
        )
    if settings.fixture == "bundled":
        return FixtureStore.bundled()
    return FixtureStore.from_file(settings.fixture)


def create_app(
    settings: Settings | None = None,
    store=None,
    sessions: SessionStore | None = None,
) -> FastAPI:
    settings = settings if settings is not None else Settings()
    store = store if store is not None else build_store(settings)
    sessions = (
        sessions
        if sessions is not None
        else InMemorySessionStore(ttl_seconds=settings.session_ttl_seconds)
    )
    template = (
        Path(settings.template_path).read_text(encoding="utf-8").strip()
        if settings.template_path
        else load_default_template()
    )

    app = FastAPI(title="physquiz", version="0.1.0")
    app.state.settings = settings
    app.state.store = store
    app.state.sessions = sessions

    @app.post("/api/v1/question", response_model=QuestionResponse)
    def post_question(body: QuestionRequest):
        concept = body.concept.strip()
        if not concept:
            return _error(400, "empty_concept", "concept must not be empty")
        value_range = body.value_range or settings.value_range
        try:
            record = store.lookup(concept)
            question = generate_question(
                record,
                target=body.target,
                value_range=value_range,
                seed=body.seed,
                template=template,
                heuristic_derivatives=settings.heuristic_derivatives,
            )
        except ConceptNotFound as err:
            return _error(404, "concept_not_found", str(err))
        except AmbiguousLabel as err:
            return _error(422, "ambiguous_label", str(err))
        except NetworkError as err:
            return _error(503, "upstream_unavailable", str(err))
        except StoreError as err:
            return _error(502, "store_error", str(err))
        except NotQuizzable as err:
            return _error(
                422, "non_quizzable", str(err), reason=err.verdict.reason.value
            )
        except TranslationError as err:
            return _error(422, "translation_failed", str(err))
        except PipelineError as err:
            return _error(422, "generation_failed", str(err))
        except ValueError as err:
            return _error(400, "invalid_request", str(err))

        session_id = None
        if body.seed is not None:
            session_id = deterministic_session_id(
                concept, body.target, body.seed, value_range
            )
        session = sessions.put(question, session_id=session_id)
        return QuestionResponse(
            schema_version=SCHEMA_VERSION,
            session_id=session.session_id,
            concept_qid=question.concept_qid,
            concept_label=question.concept_label,
            question_text=question.question_text,
            target_symbol=str(question.target.symbol),
            target_name=question.target.name,
            unit_hint=UNIT_HINT,
        )

    @app.post("/api/v1/answer", response_model=AnswerResponse)
    def post_answer(body: AnswerRequest):
        try:
            session = sessions.fetch(body.session_id)
        except UnknownSession as err:
            return _error(404, "unknown_session", str(err))
        except SessionExpired as err:
            return _error(410, "session_expired", str(err))
        attempts = sessions.record_attempt(body.session_id)
        question = session.question
        report = grade(
            body.value,
            body.unit,
            question.solution_value,
            question.solution_unit.dimension,
            settings.tolerance,
        )
        explanation = None
        if report.correct or body.reveal:
            rendered = render_explanation(question)
            explanation = ExplanationBody(
                reference=rendered.reference,
                steps=[ExplanationStep(label=l, text=t) for l, t in rendered.steps],
                final_value=rendered.final_value,
                final_unit=rendered.final_unit,
            )
        return AnswerResponse(
            schema_version=SCHEMA_VERSION,
            session_id=session.session_id,
            value_correct=report.value_correct,
            unit_correct=report.unit_correct,
            messages=list(report.messages),
            attempts=attempts,
            explanation=explanation,
        )

    @app.get("/api/v1/concepts/{query}")
    def get_concept(query: str):
        try:
            record = store.lookup(query)
        except ConceptNotFound as err:
            return _error(404, "concept_not_found", str(err))
        except AmbiguousLabel as err:
            return _error(422, "ambiguous_label", str(err))
        except NetworkError as err:
            return _error(503, "upstream_unavailable", str(err))
        except StoreError as err:
            return _error(502, "store_error", str(err))
        return {"schema_version": SCHEMA_VERSION, **record_to_dict(record)}

    @app.get("/api/v1/health")
    def get_health():
        concepts = len(store.records) if isinstance(store, FixtureStore) else None
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "store": settings.store,
            "concepts": concepts,
        }

    frontend = settings.frontend_dir
    if frontend and Path(frontend).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend, html=True), name="ui")
    return app
