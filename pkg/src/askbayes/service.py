"""REST service: survey CRUD plus live adaptive sessions.

The server is authoritative over question order: each session stores the
one question currently offered, and answers naming any other question are
rejected.  Re-submitting the exact last accepted (question, answer) pair
returns the cached response without touching state, so network retries
cannot double-apply evidence.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field as dataclass_field
from datetime import datetime, timezone

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .engine import (
    QuestionnaireModel,
    Session,
    SessionStatus,
    answer_question,
    explain,
    grade,
    marginal_risks,
    pick_question,
    start_session,
)
from .errors import (
    AskBayesError,
    InconsistentEvidenceError,
    SessionNotFoundError,
)
from .modelio import _parse, serialize_questionnaire
from .sessions import MemorySessionStore, SessionStore, record_from_session

API_VERSION = "1.0.0"


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _new_id() -> str:
    return uuid.uuid4().hex[:12]


# -- wire models -------------------------------------------------------------


class DiagnosticView(BaseModel):
    path: str
    code: str
    message: str


class SurveySummary(BaseModel):
    id: str
    title: str
    status: str
    created_at: str
    updated_at: str


class SurveyResource(SurveySummary):
    document: dict


class QuestionView(BaseModel):
    id: str
    text: str
    answers: list[str]


class NextResponse(BaseModel):
    session_id: str
    survey_id: str
    terminal: bool
    question: QuestionView | None = None
    stop_reason: str | None = None
    grade: float | None = None
    risks: dict[str, float] | None = None


class SessionCreated(BaseModel):
    session_id: str
    survey_id: str
    next: NextResponse


class AnswerSubmission(BaseModel):
    question: str
    answer: int = Field(ge=0)


class CandidateGain(BaseModel):
    question: str
    gain: float


class ExplainView(BaseModel):
    session_id: str
    survey_id: str
    skill_posteriors: dict[str, list[float]]
    joint_entropy: float
    stop_threshold: float
    stop_margin: float
    per_candidate: list[CandidateGain]


class TranscriptEntryView(BaseModel):
    question: str
    answer: int
    gain: float
    entropy_after: float


class ResultView(BaseModel):
    session_id: str
    survey_id: str
    stop_reason: str
    grade: float
    risks: dict[str, float]
    transcript: list[TranscriptEntryView]


# -- server state ------------------------------------------------------------


@dataclass
class _Survey:
    id: str
    model: QuestionnaireModel
    document: dict
    status: str  # draft | published
    created_at: str
    updated_at: str


@dataclass
class _LiveSession:
    id: str
    survey_id: str
    session: Session
    offered: str | None
    created_at: str
    last_submission: tuple[str, int] | None = None
    last_response: NextResponse | None = None
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


def create_app(
    session_store: SessionStore | None = None,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    """Build the service; state lives inside the returned app instance."""
    store = session_store if session_store is not None else MemorySessionStore()
    surveys: dict[str, _Survey] = {}
    sessions: dict[str, _LiveSession] = {}
    registry_lock = threading.RLock()

    app = FastAPI(
        title="Adaptive questionnaire service",
        version=API_VERSION,
        description=(
            "Survey CRUD and live adaptive sessions. The server picks each "
            "next question by information gain and stops on the entropy "
            "threshold; answers are idempotent per (question, answer) pair."
        ),
    )
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    # shared by the CLI to preload documents at startup
    app.state.surveys = surveys
    app.state.sessions = sessions
    app.state.store = store

    def _survey_or_404(survey_id: str) -> _Survey:
        try:
            return surveys[survey_id]
        except KeyError:
            raise HTTPException(404, f"survey {survey_id!r} not found") from None

    def _session_or_404(session_id: str) -> _LiveSession:
        try:
            return sessions[session_id]
        except KeyError:
            raise HTTPException(404, f"session {session_id!r} not found") from None

    def _summary(s: _Survey) -> SurveySummary:
        return SurveySummary(
            id=s.id,
            title=s.model.title,
            status=s.status,
            created_at=s.created_at,
            updated_at=s.updated_at,
        )

    def _resource(s: _Survey) -> SurveyResource:
        return SurveyResource(**_summary(s).model_dump(), document=s.document)

    def _parse_or_422(document: dict) -> tuple[QuestionnaireModel, dict]:
        model, diags = _parse(json.dumps(document))
        if diags:
            raise HTTPException(
                422,
                detail={
                    "message": "invalid questionnaire document",
                    "diagnostics": [
                        DiagnosticView(path=d.path, code=d.code, message=d.message).model_dump()
                        for d in diags
                    ],
                },
            )
        assert model is not None
        canonical = json.loads(serialize_questionnaire(model))
        return model, canonical

    def _next_response(live: _LiveSession) -> NextResponse:
        model = live.session.model
        if live.session.status is SessionStatus.ACTIVE:
            assert live.offered is not None
            descriptor = model.descriptor(live.offered)
            var = model.network.variable(live.offered)
            answers = list(descriptor.answers) if descriptor.answers else list(var.states)
            return NextResponse(
                session_id=live.id,
                survey_id=live.survey_id,
                terminal=False,
                question=QuestionView(id=descriptor.variable, text=descriptor.text, answers=answers),
            )
        evidence = live.session.evidence
        return NextResponse(
            session_id=live.id,
            survey_id=live.survey_id,
            terminal=True,
            stop_reason=live.session.status.value,
            grade=grade(model, evidence),
            risks=marginal_risks(model, evidence, model.risk_groups),
        )

    def _persist(live: _LiveSession) -> None:
        store.save(record_from_session(live.id, live.survey_id, live.session, created_at=live.created_at))

    def _register_session(survey: _Survey) -> _LiveSession:
        session = start_session(survey.model)
        offered = pick_question(survey.model, session) if session.status is SessionStatus.ACTIVE else None
        live = _LiveSession(
            id=_new_id(),
            survey_id=survey.id,
            session=session,
            offered=offered,
            created_at=_now_iso(),
        )
        with registry_lock:
            sessions[live.id] = live
        _persist(live)
        return live

    def _register_survey(document: dict, publish: bool = False) -> _Survey:
        model, canonical = _parse_or_422(document)
        now = _now_iso()
        survey = _Survey(
            id=_new_id(),
            model=model,
            document=canonical,
            status="published" if publish else "draft",
            created_at=now,
            updated_at=now,
        )
        with registry_lock:
            surveys[survey.id] = survey
        return survey

    app.state.register_survey = _register_survey

    # -- surveys ------------------------------------------------------------

    @app.post("/surveys", status_code=201, response_model=SurveyResource)
    def create_survey(document: dict = Body(...)):
        return _resource(_register_survey(document))

    @app.get("/surveys", response_model=list[SurveySummary])
    def list_surveys():
        with registry_lock:
            items = sorted(surveys.values(), key=lambda s: (s.created_at, s.id))
        return [_summary(s) for s in items]

    @app.get("/surveys/{survey_id}", response_model=SurveyResource)
    def get_survey(survey_id: str):
        return _resource(_survey_or_404(survey_id))

    @app.put("/surveys/{survey_id}", response_model=SurveyResource)
    def update_survey(survey_id: str, document: dict = Body(...)):
        survey = _survey_or_404(survey_id)
        if survey.status == "published":
            raise HTTPException(409, "published surveys are immutable")
        model, canonical = _parse_or_422(document)
        with registry_lock:
            survey.model = model
            survey.document = canonical
            survey.updated_at = _now_iso()
        return _resource(survey)

    @app.post("/surveys/{survey_id}/publish", response_model=SurveyResource)
    def publish_survey(survey_id: str):
        survey = _survey_or_404(survey_id)
        if survey.status == "published":
            raise HTTPException(409, "survey is already published")
        with registry_lock:
            survey.status = "published"
            survey.updated_at = _now_iso()
        return _resource(survey)

    @app.delete("/surveys/{survey_id}", status_code=204)
    def delete_survey(survey_id: str):
        survey = _survey_or_404(survey_id)
        with registry_lock:
            if any(r.questionnaire_id == survey_id for r in store.list_records()):
                raise HTTPException(409, "survey has sessions and cannot be deleted")
            del surveys[survey_id]
        return None

    # -- sessions -----------------------------------------------------------

    @app.post("/surveys/{survey_id}/sessions", status_code=201, response_model=SessionCreated)
    def create_session(survey_id: str):
        survey = _survey_or_404(survey_id)
        if survey.status != "published":
            raise HTTPException(409, "sessions attach only to published surveys")
        live = _register_session(survey)
        return SessionCreated(session_id=live.id, survey_id=survey.id, next=_next_response(live))

    @app.post("/sessions/{session_id}/answers", response_model=NextResponse)
    def submit_answer(session_id: str, submission: AnswerSubmission):
        live = _session_or_404(session_id)
        with live.lock:
            replay = (submission.question, submission.answer) == live.last_submission
            if replay:
                assert live.last_response is not None
                return live.last_response
            if live.session.status is not SessionStatus.ACTIVE:
                raise HTTPException(409, "session is terminal; no further answers accepted")
            if submission.question != live.offered:
                raise HTTPException(
                    409,
                    f"question {submission.question!r} is not the offered question ({live.offered!r})",
                )
            card = live.session.model.network.cardinality(submission.question)
            if not 0 <= submission.answer < card:
                raise HTTPException(
                    422,
                    f"answer {submission.answer} out of range for {submission.question!r} "
                    f"(valid: 0..{card - 1})",
                )
            try:
                answer_question(live.session, submission.question, submission.answer)
            except InconsistentEvidenceError as exc:
                raise HTTPException(422, str(exc)) from None
            live.offered = (
                pick_question(live.session.model, live.session)
                if live.session.status is SessionStatus.ACTIVE
                else None
            )
            response = _next_response(live)
            live.last_submission = (submission.question, submission.answer)
            live.last_response = response
            _persist(live)
            return response

    @app.get("/sessions/{session_id}/next", response_model=NextResponse)
    def get_next(session_id: str):
        live = _session_or_404(session_id)
        with live.lock:
            return _next_response(live)

    @app.get("/sessions/{session_id}/explain", response_model=ExplainView)
    def get_explanation(session_id: str):
        live = _session_or_404(session_id)
        with live.lock:
            report = explain(live.session.model, live.session)
            return ExplainView(
                session_id=live.id,
                survey_id=live.survey_id,
                skill_posteriors={k: list(v) for k, v in report.skill_posteriors.items()},
                joint_entropy=report.joint_entropy,
                stop_threshold=live.session.model.stop_threshold,
                stop_margin=report.stop_margin,
                per_candidate=[CandidateGain(question=q, gain=g) for q, g in report.per_candidate],
            )

    @app.get("/sessions/{session_id}/result", response_model=ResultView)
    def get_result(session_id: str):
        live = _session_or_404(session_id)
        with live.lock:
            if live.session.status is SessionStatus.ACTIVE:
                raise HTTPException(409, "session is not terminal")
            model = live.session.model
            evidence = live.session.evidence
            return ResultView(
                session_id=live.id,
                survey_id=live.survey_id,
                stop_reason=live.session.status.value,
                grade=grade(model, evidence),
                risks=marginal_risks(model, evidence, model.risk_groups),
                transcript=[
                    TranscriptEntryView(
                        question=t.question, answer=t.answer, gain=t.gain, entropy_after=t.entropy_after
                    )
                    for t in live.session.transcript
                ],
            )

    @app.exception_handler(AskBayesError)
    def _domain_error(request, exc: AskBayesError):
        status = 404 if isinstance(exc, SessionNotFoundError) else 422
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    return app
