"""Session records and persistence: in-memory and append-only file stores.

A record is the durable shadow of a live :class:`~askbayes.engine.Session`:
the transcript numbers it stores must reproduce exactly when replayed
through the engine against the same document, which is how stored data is
audited (:func:`replay_record`).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Protocol

from .engine import (
    QuestionnaireModel,
    Session,
    SessionStatus,
    TranscriptEntry,
    answer_question,
    grade,
    marginal_risks,
    start_session,
)
from .errors import ReplayError, SessionNotFoundError, VersionConflictError
from .modelio import FORMAT_VERSION

REPLAY_TOLERANCE = 1e-9


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class SessionRecord:
    id: str
    questionnaire_id: str
    format_version: int
    status: str
    transcript: tuple[TranscriptEntry, ...]
    created_at: str
    updated_at: str
    grade: float | None = None
    risks: dict[str, float] | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "questionnaire_id": self.questionnaire_id,
            "format_version": self.format_version,
            "status": self.status,
            "transcript": [
                {
                    "question": t.question,
                    "answer": t.answer,
                    "gain": t.gain,
                    "entropy_after": t.entropy_after,
                }
                for t in self.transcript
            ],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "grade": self.grade,
            "risks": self.risks,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionRecord":
        return cls(
            id=data["id"],
            questionnaire_id=data["questionnaire_id"],
            format_version=int(data["format_version"]),
            status=data["status"],
            transcript=tuple(
                TranscriptEntry(
                    question=t["question"],
                    answer=int(t["answer"]),
                    gain=float(t["gain"]),
                    entropy_after=float(t["entropy_after"]),
                )
                for t in data["transcript"]
            ),
            created_at=data["created_at"],
            updated_at=data["updated_at"],
            grade=data["grade"],
            risks=data["risks"],
        )


def record_from_session(
    session_id: str,
    questionnaire_id: str,
    session: Session,
    created_at: str | None = None,
) -> SessionRecord:
    """Snapshot a live session; grade and risks are attached once stopped."""
    final_grade = None
    risks = None
    if session.status is not SessionStatus.ACTIVE:
        final_grade = grade(session.model, session.evidence)
        if session.model.risk_groups:
            risks = marginal_risks(session.model, session.evidence, session.model.risk_groups)
    now = _now_iso()
    return SessionRecord(
        id=session_id,
        questionnaire_id=questionnaire_id,
        format_version=FORMAT_VERSION,
        status=session.status.value,
        transcript=tuple(session.transcript),
        created_at=created_at or now,
        updated_at=now,
        grade=final_grade,
        risks=risks,
    )


class SessionStore(Protocol):
    def save(self, record: SessionRecord) -> None: ...
    def load(self, session_id: str) -> SessionRecord: ...
    def list_records(self) -> list[SessionRecord]: ...


class MemorySessionStore:
    """Dict-backed store; saves replace the record under the same id."""

    def __init__(self):
        self._records: dict[str, SessionRecord] = {}
        self._lock = threading.RLock()

    def save(self, record: SessionRecord) -> None:
        with self._lock:
            self._records[record.id] = record

    def load(self, session_id: str) -> SessionRecord:
        with self._lock:
            try:
                return self._records[session_id]
            except KeyError:
                raise SessionNotFoundError(session_id) from None

    def list_records(self) -> list[SessionRecord]:
        with self._lock:
            return sorted(self._records.values(), key=lambda r: (r.created_at, r.id))


class FileSessionStore:
    """Append-only journal: one JSON object per line, last write per id wins.

    The whole journal is replayed into memory on open; every save appends a
    full snapshot, so the file needs no rewriting and a crash can lose at
    most the line being written.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.RLock()
        self._records: dict[str, SessionRecord] = {}
        if self._path.exists():
            with self._path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        record = SessionRecord.from_dict(json.loads(line))
                        self._records[record.id] = record
        else:
            self._path.parent.mkdir(parents=True, exist_ok=True)

    def save(self, record: SessionRecord) -> None:
        with self._lock:
            with self._path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
            self._records[record.id] = record

    def load(self, session_id: str) -> SessionRecord:
        with self._lock:
            try:
                return self._records[session_id]
            except KeyError:
                raise SessionNotFoundError(session_id) from None

    def list_records(self) -> list[SessionRecord]:
        with self._lock:
            return sorted(self._records.values(), key=lambda r: (r.created_at, r.id))


def save_session(store: SessionStore, record: SessionRecord) -> None:
    store.save(record)


def load_session(
    store: SessionStore,
    session_id: str,
    questionnaire_id: str | None = None,
    format_version: int | None = None,
) -> SessionRecord:
    """Fetch a record, optionally pinned to a questionnaire and format."""
    record = store.load(session_id)
    if questionnaire_id is not None and record.questionnaire_id != questionnaire_id:
        raise VersionConflictError(
            f"session {session_id!r} belongs to questionnaire "
            f"{record.questionnaire_id!r}, not {questionnaire_id!r}"
        )
    if format_version is not None and record.format_version != format_version:
        raise VersionConflictError(
            f"session {session_id!r} was stored with format_version "
            f"{record.format_version}, current is {format_version}"
        )
    return record


def list_sessions(store: SessionStore) -> list[str]:
    """Session ids sorted by creation time (ties by id)."""
    return [r.id for r in store.list_records()]


def replay_record(model: QuestionnaireModel, record: SessionRecord) -> Session:
    """Re-run a stored transcript and check every recorded number.

    Raises :class:`ReplayError` on the first step whose gain, entropy,
    final status, or grade disagrees beyond 1e-9.
    """
    session = start_session(model)
    for i, stored in enumerate(record.transcript):
        live = answer_question(session, stored.question, stored.answer)
        if abs(live.gain - stored.gain) > REPLAY_TOLERANCE:
            raise ReplayError(
                f"step {i} ({stored.question}): recorded gain {stored.gain!r}, replay gives {live.gain!r}"
            )
        if abs(live.entropy_after - stored.entropy_after) > REPLAY_TOLERANCE:
            raise ReplayError(
                f"step {i} ({stored.question}): recorded entropy {stored.entropy_after!r}, "
                f"replay gives {live.entropy_after!r}"
            )
    if session.status.value != record.status:
        raise ReplayError(f"recorded status {record.status!r}, replay ends {session.status.value!r}")
    if record.grade is not None:
        live_grade = grade(model, session.evidence)
        if abs(live_grade - record.grade) > REPLAY_TOLERANCE:
            raise ReplayError(f"recorded grade {record.grade!r}, replay gives {live_grade!r}")
    return session
