"""Short-lived quiz sessions for the answer/retry loop.

A session pins the generated question (solution included) server-side so
grading never trusts client-supplied solutions.  The default store is a
lock-guarded in-memory dict with a TTL; anything with the same four
methods can replace it behind the ``SessionStore`` protocol.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Protocol

from .pipeline import QuizQuestion

DEFAULT_TTL_SECONDS = 3600

_SEEDED_NAMESPACE = uuid.UUID("6ba7b812-9dad-11d1-80b4-00c04fd430c8")


class SessionError(Exception):
    pass


class UnknownSession(SessionError):
    def __init__(self, session_id: str):
        super().__init__(f"no session {session_id!r}")
        self.session_id = session_id


class SessionExpired(SessionError):
    def __init__(self, session_id: str):
        super().__init__(f"session {session_id!r} has expired")
        self.session_id = session_id


@dataclass
class QuizSession:
    session_id: str
    question: QuizQuestion
    created_at: float
    expires_at: float
    attempts: int = 0


def deterministic_session_id(
    concept: str, target: str | None, seed: int, value_range: tuple[int, int]
) -> str:
    """Stable id for seeded requests so repeated calls return equal bodies."""
    name = f"{concept}|{target or ''}|{seed}|{value_range[0]}|{value_range[1]}"
    return str(uuid.uuid5(_SEEDED_NAMESPACE, name))


class SessionStore(Protocol):
    def put(self, question: QuizQuestion, session_id: str | None = None) -> QuizSession: ...

    def fetch(self, session_id: str) -> QuizSession: ...

    def record_attempt(self, session_id: str) -> int: ...

    def drop(self, session_id: str) -> None: ...


@dataclass
class InMemorySessionStore:
    """Thread-safe dict-backed store; expired entries are purged lazily."""

    ttl_seconds: float = DEFAULT_TTL_SECONDS
    clock: Callable[[], float] = time.time
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _sessions: dict[str, QuizSession] = field(default_factory=dict, repr=False)

    def put(self, question: QuizQuestion, session_id: str | None = None) -> QuizSession:
        now = self.clock()
        session = QuizSession(
            session_id=session_id if session_id is not None else str(uuid.uuid4()),
            question=question,
            created_at=now,
            expires_at=now + self.ttl_seconds,
        )
        with self._lock:
            self._purge(now)
            self._sessions[session.session_id] = session
        return session

    def fetch(self, session_id: str) -> QuizSession:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(session_id)
            if self.clock() > session.expires_at:
                del self._sessions[session_id]
                raise SessionExpired(session_id)
            return session

    def record_attempt(self, session_id: str) -> int:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(session_id)
            session.attempts += 1
            return session.attempts

    def drop(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)

    def _purge(self, now: float):
        dead = [sid for sid, s in self._sessions.items() if now > s.expires_at]
        for sid in dead:
            del self._sessions[sid]
