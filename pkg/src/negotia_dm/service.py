"""Session lifecycle and the service layer shared by the HTTP API and the CLI.

Sessions live in memory with idle expiry.  Each session serializes its own
turns (a second utterance while one is in flight is rejected as busy) while
different sessions run concurrently; domain, knowledge base and lexicon are
immutable and shared.
"""

from __future__ import annotations

import hashlib
import threading
import time
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ddd import Domain, parse_ddd, validate
from .engine import InformationState, InvalidDomain, KPQ, integrate, new_session
from .kb import DirectoryKb, load_fixture
from .nl import Lexicon, generate, interpret
from .semantics import WhQuestion

DEFAULT_DDD = "phone_directory.xml"
DEFAULT_FIXTURE = "f1_small.jsonl"
DEFAULT_IDLE_TTL_SECONDS = 30 * 60


class UnknownSession(Exception):
    pass


class SessionBusy(Exception):
    pass


def data_dir() -> Path:
    return Path(str(resources.files("negotia_dm") / "data"))


def resolve_data_path(ref: str | Path) -> Path:
    """A filesystem path as-is, or a bare name resolved in the packaged data."""
    path = Path(ref)
    if path.exists():
        return path
    packaged = data_dir() / str(ref)
    if packaged.exists():
        return packaged
    raise FileNotFoundError(f"no such file or packaged data entry: {ref}")


@dataclass(frozen=True)
class DialogueContext:
    """Immutable per-(domain, fixture) bundle shared by any number of sessions."""

    domain: Domain
    kb: DirectoryKb
    lexicon: Lexicon
    ddd_path: Path
    fixture_path: Path
    ddd_sha256: str


def load_context(
    ddd_ref: str | Path = DEFAULT_DDD,
    fixture_ref: str | Path = DEFAULT_FIXTURE,
    lexicon_ref: str | Path | None = None,
    patterns_ref: str | Path | None = None,
) -> DialogueContext:
    ddd_path = resolve_data_path(ddd_ref)
    fixture_path = resolve_data_path(fixture_ref)
    ddd_bytes = ddd_path.read_bytes()
    domain = parse_ddd(ddd_bytes.decode("utf-8"))
    diagnostics = validate(domain)
    if diagnostics:
        raise InvalidDomain("; ".join(str(d) for d in diagnostics))
    kb = load_fixture(fixture_path)
    lexicon_path = resolve_data_path(lexicon_ref or "phone_directory.lexicon.json")
    patterns_path = resolve_data_path(patterns_ref or "phone_directory.patterns.json")
    lexicon = Lexicon.load(lexicon_path, patterns_path).with_kb(kb)
    return DialogueContext(
        domain=domain,
        kb=kb,
        lexicon=lexicon,
        ddd_path=ddd_path,
        fixture_path=fixture_path,
        ddd_sha256=hashlib.sha256(ddd_bytes).hexdigest(),
    )


def qud_sort_of(state: InformationState, lexicon: Lexicon) -> str | None:
    qud = state.qud
    if isinstance(qud, KPQ):
        qud = qud.embedded
    if isinstance(qud, WhQuestion):
        return lexicon.predicate_sorts.get(qud.predicate, qud.sort)
    return None


def state_summary(state: InformationState, lexicon: Lexicon) -> dict:
    """JSON-able snapshot of the information state for inspectors."""
    from .nl import _question_text  # rendering helper, shared with generation

    qud_text = None
    if state.qud is not None:
        qud_text = _question_text(state.qud, lexicon)
    return {
        "constraints": {p: str(v.surface) for p, v in state.constraints.items()},
        "declined": sorted(state.declined),
        "last_count": state.last_count,
        "qud": qud_text,
        "goal_stack": [
            {"goal": active.goal.target, "status": active.status}
            for active in state.goal_stack
        ],
        "alternatives_count": state.alternatives.count if state.alternatives else None,
        "ended": state.ended,
    }


@dataclass
class Session:
    id: str
    context: DialogueContext
    state: InformationState
    greeting: str = ""
    transcript: list[tuple[str, str]] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    last_used: float = field(default_factory=time.time)
    turn_lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Thread-safe in-memory session registry with idle expiry."""

    def __init__(self, idle_ttl_seconds: float = DEFAULT_IDLE_TTL_SECONDS):
        self.idle_ttl_seconds = idle_ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _sweep(self, now: float) -> None:
        expired = [
            sid for sid, session in self._sessions.items()
            if now - session.last_used > self.idle_ttl_seconds
        ]
        for sid in expired:
            del self._sessions[sid]

    def create_session(
        self,
        ddd_ref: str | Path = DEFAULT_DDD,
        fixture_ref: str | Path = DEFAULT_FIXTURE,
    ) -> Session:
        context = load_context(ddd_ref, fixture_ref)
        state = new_session(context.domain, context.kb)
        # The initial prompt is returned to the caller but is not a
        # transcript turn: transcripts hold the U/S exchange pairs only.
        greeting = generate(list(state.agenda), context.lexicon)
        session = Session(id=uuid.uuid4().hex, context=context, state=state, greeting=greeting)
        with self._lock:
            self._sweep(time.time())
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._sweep(time.time())
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def delete(self, session_id: str) -> None:
        with self._lock:
            if session_id not in self._sessions:
                raise UnknownSession(session_id)
            del self._sessions[session_id]

    def post_utterance(self, session_id: str, text: str) -> tuple[str, dict]:
        """Run one user turn; returns the system utterance and a state summary."""
        session = self.get(session_id)
        if not session.turn_lock.acquire(blocking=False):
            raise SessionBusy(session_id)
        try:
            context = session.context
            moves = interpret(text, context.lexicon, qud_sort_of(session.state, context.lexicon))
            state, actions = integrate(session.state, moves, context.domain, context.kb)
            system_text = generate(actions, context.lexicon)
            if not system_text and state.ended:
                system_text = context.lexicon.templates.get("goodbye", "Goodbye.")
            session.state = state
            session.transcript.append(("U", text))
            session.transcript.append(("S", system_text))
            session.last_used = time.time()
            return system_text, state_summary(state, context.lexicon)
        finally:
            session.turn_lock.release()

    def summary(self, session_id: str) -> dict:
        session = self.get(session_id)
        return state_summary(session.state, session.context.lexicon)
