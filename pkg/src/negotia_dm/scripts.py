"""Speaker-tagged dialogue scripts and the transcript-conformance runner.

Script files are UTF-8 text: ``#name:`` / ``#fixture:`` header lines followed
by ``U:`` input turns and ``S:`` expected system turns.  Expected turns may
reference fixture data through placeholders like ``{phone:f1-anna-002}`` so
scripts stay independent of the concrete numbers a fixture carries.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from .engine import integrate, new_session
from .kb import DirectoryKb
from .nl import generate, interpret
from .service import DialogueContext, load_context, qud_sort_of

_PLACEHOLDER = re.compile(r"\{([a-z_]+):([A-Za-z0-9_-]+)\}")

_PLACEHOLDER_FEATURES = {
    "phone": "phonenumber",
    "age": "age",
    "name": "person_name",
    "city": "person_city",
    "street": "person_street_name",
}


class ScriptFormatError(Exception):
    pass


@dataclass(frozen=True)
class ScriptTurn:
    speaker: Literal["U", "S"]
    text: str


@dataclass(frozen=True)
class DialogueScript:
    name: str
    fixture: str
    turns: tuple[ScriptTurn, ...]


def parse_script(text: str) -> DialogueScript:
    name = None
    fixture = None
    turns: list[ScriptTurn] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip()
        if not line:
            continue
        if line.startswith("#name:"):
            name = line[len("#name:"):].strip()
        elif line.startswith("#fixture:"):
            fixture = line[len("#fixture:"):].strip()
        elif line.startswith("U:"):
            turns.append(ScriptTurn("U", line[2:].strip()))
        elif line.startswith("S:"):
            turns.append(ScriptTurn("S", line[2:].strip()))
        else:
            raise ScriptFormatError(f"line {lineno}: expected header, 'U:' or 'S:' line")
    if name is None or fixture is None:
        raise ScriptFormatError("script needs #name: and #fixture: headers")
    for previous, current in zip(turns, turns[1:]):
        if previous.speaker == current.speaker:
            raise ScriptFormatError(f"{name}: consecutive {current.speaker} turns")
    if turns and turns[0].speaker != "U":
        raise ScriptFormatError(f"{name}: script must start with a user turn")
    return DialogueScript(name, fixture, tuple(turns))


def load_script(path: str | Path) -> DialogueScript:
    return parse_script(Path(path).read_text(encoding="utf-8"))


def substitute_placeholders(text: str, kb: DirectoryKb) -> str:
    def replace(match: re.Match) -> str:
        feature_alias, entity_id = match.groups()
        feature = _PLACEHOLDER_FEATURES.get(feature_alias)
        if feature is None:
            raise ScriptFormatError(f"unknown placeholder feature {feature_alias!r}")
        entity = kb.by_id.get(entity_id)
        if entity is None:
            raise ScriptFormatError(f"placeholder references unknown entity {entity_id!r}")
        return str(entity.feature(feature))

    return _PLACEHOLDER.sub(replace, text)


@dataclass(frozen=True)
class TurnResult:
    index: int
    user_text: str
    expected: str
    actual: str

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass(frozen=True)
class ConformanceReport:
    name: str
    fixture: str
    ddd_sha256: str
    turns: tuple[TurnResult, ...]

    @property
    def passed(self) -> bool:
        return all(turn.passed for turn in self.turns)

    def render(self) -> str:
        lines = [f"script {self.name} (fixture {self.fixture}, ddd sha256 {self.ddd_sha256[:12]})"]
        for turn in self.turns:
            status = "PASS" if turn.passed else "FAIL"
            lines.append(f"  turn {turn.index}: {status}  U: {turn.user_text}")
            if not turn.passed:
                lines.append(f"    expected: {turn.expected}")
                lines.append(f"    actual:   {turn.actual}")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def run_script(script: DialogueScript, ddd_ref: str = "phone_directory.xml") -> ConformanceReport:
    """Replay the script's user turns through a fresh session and diff outputs."""
    context = load_context(ddd_ref, script.fixture)
    return run_script_in_context(script, context)


def run_script_in_context(script: DialogueScript, context: DialogueContext) -> ConformanceReport:
    state = new_session(context.domain, context.kb)
    results: list[TurnResult] = []
    index = 0
    pending_user: str | None = None
    for turn in script.turns:
        if turn.speaker == "U":
            pending_user = turn.text
            continue
        if pending_user is None:
            raise ScriptFormatError(f"{script.name}: expectation without a preceding user turn")
        index += 1
        moves = interpret(pending_user, context.lexicon, qud_sort_of(state, context.lexicon))
        state, actions = integrate(state, moves, context.domain, context.kb)
        actual = generate(actions, context.lexicon)
        expected = substitute_placeholders(turn.text, context.kb)
        results.append(TurnResult(index, pending_user, expected, actual))
        pending_user = None
    return ConformanceReport(script.name, script.fixture, context.ddd_sha256, tuple(results))


def sha256_of(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
