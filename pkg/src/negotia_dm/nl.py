"""Deterministic natural-language frontend.

Interpretation is pattern matching over normalized tokens with typed slots
filled from the lexicon; generation is template realization of system
actions.  Both are pure functions of their inputs so transcripts replay
byte-identically.

Pattern syntax (see the companion ``*.patterns.json`` files):
    word            literal token
    (a|b)           single-token alternatives
    <name:sort>     typed slot, filled from the lexicon's entity lists
    [ ... ]         optional group
    *               trailing tokens are ignored (must come last)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import engine
from .kb import DirectoryKb
from .semantics import (
    Ask,
    AnswerMove,
    DONT_KNOW,
    Greet,
    Individual,
    KPQ,
    Move,
    NO,
    Proposition,
    PropositionAnswer,
    Quit,
    Request,
    ShortAnswer,
    WhQuestion,
    YES,
)

_PUNCTUATION = ".,!?;:\"“”"

_GREETINGS = frozenset({"hello", "hi", "hey"})


class MissingTemplate(Exception):
    pass


class LexiconFormatError(Exception):
    pass


def tokenize(text: str) -> list[str]:
    cleaned = text.replace("'", "").replace("’", "")
    for ch in _PUNCTUATION:
        cleaned = cleaned.replace(ch, " ")
    return cleaned.casefold().split()


def _normalize_surface(surface: str) -> str:
    return " ".join(tokenize(surface))


# Compiled pattern elements: ("lit", alternatives), ("slot", name, sort),
# ("opt", sub-elements), ("rest",).
Element = tuple


def _parse_elements(tokens: list[str], pos: int, stop_at_close: bool) -> tuple[list[Element], int]:
    elements: list[Element] = []
    while pos < len(tokens):
        token = tokens[pos]
        if token == "]":
            if not stop_at_close:
                raise LexiconFormatError("unbalanced ']' in pattern")
            return elements, pos + 1
        if token == "[":
            inner, pos = _parse_elements(tokens, pos + 1, stop_at_close=True)
            elements.append(("opt", inner))
            continue
        pos += 1
        if token == "*":
            elements.append(("rest",))
        elif token.startswith("<") and token.endswith(">"):
            name, _, sort = token[1:-1].partition(":")
            if not name or not sort:
                raise LexiconFormatError(f"bad slot spec {token!r}")
            elements.append(("slot", name, sort))
        elif token.startswith("(") and token.endswith(")"):
            alternatives = token[1:-1].split("|")
            if any(not alt or any(ch in alt for ch in "()<>|") for alt in alternatives):
                raise LexiconFormatError(f"bad alternation {token!r} (alternatives are single tokens)")
            elements.append(("lit", frozenset(alternatives)))
        else:
            if any(ch in token for ch in "()<>|"):
                raise LexiconFormatError(f"bad pattern token {token!r}")
            elements.append(("lit", frozenset((token,))))
    if stop_at_close:
        raise LexiconFormatError("unterminated '[' in pattern")
    return elements, pos


def _literal_count(elements: list[Element]) -> int:
    total = 0
    for element in elements:
        if element[0] == "lit":
            total += 1
        elif element[0] == "opt":
            total += _literal_count(element[1])
    return total


def _slot_sorts(elements: list[Element]) -> set[str]:
    sorts: set[str] = set()
    for element in elements:
        if element[0] == "slot":
            sorts.add(element[2])
        elif element[0] == "opt":
            sorts.update(_slot_sorts(element[1]))
    return sorts


@dataclass(frozen=True)
class UtterancePattern:
    source: str
    elements: tuple
    moves: tuple[str, ...]
    requires_qud_sort: str | None = None

    @property
    def literal_count(self) -> int:
        return _literal_count(list(self.elements))

    @property
    def slot_sorts(self) -> set[str]:
        return _slot_sorts(list(self.elements))


def compile_pattern(source: str, moves: list[str], requires_qud_sort: str | None = None) -> UtterancePattern:
    spaced = source.replace("[", " [ ").replace("]", " ] ")
    elements, _ = _parse_elements(spaced.split(), 0, stop_at_close=False)
    return UtterancePattern(source, tuple(elements), tuple(moves), requires_qud_sort)


_MAX_SLOT_SPAN = 4


@dataclass
class Lexicon:
    """Domain vocabulary: entity surface forms, nouns, templates and patterns."""

    predicate_sorts: dict[str, str]
    entities: dict[str, dict[str, str]]  # sort -> normalized surface -> canonical form
    goal_nouns: dict[str, str]
    feature_nouns: dict[str, str]
    number_words: dict[int, str]
    templates: dict
    patterns: tuple[UtterancePattern, ...] = ()
    fillers: frozenset = frozenset()

    @classmethod
    def load(cls, lexicon_path: str | Path, patterns_path: str | Path) -> "Lexicon":
        raw = json.loads(Path(lexicon_path).read_text(encoding="utf-8"))
        raw_patterns = json.loads(Path(patterns_path).read_text(encoding="utf-8"))

        entities: dict[str, dict[str, str]] = {}
        for sort, surfaces in raw.get("entities", {}).items():
            entities[sort] = {_normalize_surface(s): s for s in surfaces}

        patterns = [
            compile_pattern(entry["pattern"], entry["moves"], entry.get("requires_qud_sort"))
            for entry in raw_patterns["patterns"]
        ]
        for trigger, goal in raw.get("goal_triggers", {}).items():
            pattern = compile_pattern(trigger, [])
            slot_moves = [f"slot:{name}" for name in _slot_names(list(pattern.elements))]
            patterns.append(replace(pattern, moves=tuple([f"request:{goal}", *slot_moves])))
        patterns.sort(key=lambda p: -p.literal_count)

        return cls(
            predicate_sorts=raw["predicate_sorts"],
            entities=entities,
            goal_nouns=raw["goal_nouns"],
            feature_nouns=raw["feature_nouns"],
            number_words={int(k): v for k, v in raw["number_words"].items()},
            templates=raw["templates"],
            patterns=tuple(patterns),
            fillers=frozenset(raw_patterns.get("fillers", ())),
        )

    def with_kb(self, kb: DirectoryKb) -> "Lexicon":
        """Copy of the lexicon extended with the fixture's entity surface forms."""
        entities = {sort: dict(table) for sort, table in self.entities.items()}
        feature_by_sort = {
            "individual-name": "person_name",
            "city": "person_city",
            "street": "person_street_name",
        }
        for sort, feature in feature_by_sort.items():
            table = entities.setdefault(sort, {})
            for entity in kb.entities:
                surface = str(entity.feature(feature))
                table.setdefault(_normalize_surface(surface), surface)
        return replace(self, entities=entities)


def _slot_names(elements: list[Element]) -> list[str]:
    names: list[str] = []
    for element in elements:
        if element[0] == "slot":
            names.append(element[1])
        elif element[0] == "opt":
            names.extend(_slot_names(element[1]))
    return names


def _match_elements(
    elements: tuple, index: int, tokens: list[str], pos: int, lexicon: Lexicon, slots: dict[str, Individual]
) -> int | None:
    if index == len(elements):
        return pos
    kind = elements[index][0]
    element = elements[index]

    if kind == "rest":
        return len(tokens)

    if kind == "lit":
        if pos < len(tokens) and tokens[pos] in element[1]:
            return _match_elements(elements, index + 1, tokens, pos + 1, lexicon, slots)
        return None

    if kind == "opt":
        inner = tuple(element[1]) + elements[index + 1:]
        with_group = _match_elements(inner, 0, tokens, pos, lexicon, slots)
        if with_group is not None:
            return with_group
        return _match_elements(elements, index + 1, tokens, pos, lexicon, slots)

    if kind == "slot":
        _, name, sort = element
        if sort.startswith("integer"):
            if pos < len(tokens) and tokens[pos].isdigit():
                slots[name] = Individual(sort, int(tokens[pos]))
                result = _match_elements(elements, index + 1, tokens, pos + 1, lexicon, slots)
                if result is not None:
                    return result
                del slots[name]
            return None
        table = lexicon.entities.get(sort, {})
        for span in range(min(_MAX_SLOT_SPAN, len(tokens) - pos), 0, -1):
            candidate = " ".join(tokens[pos:pos + span])
            canonical = table.get(candidate)
            if canonical is None:
                continue
            slots[name] = Individual(sort, canonical)
            result = _match_elements(elements, index + 1, tokens, pos + span, lexicon, slots)
            if result is not None:
                return result
            del slots[name]
        return None

    raise LexiconFormatError(f"unknown pattern element {element!r}")


def _build_moves(pattern: UtterancePattern, slots: dict[str, Individual], lexicon: Lexicon) -> list[Move]:
    moves: list[Move] = []
    for spec in pattern.moves:
        head, _, rest = spec.partition(":")
        if head == "request":
            moves.append(Request(rest))
        elif head == "slot":
            if rest in slots:
                moves.append(AnswerMove(ShortAnswer(slots[rest])))
        elif head == "propose":
            predicate, _, slot_name = rest.partition(":")
            if slot_name in slots:
                moves.append(AnswerMove(PropositionAnswer(Proposition(predicate, slots[slot_name]))))
        elif head == "answer":
            answer = {"yes": YES, "no": NO, "dontknow": DONT_KNOW}[rest]
            moves.append(AnswerMove(answer))
        elif head == "ask":
            moves.append(Ask(WhQuestion(rest, lexicon.predicate_sorts[rest])))
        elif head == "greet":
            moves.append(Greet())
        elif head == "quit":
            moves.append(Quit())
        else:
            raise LexiconFormatError(f"unknown move spec {spec!r}")
    return moves


def interpret(utterance: str, lexicon: Lexicon, qud_sort: str | None = None) -> list[Move]:
    """Map an utterance to dialogue moves; empty list when nothing matches.

    ``qud_sort`` biases bare-value readings: a lone "42" only counts as an
    age while an age-sorted question is under discussion.
    """
    tokens = tokenize(utterance)
    if not tokens:
        return []
    if any(t in _GREETINGS for t in tokens) and all(t in _GREETINGS | lexicon.fillers for t in tokens):
        return [Greet()]
    while tokens and tokens[0] in (lexicon.fillers | _GREETINGS):
        tokens.pop(0)
    if not tokens:
        return []

    def order(item: tuple[int, UtterancePattern]) -> tuple[int, int, int]:
        index, pattern = item
        prefers_qud = qud_sort is not None and qud_sort in pattern.slot_sorts
        return (-pattern.literal_count, 0 if prefers_qud else 1, index)

    for _, pattern in sorted(enumerate(lexicon.patterns), key=order):
        if pattern.requires_qud_sort is not None and pattern.requires_qud_sort != qud_sort:
            continue
        slots: dict[str, Individual] = {}
        end = _match_elements(pattern.elements, 0, tokens, 0, lexicon, slots)
        if end == len(tokens):
            return _build_moves(pattern, slots, lexicon)
    return []


def render_count(n: int, lexicon: Lexicon) -> str:
    """Counts up to twenty as words, larger ones as digits."""
    return lexicon.number_words.get(n, str(n))


def _template(lexicon: Lexicon, *keys: str) -> str:
    node = lexicon.templates
    for key in keys:
        if not isinstance(node, dict) or key not in node:
            raise MissingTemplate("/".join(keys))
        node = node[key]
    if not isinstance(node, str):
        raise MissingTemplate("/".join(keys))
    return node


def _question_text(question, lexicon: Lexicon) -> str:
    if isinstance(question, KPQ):
        feature = lexicon.feature_nouns.get(question.embedded.predicate)
        if feature is None:
            raise MissingTemplate(f"feature_nouns/{question.embedded.predicate}")
        return _template(lexicon, "kpq").format(feature=feature)
    if isinstance(question, WhQuestion):
        return _template(lexicon, "wh_questions", question.predicate)
    raise MissingTemplate(f"question/{type(question).__name__}")


def _count_sentence(count: int, lexicon: Lexicon) -> str:
    if count == 1:
        return _template(lexicon, "report_count_one")
    return _template(lexicon, "report_count").format(count=render_count(count, lexicon))


def _realize(action: engine.SystemAction, lexicon: Lexicon) -> str:
    if isinstance(action, engine.ReportCount):
        return _count_sentence(action.count, lexicon)
    if isinstance(action, engine.AskQuestion):
        return _question_text(action.question, lexicon)
    if isinstance(action, engine.ReportValue):
        group = "report_value_reanswer" if action.reanswer else "report_value"
        return _template(lexicon, group, action.predicate).format(value=action.value.surface)
    if isinstance(action, engine.ReportAlternativeValues):
        template = _template(lexicon, "alternative_value", action.predicate)
        sentences = [
            template.format(
                name=entity.person_name,
                street=entity.person_street_name,
                number=entity.street_number,
                city=entity.person_city,
                value=value.surface,
            )
            for entity, value in action.pairs
        ]
        return " ".join(sentences)
    if isinstance(action, engine.ResumeGoal):
        noun = lexicon.goal_nouns.get(action.goal.target)
        if noun is None:
            raise MissingTemplate(f"goal_nouns/{action.goal.target}")
        return _template(lexicon, "resume_goal").format(goal=noun)
    if isinstance(action, engine.ReportNoMatches):
        return _template(lexicon, "no_matches")
    if isinstance(action, engine.Acknowledge):
        return _template(lexicon, "acknowledge")
    if isinstance(action, engine.NotUnderstood):
        return _template(lexicon, "not_understood")
    raise MissingTemplate(type(action).__name__)


def generate(actions: list[engine.SystemAction], lexicon: Lexicon) -> str:
    """Realize a turn's actions in order, joined into one system utterance.

    An acknowledgment followed directly by a count report fuses into a single
    sentence ("OK, there are ...") the way the reference transcripts read.
    """
    parts: list[str] = []
    i = 0
    while i < len(actions):
        action = actions[i]
        if (
            isinstance(action, engine.Acknowledge)
            and i + 1 < len(actions)
            and isinstance(actions[i + 1], engine.ReportCount)
        ):
            sentence = _count_sentence(actions[i + 1].count, lexicon)
            parts.append("OK, " + sentence[0].lower() + sentence[1:])
            i += 2
            continue
        parts.append(_realize(action, lexicon))
        i += 1
    return " ".join(parts)
