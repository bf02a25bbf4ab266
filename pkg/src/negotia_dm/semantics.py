"""Semantic vocabulary: questions, answers, propositions and dialogue moves.

Knowledge-precondition questions (KPQs) wrap a wh-question and behave as a
hybrid: they accept yes/no-style answers as well as answers to the embedded
wh-question.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Union

Polarity = Literal["positive", "negative"]


@dataclass(frozen=True)
class Individual:
    """A sorted value such as a city name or an age."""

    sort: str
    surface: str | int

    def __post_init__(self) -> None:
        if self.sort.startswith("integer"):
            if not isinstance(self.surface, int) or isinstance(self.surface, bool):
                raise ValueError(f"{self.sort} individual must hold an integer: {self.surface!r}")
        else:
            if not isinstance(self.surface, str) or not self.surface:
                raise ValueError(f"{self.sort} individual must hold non-empty text: {self.surface!r}")


@dataclass(frozen=True)
class Proposition:
    predicate: str
    value: Individual
    polarity: Polarity = "positive"


@dataclass(frozen=True)
class WhQuestion:
    predicate: str
    sort: str


@dataclass(frozen=True)
class YesNoQuestion:
    proposition: Proposition


@dataclass(frozen=True)
class KPQ:
    """Asks whether the other party knows the answer to the embedded question."""

    embedded: WhQuestion


Question = Union[WhQuestion, YesNoQuestion, KPQ]


@dataclass(frozen=True)
class Yes:
    pass


@dataclass(frozen=True)
class No:
    pass


@dataclass(frozen=True)
class DontKnow:
    pass


@dataclass(frozen=True)
class ShortAnswer:
    value: Individual


@dataclass(frozen=True)
class PropositionAnswer:
    proposition: Proposition


Answer = Union[Yes, No, DontKnow, ShortAnswer, PropositionAnswer]

YES = Yes()
NO = No()
DONT_KNOW = DontKnow()


@dataclass(frozen=True)
class Request:
    goal: str


@dataclass(frozen=True)
class Ask:
    question: Question


@dataclass(frozen=True)
class AnswerMove:
    answer: Answer


@dataclass(frozen=True)
class Greet:
    pass


@dataclass(frozen=True)
class Quit:
    pass


Move = Union[Request, Ask, AnswerMove, Greet, Quit]


class NotResolving(Exception):
    """combine() was called on an answer that does not resolve the question."""


def is_content_answer(answer: Answer) -> bool:
    """True for answers that carry constraint content (a value or proposition)."""
    return isinstance(answer, (ShortAnswer, PropositionAnswer))


def resolves(answer: Answer, question: Question) -> bool:
    """Decide whether ``answer`` discharges ``question``.

    A KPQ is resolved by yes/no-style answers or by anything resolving the
    embedded wh-question.  "I don't know" discharges any question without
    contributing content.
    """
    if isinstance(answer, DontKnow):
        return True
    if isinstance(question, WhQuestion):
        if isinstance(answer, ShortAnswer):
            return answer.value.sort == question.sort
        if isinstance(answer, PropositionAnswer):
            return answer.proposition.predicate == question.predicate
        return False
    if isinstance(question, YesNoQuestion):
        return isinstance(answer, (Yes, No))
    if isinstance(question, KPQ):
        return isinstance(answer, (Yes, No)) or resolves(answer, question.embedded)
    raise TypeError(f"unknown question type: {question!r}")


def combine(answer: Answer, question: Question) -> Proposition | None:
    """Integrate a resolving answer into a proposition, or None if contentless.

    Raises NotResolving when ``resolves(answer, question)`` does not hold.
    """
    if not resolves(answer, question):
        raise NotResolving(f"{answer!r} does not resolve {question!r}")
    if isinstance(answer, (Yes, No, DontKnow)):
        return None
    if isinstance(answer, PropositionAnswer):
        return answer.proposition
    target = question.embedded if isinstance(question, KPQ) else question
    if not isinstance(target, WhQuestion):
        raise NotResolving(f"short answer cannot combine with {question!r}")
    return Proposition(target.predicate, answer.value)
