"""Dialogue-move engine: information-state update and system-action selection.

The engine is a pure transition function: every public operation clones the
incoming state and returns the successor plus the system actions for the
turn.  All domain knowledge comes from the loaded Domain, the knowledge base
and its feature sorts; nothing here is phone-directory specific.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal, Union

from .ddd import Domain, Findout, ForgetAll, Goal, InvokeServiceQuery, lookup_parameters, validate
from .kb import DirectoryKb, Entity, Query, ResultSet, search, project
from .semantics import (
    Answer,
    AnswerMove,
    Ask,
    DontKnow,
    Greet,
    Individual,
    KPQ,
    Move,
    No,
    Proposition,
    PropositionAnswer,
    Question,
    Quit,
    Request,
    ShortAnswer,
    WhQuestion,
    Yes,
    YesNoQuestion,
    combine,
    is_content_answer,
    resolves,
)

GOAL_PREDICATE = "goal"
GOAL_QUESTION = WhQuestion(GOAL_PREDICATE, "goal-reference")


class InvalidDomain(Exception):
    pass


class NoAlternativesEstablished(Exception):
    pass


class UnknownPredicate(Exception):
    pass


@dataclass(frozen=True)
class ReportCount:
    count: int


@dataclass(frozen=True)
class AskQuestion:
    question: Question


@dataclass(frozen=True)
class ReportValue:
    predicate: str
    entity: Entity
    value: Individual
    # True when the question is being answered again after a post-resolution
    # revision; realized with the shorter anaphoric phrasing.
    reanswer: bool = False


@dataclass(frozen=True)
class ReportAlternativeValues:
    predicate: str
    pairs: tuple[tuple[Entity, Individual], ...]


@dataclass(frozen=True)
class ResumeGoal:
    goal: Goal


@dataclass(frozen=True)
class ReportNoMatches:
    pass


@dataclass(frozen=True)
class Acknowledge:
    pass


@dataclass(frozen=True)
class NotUnderstood:
    pass


SystemAction = Union[
    ReportCount,
    AskQuestion,
    ReportValue,
    ReportAlternativeValues,
    ResumeGoal,
    ReportNoMatches,
    Acknowledge,
    NotUnderstood,
]

GoalStatus = Literal["fresh", "in-progress", "resolved"]


@dataclass(frozen=True)
class ActiveGoal:
    goal: Goal
    remaining_plan: tuple = ()
    status: GoalStatus = "fresh"
    reopened: bool = False


@dataclass
class InformationState:
    goal_stack: list[ActiveGoal] = field(default_factory=list)
    qud: Question | None = None
    constraints: Query = field(default_factory=dict)
    declined: set[str] = field(default_factory=set)
    alternatives: ResultSet | None = None
    agenda: list[SystemAction] = field(default_factory=list)
    last_count: int | None = None
    # Most recently resolved resolve-goal, kept so a later revision can
    # reopen it and answer the question again.
    resolved_goal: ActiveGoal | None = None
    ended: bool = False

    def clone(self) -> "InformationState":
        return InformationState(
            goal_stack=list(self.goal_stack),
            qud=self.qud,
            constraints=dict(self.constraints),
            declined=set(self.declined),
            alternatives=self.alternatives,
            agenda=list(self.agenda),
            last_count=self.last_count,
            resolved_goal=self.resolved_goal,
            ended=self.ended,
        )


def _top_goal(domain: Domain) -> Goal:
    for goal in domain.goals:
        if goal.goal_type == "perform" and goal.target == "top":
            return goal
    raise InvalidDomain("domain has no perform goal with action \"top\"")


def _forget_all(state: InformationState) -> None:
    state.constraints.clear()
    state.declined.clear()
    state.alternatives = None
    state.last_count = None
    state.resolved_goal = None


def new_session(domain: Domain, kb: DirectoryKb) -> InformationState:
    """Fresh state with the top goal's plan run up to its goal question."""
    diagnostics = validate(domain)
    if diagnostics:
        raise InvalidDomain("; ".join(str(d) for d in diagnostics))
    state = InformationState()
    top = _top_goal(domain)
    remaining = list(top.plan)
    while remaining:
        item = remaining[0]
        if isinstance(item, ForgetAll):
            _forget_all(state)
        elif isinstance(item, Findout) and item.question_type == "goal":
            state.qud = GOAL_QUESTION
            state.agenda.append(AskQuestion(GOAL_QUESTION))
        else:
            break
        remaining.pop(0)
    state.goal_stack.append(ActiveGoal(top, tuple(remaining), "in-progress"))
    return state


def _active_resolve(state: InformationState) -> ActiveGoal | None:
    if state.goal_stack:
        active = state.goal_stack[-1]
        if active.goal.is_resolve and active.status == "in-progress":
            return active
    return None


def _find_subject(goal: Goal) -> str | None:
    for item in goal.plan:
        if isinstance(item, Findout) and item.question_type == "wh_question":
            return item.predicate
    return None


def _is_feature_question(state: InformationState, kb: DirectoryKb) -> bool:
    qud = state.qud
    if isinstance(qud, KPQ):
        qud = qud.embedded
    return isinstance(qud, WhQuestion) and qud.predicate in kb.queryable


def select_next_question(state: InformationState, domain: Domain, kb: DirectoryKb) -> Question | None:
    """First unanswered, undeclined ask-feature of the active goal's subject."""
    active = _active_resolve(state)
    if active is None:
        return None
    subject = _find_subject(active.goal)
    if subject is None:
        return None
    spec = lookup_parameters(domain, subject)
    if spec is None:
        return None
    for ask in spec.ask_features:
        if ask.predicate in state.constraints or ask.predicate in state.declined:
            continue
        wh = WhQuestion(ask.predicate, kb.feature_sorts[ask.predicate])
        return KPQ(wh) if ask.kpq else wh
    return None


def _resume(state: InformationState, domain: Domain, kb: DirectoryKb) -> list[SystemAction]:
    """Re-raise the outer resolve goal after an inner goal was dealt with."""
    outer = _active_resolve(state)
    if outer is None:
        return []
    actions: list[SystemAction] = [ResumeGoal(outer.goal)]
    next_question = select_next_question(state, domain, kb)
    if next_question is None:
        return actions
    if state.last_count is not None:
        actions.append(ReportCount(state.last_count))
    state.qud = next_question
    actions.append(AskQuestion(next_question))
    return actions


def _refine(state: InformationState, domain: Domain, kb: DirectoryKb) -> list[SystemAction]:
    rs = search(kb, state.constraints)
    if rs.count == 0:
        # Keep the dialogue alive: retract the most recent constraint(s)
        # until something matches again, and leave the previous count.
        while state.constraints and search(kb, state.constraints).count == 0:
            last_added = next(reversed(state.constraints))
            del state.constraints[last_added]
        state.alternatives = search(kb, state.constraints)
        return [ReportNoMatches()]

    previous = state.last_count
    state.last_count = rs.count
    state.alternatives = rs
    active = _active_resolve(state)

    if rs.count == 1 and active is not None:
        invoke = next((i for i in active.remaining_plan if isinstance(i, InvokeServiceQuery)), None)
        if invoke is not None:
            entity = rs.matches[0]
            value = Individual(kb.feature_sorts[invoke.predicate], entity.feature(invoke.predicate))
            actions: list[SystemAction] = [
                ReportValue(invoke.predicate, entity, value, reanswer=active.reopened)
            ]
            state.goal_stack.pop()
            state.resolved_goal = replace(active, remaining_plan=(), status="resolved", reopened=False)
            state.qud = None
            actions.extend(_resume(state, domain, kb))
            return actions

    actions = []
    if rs.count != previous:
        actions.append(ReportCount(rs.count))
    next_question = select_next_question(state, domain, kb)
    if next_question is not None:
        state.qud = next_question
        actions.append(AskQuestion(next_question))
    elif not actions and active is not None:
        # Features exhausted with several candidates left: restate the count
        # rather than going silent.
        actions.append(ReportCount(rs.count))
    return actions


def refine(state: InformationState, domain: Domain, kb: DirectoryKb) -> tuple[InformationState, list[SystemAction]]:
    """Re-run the search after a constraint change and pick the next move."""
    state = state.clone()
    return state, _refine(state, domain, kb)


def _apply_revision(state: InformationState, proposition: Proposition) -> None:
    state.constraints[proposition.predicate] = proposition.value
    state.declined.discard(proposition.predicate)
    if _active_resolve(state) is None and state.resolved_goal is not None:
        reopened = state.resolved_goal
        invokes = tuple(i for i in reopened.goal.plan if isinstance(i, InvokeServiceQuery))
        state.goal_stack.append(replace(reopened, remaining_plan=invokes, status="in-progress", reopened=True))
        state.resolved_goal = None


def revise(
    state: InformationState, proposition: Proposition, domain: Domain, kb: DirectoryKb
) -> tuple[InformationState, list[SystemAction]]:
    """Replace or add a committed constraint, reopening a resolved goal if needed."""
    if proposition.predicate not in kb.queryable:
        raise UnknownPredicate(proposition.predicate)
    state = state.clone()
    acknowledged = _is_feature_question(state, kb)
    state.qud = None
    _apply_revision(state, proposition)
    actions = _refine(state, domain, kb)
    if acknowledged:
        actions.insert(0, Acknowledge())
    return state, actions


def resume_outer_goal(
    state: InformationState, domain: Domain, kb: DirectoryKb
) -> tuple[InformationState, list[SystemAction]]:
    state = state.clone()
    return state, _resume(state, domain, kb)


def _answer_alternatives(
    state: InformationState, question: WhQuestion, domain: Domain, kb: DirectoryKb
) -> list[SystemAction]:
    goal = domain.resolve_goal_for(question.predicate)
    if goal is None or goal.max_answers is None or goal.alternatives_predicate is None:
        raise NoAlternativesEstablished(f"no alternatives goal for {question.predicate!r}")
    if state.alternatives is None:
        raise NoAlternativesEstablished("no candidate set has been established yet")

    count = state.alternatives.count
    if 1 <= count <= goal.max_answers:
        pairs = tuple(project(state.alternatives, question.predicate))
        # The alternatives goal is pushed, answered from the established set,
        # and popped as resolved in one step; then the outer goal is resumed.
        actions: list[SystemAction] = [ReportAlternativeValues(question.predicate, pairs)]
        actions.extend(_resume(state, domain, kb))
        return actions

    # Too many candidates to enumerate: restate the count and re-raise the
    # pending feature question.
    actions = [ReportCount(count)]
    if state.qud is not None:
        actions.append(AskQuestion(state.qud))
    else:
        next_question = select_next_question(state, domain, kb)
        if next_question is not None:
            state.qud = next_question
            actions.append(AskQuestion(next_question))
    return actions


def answer_alternatives(
    state: InformationState, question: WhQuestion, domain: Domain, kb: DirectoryKb
) -> tuple[InformationState, list[SystemAction]]:
    state = state.clone()
    return state, _answer_alternatives(state, question, domain, kb)


@dataclass
class _TurnEffects:
    acknowledged: bool = False
    dirty: bool = False
    pushed_goal: bool = False
    needs_next_question: bool = False
    staged: list[SystemAction] = field(default_factory=list)
    integrated: bool = False


def _stage_answer(
    state: InformationState, answer: Answer, domain: Domain, kb: DirectoryKb, effects: _TurnEffects
) -> None:
    qud = state.qud
    feature_qud = _is_feature_question(state, kb)

    if feature_qud and isinstance(answer, (No, DontKnow)):
        embedded = qud.embedded if isinstance(qud, KPQ) else qud
        state.declined.add(embedded.predicate)
        state.qud = None
        effects.acknowledged = True
        effects.needs_next_question = True
        effects.integrated = True
        return

    if qud is not None and isinstance(answer, Yes) and resolves(answer, qud):
        effects.acknowledged = feature_qud
        effects.integrated = True
        if isinstance(qud, KPQ):
            # The user knows the answer but did not give it: ask the embedded
            # wh-question directly.
            state.qud = qud.embedded
            effects.staged.append(AskQuestion(qud.embedded))
        else:
            state.qud = None
        return

    if qud is not None and resolves(answer, qud) and is_content_answer(answer):
        proposition = combine(answer, qud)
        if proposition is not None and proposition.predicate in kb.queryable:
            state.constraints[proposition.predicate] = proposition.value
            state.declined.discard(proposition.predicate)
            state.qud = None
            effects.acknowledged = feature_qud
            effects.dirty = True
            effects.integrated = True
            return

    if is_content_answer(answer):
        # Unsolicited or question-displacing content: treat as a constraint
        # contribution or revision if it names a searchable feature.
        if isinstance(answer, PropositionAnswer):
            proposition = answer.proposition
        else:
            predicate = kb.feature_for_sort(answer.value.sort)
            proposition = Proposition(predicate, answer.value) if predicate else None
        if proposition is not None and proposition.predicate in kb.queryable:
            effects.acknowledged = effects.acknowledged or feature_qud
            state.qud = None
            _apply_revision(state, proposition)
            effects.dirty = True
            effects.integrated = True
            return
    # Nothing integrated; the caller decides whether the turn as a whole
    # was understood.


def handle_answer(
    state: InformationState, answer: Answer, domain: Domain, kb: DirectoryKb
) -> tuple[InformationState, list[SystemAction]]:
    """Integrate a single answer against the question under discussion."""
    return integrate(state, AnswerMove(answer), domain, kb)


def integrate(
    state: InformationState,
    move: Move | list[Move],
    domain: Domain,
    kb: DirectoryKb,
) -> tuple[InformationState, list[SystemAction]]:
    """Integrate one user turn (a move or a bundle of moves) into the state.

    All constraint contributions land before a single search refinement, so a
    turn like "the number for Anna Andersson in Gothenburg" produces one
    count report.
    """
    moves = move if isinstance(move, list) else [move]
    state = state.clone()
    effects = _TurnEffects()

    for m in moves:
        if isinstance(m, Greet):
            effects.staged.append(Acknowledge())
            effects.integrated = True
        elif isinstance(m, Quit):
            state.ended = True
            effects.integrated = True
        elif isinstance(m, Request):
            goal = domain.resolve_goal_for(m.goal)
            if goal is None:
                continue
            if state.qud == GOAL_QUESTION:
                state.qud = None
            remaining = list(goal.plan)
            while remaining and isinstance(remaining[0], ForgetAll):
                _forget_all(state)
                remaining.pop(0)
            state.goal_stack.append(ActiveGoal(goal, tuple(remaining), "in-progress"))
            effects.pushed_goal = True
            effects.integrated = True
        elif isinstance(m, AnswerMove):
            _stage_answer(state, m.answer, domain, kb, effects)
        elif isinstance(m, Ask):
            if isinstance(m.question, WhQuestion):
                try:
                    effects.staged.extend(_answer_alternatives(state, m.question, domain, kb))
                    effects.integrated = True
                except NoAlternativesEstablished:
                    pass

    actions: list[SystemAction] = []
    if effects.acknowledged:
        actions.append(Acknowledge())
    actions.extend(effects.staged)

    if effects.dirty or (effects.pushed_goal and state.constraints):
        actions.extend(_refine(state, domain, kb))
    elif effects.pushed_goal or effects.needs_next_question:
        next_question = select_next_question(state, domain, kb)
        if next_question is not None:
            state.qud = next_question
            actions.append(AskQuestion(next_question))

    if not actions and not effects.integrated:
        actions.append(NotUnderstood())
    return state, actions
