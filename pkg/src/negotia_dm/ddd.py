"""Dialogue domain descriptions: data model, XML parser and validator.

The XML format is deliberately small: a domain holds goals with plans built
from forget_all / findout / invoke_service_query items, plus parameters
blocks listing the features used to narrow a search.  Unknown elements and
attributes are hard errors; the format is too small for silent acceptance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Union
from xml.etree import ElementTree


@dataclass(frozen=True)
class Diagnostic:
    severity: Literal["error", "warning"]
    code: str
    message: str
    location: str

    def __str__(self) -> str:
        return f"{self.severity} [{self.code}] at {self.location}: {self.message}"


class XmlSyntaxError(Exception):
    pass


class SchemaError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


@dataclass(frozen=True)
class ForgetAll:
    pass


@dataclass(frozen=True)
class Findout:
    question_type: Literal["goal", "wh_question"]
    predicate: str | None = None


@dataclass(frozen=True)
class InvokeServiceQuery:
    question_type: Literal["wh_question"]
    predicate: str


PlanItem = Union[ForgetAll, Findout, InvokeServiceQuery]


@dataclass(frozen=True)
class Goal:
    goal_type: Literal["perform", "resolve"]
    target: str
    plan: tuple[PlanItem, ...]
    question_type: str | None = None
    max_answers: int | None = None
    alternatives_predicate: str | None = None

    @property
    def is_resolve(self) -> bool:
        return self.goal_type == "resolve"


@dataclass(frozen=True)
class AskFeature:
    predicate: str
    kpq: bool = False


@dataclass(frozen=True)
class ParametersSpec:
    subject_predicate: str
    question_type: str
    source: str
    incremental: bool
    ask_features: tuple[AskFeature, ...]


@dataclass(frozen=True)
class Domain:
    name: str
    goals: tuple[Goal, ...]
    parameters: tuple[ParametersSpec, ...]

    def resolve_goal_for(self, predicate: str) -> Goal | None:
        for goal in self.goals:
            if goal.is_resolve and goal.target == predicate:
                return goal
        return None

    def declared_predicates(self) -> set[str]:
        declared = {g.target for g in self.goals if g.is_resolve}
        for spec in self.parameters:
            declared.add(spec.subject_predicate)
            declared.update(f.predicate for f in spec.ask_features)
        return declared


_ATTRS = {
    "domain": {"name"},
    "goal": {"type", "action", "question_type", "predicate", "max_answers", "alternatives_predicate"},
    "plan": set(),
    "forget_all": set(),
    "findout": {"type", "predicate"},
    "invoke_service_query": {"type", "predicate"},
    "parameters": {"question_type", "predicate", "source", "incremental"},
    "ask_feature": {"predicate", "kpq"},
}


def _schema_error(code: str, message: str, location: str) -> SchemaError:
    return SchemaError(Diagnostic("error", code, message, location))


def _check_attrs(elem: ElementTree.Element, location: str) -> None:
    if elem.tag not in _ATTRS:
        raise _schema_error("UNKNOWN_ELEMENT", f"unknown element <{elem.tag}>", location)
    for attr in elem.attrib:
        if attr not in _ATTRS[elem.tag]:
            raise _schema_error("UNKNOWN_ATTRIBUTE", f"unknown attribute {attr!r} on <{elem.tag}>", location)


def _required(elem: ElementTree.Element, attr: str, location: str) -> str:
    value = elem.get(attr)
    if value is None:
        raise _schema_error("MISSING_ATTRIBUTE", f"<{elem.tag}> requires attribute {attr!r}", location)
    return value


def _forbidden(elem: ElementTree.Element, attr: str, location: str, why: str) -> None:
    if elem.get(attr) is not None:
        raise _schema_error("UNEXPECTED_ATTRIBUTE", f"attribute {attr!r} not allowed {why}", location)


def _boolean(elem: ElementTree.Element, attr: str, location: str, default: bool) -> bool:
    raw = elem.get(attr)
    if raw is None:
        return default
    if raw not in ("true", "false"):
        raise _schema_error("BAD_BOOLEAN", f"{attr}={raw!r} must be literal \"true\" or \"false\"", location)
    return raw == "true"


def _child_location(parent_loc: str, tag: str, index: int) -> str:
    return f"{parent_loc}/{tag}[{index}]"


def _parse_plan_item(elem: ElementTree.Element, location: str) -> PlanItem:
    _check_attrs(elem, location)
    if len(elem):
        raise _schema_error("UNEXPECTED_CHILD", f"<{elem.tag}> takes no children", location)
    if elem.tag == "forget_all":
        return ForgetAll()
    if elem.tag == "findout":
        qtype = _required(elem, "type", location)
        if qtype == "goal":
            _forbidden(elem, "predicate", location, "on goal-typed findout")
            return Findout("goal")
        if qtype == "wh_question":
            return Findout("wh_question", _required(elem, "predicate", location))
        raise _schema_error("BAD_QUESTION_TYPE", f"findout type={qtype!r} is not supported", location)
    if elem.tag == "invoke_service_query":
        qtype = _required(elem, "type", location)
        if qtype != "wh_question":
            raise _schema_error("BAD_QUESTION_TYPE", f"invoke_service_query type={qtype!r} is not supported", location)
        return InvokeServiceQuery("wh_question", _required(elem, "predicate", location))
    raise _schema_error("UNKNOWN_ELEMENT", f"<{elem.tag}> is not a plan item", location)


def _parse_goal(elem: ElementTree.Element, location: str) -> Goal:
    _check_attrs(elem, location)
    goal_type = _required(elem, "type", location)
    if goal_type not in ("perform", "resolve"):
        raise _schema_error("BAD_GOAL_TYPE", f"goal type={goal_type!r} is not supported", location)

    if goal_type == "perform":
        target = _required(elem, "action", location)
        for attr in ("question_type", "predicate", "max_answers", "alternatives_predicate"):
            _forbidden(elem, attr, location, "on a perform goal")
        question_type = None
    else:
        question_type = _required(elem, "question_type", location)
        target = _required(elem, "predicate", location)
        _forbidden(elem, "action", location, "on a resolve goal")

    max_answers: int | None = None
    raw_max = elem.get("max_answers")
    if raw_max is not None:
        try:
            max_answers = int(raw_max)
        except ValueError:
            raise _schema_error("BAD_INTEGER", f"max_answers={raw_max!r} is not an integer", location) from None

    plans = [child for child in elem]
    if len(plans) != 1 or plans[0].tag != "plan":
        raise _schema_error("BAD_PLAN", "goal must contain exactly one <plan>", location)
    plan_loc = _child_location(location, "plan", 1)
    _check_attrs(plans[0], plan_loc)
    items = tuple(
        _parse_plan_item(child, _child_location(plan_loc, child.tag, i + 1))
        for i, child in enumerate(plans[0])
    )
    return Goal(
        goal_type=goal_type,
        target=target,
        plan=items,
        question_type=question_type,
        max_answers=max_answers,
        alternatives_predicate=elem.get("alternatives_predicate"),
    )


def _parse_parameters(elem: ElementTree.Element, location: str) -> ParametersSpec:
    _check_attrs(elem, location)
    question_type = _required(elem, "question_type", location)
    if question_type != "wh_question":
        raise _schema_error("BAD_QUESTION_TYPE", f"parameters question_type={question_type!r} is not supported", location)
    source = _required(elem, "source", location)
    if source != "service":
        raise _schema_error("BAD_SOURCE", f"source={source!r} is not supported (only \"service\")", location)
    features = []
    for i, child in enumerate(elem):
        child_loc = _child_location(location, child.tag, i + 1)
        if child.tag != "ask_feature":
            raise _schema_error("UNKNOWN_ELEMENT", f"<{child.tag}> is not allowed in <parameters>", child_loc)
        _check_attrs(child, child_loc)
        if len(child):
            raise _schema_error("UNEXPECTED_CHILD", "<ask_feature> takes no children", child_loc)
        features.append(AskFeature(_required(child, "predicate", child_loc), _boolean(child, "kpq", child_loc, False)))
    return ParametersSpec(
        subject_predicate=_required(elem, "predicate", location),
        question_type=question_type,
        source=source,
        incremental=_boolean(elem, "incremental", location, False),
        ask_features=tuple(features),
    )


def parse_ddd(xml_text: str) -> Domain:
    """Parse a dialogue domain description; structure mirrors the element tree.

    Raises XmlSyntaxError for malformed XML and SchemaError (carrying a
    Diagnostic with the element path) for anything outside the format.
    """
    try:
        root = ElementTree.fromstring(xml_text)
    except ElementTree.ParseError as exc:
        raise XmlSyntaxError(str(exc)) from exc

    if root.tag != "domain":
        raise _schema_error("UNKNOWN_ELEMENT", f"root element must be <domain>, got <{root.tag}>", root.tag)
    _check_attrs(root, "domain")
    name = _required(root, "name", "domain")

    goals: list[Goal] = []
    parameters: list[ParametersSpec] = []
    goal_index = 0
    params_index = 0
    for child in root:
        if child.tag == "goal":
            goal_index += 1
            goals.append(_parse_goal(child, _child_location("domain", "goal", goal_index)))
        elif child.tag == "parameters":
            params_index += 1
            parameters.append(_parse_parameters(child, _child_location("domain", "parameters", params_index)))
        else:
            raise _schema_error("UNKNOWN_ELEMENT", f"<{child.tag}> is not allowed in <domain>", f"domain/{child.tag}")
    return Domain(name=name, goals=tuple(goals), parameters=tuple(parameters))


def parse_ddd_path(path: str | Path) -> Domain:
    return parse_ddd(Path(path).read_text(encoding="utf-8"))


def validate(domain: Domain) -> list[Diagnostic]:
    """All invariant violations; an empty list means the domain is runnable."""
    diagnostics: list[Diagnostic] = []

    def error(code: str, message: str, location: str) -> None:
        diagnostics.append(Diagnostic("error", code, message, location))

    top_goals = [
        (i, g) for i, g in enumerate(domain.goals, start=1)
        if g.goal_type == "perform" and g.target == "top"
    ]
    if not top_goals:
        error("MISSING_TOP", "domain has no perform goal with action \"top\"", "domain")
    for i, _ in top_goals[1:]:
        error("DUPLICATE_TOP", "more than one perform goal with action \"top\"", f"domain/goal[{i}]")

    declared = domain.declared_predicates()
    subjects = [spec.subject_predicate for spec in domain.parameters]

    for i, goal in enumerate(domain.goals, start=1):
        location = f"domain/goal[{i}]"
        if not goal.plan:
            error("EMPTY_PLAN", "plan must contain at least one item", location)
        if (goal.max_answers is None) != (goal.alternatives_predicate is None):
            error(
                "UNPAIRED_ALTERNATIVES",
                "max_answers and alternatives_predicate must be used together",
                location,
            )
        if goal.max_answers is not None and goal.max_answers < 1:
            error("INVALID_MAX_ANSWERS", f"max_answers={goal.max_answers} must be positive", location)
        if goal.alternatives_predicate is not None and goal.alternatives_predicate not in subjects:
            error(
                "UNKNOWN_PREDICATE",
                f"alternatives_predicate {goal.alternatives_predicate!r} has no parameters declaration",
                location,
            )
        for j, item in enumerate(goal.plan, start=1):
            predicate = getattr(item, "predicate", None)
            if predicate is not None and predicate not in declared:
                error(
                    "UNKNOWN_PREDICATE",
                    f"predicate {predicate!r} is not declared anywhere in the domain",
                    f"{location}/plan[1]/{type(item).__name__.lower()}[{j}]",
                )

    seen_subjects: set[str] = set()
    for i, spec in enumerate(domain.parameters, start=1):
        location = f"domain/parameters[{i}]"
        if not spec.ask_features:
            error("EMPTY_ASK_FEATURES", "parameters must list at least one ask_feature", location)
        feature_names = [f.predicate for f in spec.ask_features]
        for name in sorted({n for n in feature_names if feature_names.count(n) > 1}):
            error("DUPLICATE_ASK_FEATURE", f"ask_feature {name!r} listed more than once", location)
        if spec.subject_predicate in seen_subjects:
            error("DUPLICATE_PARAMETERS", f"second parameters block for {spec.subject_predicate!r}", location)
        seen_subjects.add(spec.subject_predicate)

    return diagnostics


def lookup_parameters(domain: Domain, predicate: str) -> ParametersSpec | None:
    for spec in domain.parameters:
        if spec.subject_predicate == predicate:
            return spec
    return None
