from __future__ import annotations

from dataclasses import replace

import pytest

from negotia_dm.ddd import (
    Findout,
    ForgetAll,
    InvokeServiceQuery,
    SchemaError,
    XmlSyntaxError,
    lookup_parameters,
    parse_ddd,
    validate,
)

from conftest import FIGURE1_XML

MINIMAL = (
    '<domain name="D"><goal type="perform" action="top">'
    "<plan><forget_all/><findout type=\"goal\"/></plan></goal></domain>"
)


def test_parse_reference_domain_structure():
    domain = parse_ddd(FIGURE1_XML)
    assert domain.name == "PhoneDirectoryDomain"
    assert len(domain.goals) == 3

    top, phone, age = domain.goals
    assert top.goal_type == "perform" and top.target == "top"
    assert top.plan == (ForgetAll(), Findout("goal"))

    assert phone.goal_type == "resolve" and phone.target == "phonenumber"
    assert phone.question_type == "wh_question"
    assert phone.max_answers is None and phone.alternatives_predicate is None
    assert phone.plan == (
        Findout("wh_question", "person"),
        InvokeServiceQuery("wh_question", "phonenumber"),
    )

    assert age.goal_type == "resolve" and age.target == "age"
    assert age.max_answers == 3
    assert age.alternatives_predicate == "person"

    assert len(domain.parameters) == 1
    params = domain.parameters[0]
    assert params.subject_predicate == "person"
    assert params.source == "service"
    assert params.incremental is True
    assert [(f.predicate, f.kpq) for f in params.ask_features] == [
        ("person_name", False),
        ("person_city", True),
        ("person_street_name", True),
    ]


def test_parse_minimal_domain():
    domain = parse_ddd(MINIMAL)
    assert len(domain.goals) == 1
    assert domain.goals[0].plan == (ForgetAll(), Findout("goal"))


def test_parse_is_deterministic():
    assert parse_ddd(FIGURE1_XML) == parse_ddd(FIGURE1_XML)


def test_element_order_is_preserved():
    domain = parse_ddd(FIGURE1_XML)
    features = domain.parameters[0].ask_features
    # Document order, checked against the raw text positions.
    positions = [FIGURE1_XML.index(f'predicate="{f.predicate}"') for f in features]
    assert positions == sorted(positions)


def test_dropping_alternatives_attributes_only_changes_age_goal():
    # Oracle: structural diff against the full parse.
    edited = FIGURE1_XML.replace('max_answers="3" alternatives_predicate="person"', "")
    assert "max_answers" not in edited
    full = parse_ddd(FIGURE1_XML)
    stripped = parse_ddd(edited)
    expected_age = replace(full.goals[2], max_answers=None, alternatives_predicate=None)
    assert stripped == replace(full, goals=(full.goals[0], full.goals[1], expected_age))


def test_malformed_xml_raises_syntax_error():
    with pytest.raises(XmlSyntaxError):
        parse_ddd("<domain name='D'><goal></domain>")


@pytest.mark.parametrize(
    "xml, code",
    [
        ('<domain name="D"><shenanigans/></domain>', "UNKNOWN_ELEMENT"),
        ('<domain name="D" color="red"></domain>', "UNKNOWN_ATTRIBUTE"),
        ('<domain></domain>', "MISSING_ATTRIBUTE"),
        ('<domain name="D"><goal type="perform"><plan><forget_all/></plan></goal></domain>', "MISSING_ATTRIBUTE"),
        ('<domain name="D"><goal type="chat" action="top"><plan><forget_all/></plan></goal></domain>', "BAD_GOAL_TYPE"),
        ('<domain name="D"><goal type="perform" action="top"><plan><findout type="goal" predicate="x"/></plan></goal></domain>', "UNEXPECTED_ATTRIBUTE"),
        ('<domain name="D"><goal type="perform" action="top"><plan><findout type="alt_question"/></plan></goal></domain>', "BAD_QUESTION_TYPE"),
        ('<domain name="D"><goal type="perform" action="top"><plan><findout type="wh_question"/></plan></goal></domain>', "MISSING_ATTRIBUTE"),
        ('<domain name="D"><parameters question_type="wh_question" predicate="p" source="magic"/></domain>', "BAD_SOURCE"),
        ('<domain name="D"><parameters question_type="wh_question" predicate="p" source="service" incremental="yes"/></domain>', "BAD_BOOLEAN"),
        ('<domain name="D"><goal type="resolve" question_type="wh_question" predicate="p" max_answers="few"><plan><forget_all/></plan></goal></domain>', "BAD_INTEGER"),
    ],
)
def test_schema_errors(xml, code):
    with pytest.raises(SchemaError) as exc:
        parse_ddd(xml)
    assert exc.value.diagnostic.code == code
    assert exc.value.diagnostic.location


def test_schema_error_names_element_path():
    xml = (
        '<domain name="D"><goal type="perform" action="top">'
        '<plan><forget_all/><mystery/></plan></goal></domain>'
    )
    with pytest.raises(SchemaError) as exc:
        parse_ddd(xml)
    assert exc.value.diagnostic.location == "domain/goal[1]/plan[1]/mystery[2]"


def test_validate_reference_domain_is_clean():
    assert validate(parse_ddd(FIGURE1_XML)) == []


def test_validate_unknown_alternatives_predicate():
    xml = FIGURE1_XML.replace('alternatives_predicate="person"', 'alternatives_predicate="pet"')
    diagnostics = validate(parse_ddd(xml))
    assert [d.code for d in diagnostics] == ["UNKNOWN_PREDICATE"]
    assert diagnostics[0].severity == "error"


def test_validate_duplicate_top():
    xml = MINIMAL.replace(
        "</domain>",
        '<goal type="perform" action="top"><plan><forget_all/></plan></goal></domain>',
    )
    diagnostics = validate(parse_ddd(xml))
    assert [d.code for d in diagnostics] == ["DUPLICATE_TOP"]


def test_validate_missing_top():
    xml = (
        '<domain name="D"><goal type="resolve" question_type="wh_question" predicate="p">'
        "<plan><invoke_service_query type=\"wh_question\" predicate=\"p\"/></plan></goal></domain>"
    )
    codes = {d.code for d in validate(parse_ddd(xml))}
    assert "MISSING_TOP" in codes


def test_validate_unpaired_alternatives_attributes():
    xml = FIGURE1_XML.replace(' alternatives_predicate="person"', "")
    codes = [d.code for d in validate(parse_ddd(xml))]
    assert codes == ["UNPAIRED_ALTERNATIVES"]


def test_validate_empty_plan_and_unresolvable_predicate():
    xml = (
        '<domain name="D">'
        '<goal type="perform" action="top"><plan/></goal>'
        '<goal type="resolve" question_type="wh_question" predicate="p">'
        '<plan><findout type="wh_question" predicate="ghost"/></plan></goal>'
        "</domain>"
    )
    codes = {d.code for d in validate(parse_ddd(xml))}
    assert codes == {"EMPTY_PLAN", "UNKNOWN_PREDICATE"}


def test_lookup_parameters():
    domain = parse_ddd(FIGURE1_XML)
    params = lookup_parameters(domain, "person")
    assert params is not None and params.subject_predicate == "person"
    assert lookup_parameters(domain, "age") is None
    assert lookup_parameters(parse_ddd(MINIMAL), "person") is None
