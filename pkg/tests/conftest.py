from __future__ import annotations

import pytest

from negotia_dm.engine import integrate, new_session
from negotia_dm.nl import generate, interpret
from negotia_dm.service import DialogueContext, data_dir, load_context, qud_sort_of

FIGURE1_XML = (data_dir() / "phone_directory.xml").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def f1_context() -> DialogueContext:
    return load_context("phone_directory.xml", "f1_small.jsonl")


@pytest.fixture(scope="session")
def f2_context() -> DialogueContext:
    return load_context("phone_directory.xml", "f2_large.jsonl")


def run_turns(context: DialogueContext, utterances: list[str]):
    """Drive a fresh session through user utterances; returns final state and
    the per-turn (actions, rendered text) pairs."""
    state = new_session(context.domain, context.kb)
    turns = []
    for utterance in utterances:
        moves = interpret(utterance, context.lexicon, qud_sort_of(state, context.lexicon))
        state, actions = integrate(state, moves, context.domain, context.kb)
        turns.append((actions, generate(actions, context.lexicon)))
    return state, turns
