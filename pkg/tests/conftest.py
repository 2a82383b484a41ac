"""Shared fixtures: golden dialog, random dialog generator, KB paths."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from dialogkit import ApiInvocation, ApiResult, Dialog, KnowledgeBase, Speaker, Utterance
from dialogkit.service import DEFAULT_KB_PATH

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"
REPO_ROOT = TESTS_DIR.parent
SAMPLE50_PATH = REPO_ROOT / "src" / "dialogkit" / "data" / "sample50.json"

AGENT_HELP = "Sure. I can help you with that. What kind of movies are you interested in?"

GOLDEN_EVENTS = (
    Utterance(Speaker.USER, "I’d like to watch a movie."),
    Utterance(Speaker.AGENT, AGENT_HELP),
    Utterance(Speaker.USER, "Are there any good action movies?"),
    ApiInvocation("find_movies", (("name.genre", "action"),)),
    ApiResult("find_movies", (("name.movie", ("John Wick", "Jack Ryan")),)),
    Utterance(Speaker.AGENT, "I found John Wick and Jack Ryan."),
)

GOLDEN_SERIALIZED = (
    "<U>I’d like to watch a movie."
    f"<A>{AGENT_HELP}"
    "<U>Are there any good action movies?"
    "<PN>find_movies<PAN>name.genre<PAV>action"
    "<PR>find_movies<PRAN>name.movie<PRAV>John Wick<PRAV>Jack Ryan"
    "<A>I found John Wick and Jack Ryan."
)

GOLDEN_PAIRS = (
    (
        "<U>I’d like to watch a movie.",
        f"<A>{AGENT_HELP}",
    ),
    (
        "<U>Are there any good action movies?"
        f"<C><U>I’d like to watch a movie.<A>{AGENT_HELP}",
        "<PN>find_movies<PAN>name.genre<PAV>action",
    ),
    (
        "<PR>find_movies<PRAN>name.movie<PRAV>John Wick<PRAV>Jack Ryan"
        f"<C><U>I’d like to watch a movie.<A>{AGENT_HELP}"
        "<U>Are there any good action movies?"
        "<PN>find_movies<PAN>name.genre<PAV>action",
        "<A>I found John Wick and Jack Ryan.",
    ),
)

API_NAMES = ("find_movies", "find_theaters", "find_showtimes", "book_tickets", "lookup_misc")

WORD_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'.,!?:;-’é"


def random_dialog(rng: random.Random, dialog_id: str) -> Dialog:
    """A structurally valid random dialog: payloads never contain markers,
    results only follow same-name invocations."""

    def word(min_len: int = 1) -> str:
        return "".join(rng.choice(WORD_ALPHABET) for _ in range(rng.randint(min_len, 8)))

    def arg_name() -> str:
        return "".join(rng.choice("abcdefghijklmnopqrstuvwxyz.") for _ in range(rng.randint(1, 6))).strip(".") or "k"

    def text() -> str:
        return " ".join(word() for _ in range(rng.randint(1, 6)))

    events: list = []
    invoked: list[str] = []
    for _ in range(rng.randint(1, 12)):
        roll = rng.random()
        if roll < 0.40:
            events.append(Utterance(Speaker.USER, text()))
        elif roll < 0.70:
            events.append(Utterance(Speaker.AGENT, text()))
        elif roll < 0.88 or not invoked:
            name = rng.choice(API_NAMES)
            invoked.append(name)
            args = tuple((arg_name(), text()) for _ in range(rng.randint(0, 3)))
            events.append(ApiInvocation(name, args))
        else:
            name = rng.choice(invoked)
            args = tuple(
                (arg_name(), tuple(text() for _ in range(rng.randint(1, 3))))
                for _ in range(rng.randint(1, 3))
            )
            events.append(ApiResult(name, args))
    return Dialog(dialog_id, tuple(events))


@pytest.fixture
def golden_dialog() -> Dialog:
    return Dialog("golden", GOLDEN_EVENTS)


@pytest.fixture
def kb() -> KnowledgeBase:
    return KnowledgeBase.load(DEFAULT_KB_PATH)


def load_json(name: str):
    with open(DATA_DIR / name, encoding="utf-8") as fh:
        return json.load(fh)
