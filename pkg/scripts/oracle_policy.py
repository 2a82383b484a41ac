#!/usr/bin/env python3
"""Freeze the rule-based agent policy decision table before implementation.

Enumerates conversation situations and the action the slot-filling policy
must take in each, building every model-input string inline (no package
imports). Slot order: movie -> location/theater -> date -> time -> count.
Writes tests/data/policy_cases.json; the test suite replays the inputs
against the implementation and compares kinds, API strings, and wording.
"""

import json
import pathlib

U, A, C = "<U>", "<A>", "<C>"


def user(text):
    return U + text


def agent(text):
    return A + text


def call(name, *args):
    out = "<PN>" + name
    for k, v in args:
        out += "<PAN>" + k + "<PAV>" + v
    return out


def result(name, *args):
    out = "<PR>" + name
    for k, values in args:
        out += "<PRAN>" + k
        for v in values:
            out += "<PRAV>" + v
    return out


def model_input(pending, context):
    return pending + (C + context if context else "")


# Shared agent wordings (frozen here; implementation must match byte-for-byte).
ASK_GENRE = "Sure. I can help you with that. What kind of movies are you interested in?"
ASK_MOVIE_PICK = "Which movie would you like to see?"
ASK_THEATER = "OK. Do you have any theaters in mind?"
ASK_THEATER_PICK = "Which theater would you like?"
ASK_DATE = "What day would you like to go?"
ASK_TIME_PICK = "What time works for you?"
ASK_COUNT = "How many tickets would you like?"
NO_MOVIES = "I could not find any matching movies."
CLOSING = "You are all set. Enjoy the show!"

# The canonical six-turn booking conversation, built up incrementally.
E0 = user("Can you help me book a movie ticket?")
A0 = agent(ASK_GENRE)
E1 = user("I'd like to see John Wick.")
A1 = agent(ASK_THEATER)
E2 = user("Are there any theaters nearby?")
C2 = call("find_theaters", ("location", "nearby"), ("name.movie", "John Wick"))
R2 = result("find_theaters", ("name.theater", ["AMC 20", "Century City 16"]))
A2 = agent("It is showing at AMC 20 and Century City 16.")
E3 = user("Let's do AMC 20 tonight.")
C3 = call(
    "find_showtimes",
    ("location", "nearby"),
    ("name.movie", "John Wick"),
    ("name.theater", "AMC 20"),
    ("date", "tonight"),
)
R3 = result("find_showtimes", ("time.showing", ["19:00", "21:45"]))
A3 = agent("Available showtimes are 19:00 and 21:45.")
E4 = user("7 pm works. Two tickets please.")
A4 = agent("You want 2 tickets for John Wick at AMC 20 tonight at 19:00. Shall I book them?")
E5 = user("Yes, please book it.")
C5 = call(
    "book_tickets",
    ("name.movie", "John Wick"),
    ("name.theater", "AMC 20"),
    ("date", "tonight"),
    ("time.showing", "19:00"),
    ("num.tickets", "2"),
)
R5 = result("book_tickets", ("status", ["success"]), ("ref.id", ["BK-0001"]))
A5 = agent("Your tickets are booked! Your confirmation id is BK-0001. Enjoy the show!")


def verbal(case_id, pending, context, exact=None, substrings=None):
    expect = {"kind": "verbal"}
    if exact is not None:
        expect["exact_text"] = exact
    if substrings:
        expect["substrings"] = substrings
    return {"id": case_id, "input": model_input(pending, context), "expect": expect}


def calls(case_id, pending, context, target):
    return {
        "id": case_id,
        "input": model_input(pending, context),
        "expect": {"kind": "calls", "exact_target": target},
    }


CASES = [
    # Opening request, nothing known: elicit the movie/genre slot.
    verbal("opening-elicit", E0, "", exact=ASK_GENRE),
    # Genre named up front: search immediately.
    calls(
        "genre-search",
        user("Are there any good action movies?"),
        "",
        call("find_movies", ("name.genre", "action")),
    ),
    # Genre plus a concrete location: both arguments, location first.
    calls(
        "genre-with-location",
        user("Any comedy playing in Mountain View?"),
        "",
        call("find_movies", ("location", "Mountain View"), ("name.genre", "comedy")),
    ),
    # Movie search results: echo every title.
    verbal(
        "movies-result",
        result("find_movies", ("name.movie", ["John Wick", "Jack Ryan"])),
        user("Are there any good action movies?") + agent(ASK_GENRE),
        exact="I found John Wick and Jack Ryan.",
    ),
    # Empty movie search: verbalize absence, never the sentinel.
    verbal(
        "movies-result-empty",
        result("find_movies", ("name.movie", ["none"])),
        user("Any westerns?") + call("find_movies", ("name.genre", "western")),
        exact=NO_MOVIES,
    ),
    # Movies offered but none picked yet: ask for the pick.
    verbal(
        "movie-pick-elicit",
        user("Hmm, let me think."),
        user("Are there any good action movies?")
        + call("find_movies", ("name.genre", "action"))
        + result("find_movies", ("name.movie", ["John Wick", "Jack Ryan"]))
        + agent("I found John Wick and Jack Ryan."),
        exact=ASK_MOVIE_PICK,
    ),
    # Movie known, no location or theater: elicit theaters.
    verbal("theater-elicit", E1, E0 + A0, exact=ASK_THEATER),
    # Movie known, user says nearby: search theaters.
    calls("theater-search", E2, E0 + A0 + E1 + A1, C2),
    # Theater results: name both theaters.
    verbal(
        "theaters-result",
        R2,
        E0 + A0 + E1 + A1 + E2 + C2,
        substrings=["AMC 20", "Century City 16"],
    ),
    # Theaters offered but none picked: ask for the pick.
    verbal(
        "theater-pick-elicit",
        user("What do you recommend?"),
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2,
        exact=ASK_THEATER_PICK,
    ),
    # Movie and theater known, no date: elicit the day.
    verbal(
        "date-elicit",
        user("I will go to AMC 20."),
        E1 + A1,
        exact=ASK_DATE,
    ),
    # Theater and date picked in one turn: fetch showtimes.
    calls("showtime-search", E3, E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2, C3),
    # Showtime results: list every time.
    verbal(
        "times-result",
        R3,
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3,
        substrings=["19:00", "21:45"],
    ),
    # Times offered, none picked: ask for the pick.
    verbal(
        "time-pick-elicit",
        user("Those are late."),
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3,
        exact=ASK_TIME_PICK,
    ),
    # Count still missing after a time pick: elicit the count.
    verbal(
        "count-elicit",
        user("The 19:00 showing."),
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3,
        exact=ASK_COUNT,
    ),
    # All five slots filled, not yet confirmed: read back and ask.
    verbal(
        "confirm-question",
        E4,
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3,
        exact="You want 2 tickets for John Wick at AMC 20 tonight at 19:00. Shall I book them?",
    ),
    # Confirmation given: book with all five arguments.
    calls(
        "booking-call",
        E5,
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3 + E4 + A4,
        C5,
    ),
    # Booking result: confirmation id echoed.
    verbal(
        "booking-result",
        R5,
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3 + E4 + A4 + E5 + C5,
        substrings=["BK-0001"],
    ),
    # Anything after a successful booking: closing line.
    verbal(
        "after-booked",
        user("Great, thanks!"),
        E0 + A0 + E1 + A1 + E2 + C2 + R2 + A2 + E3 + C3 + R3 + A3 + E4 + A4 + E5 + C5 + R5 + A5,
        exact=CLOSING,
    ),
    # Adapter error result: apologize and echo the reason.
    verbal(
        "error-result",
        result("find_theaters", ("error", ["find_theaters requires argument 'location'"])),
        E1 + A1 + user("Check theaters.") + call("find_theaters", ("name.movie", "John Wick")),
        substrings=["find_theaters requires argument 'location'"],
    ),
]


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "policy_cases.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(CASES, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(CASES)} cases to {out}")


if __name__ == "__main__":
    main()
