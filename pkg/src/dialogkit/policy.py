"""Deterministic rule-based agent backend for movie ticketing.

A stateless stand-in for a trained model: every prediction is recomputed
from the input string alone. It fills booking slots in the order
movie -> location/theater -> date -> time -> ticket count, emits API calls
when their required slots are ready, and verbalizes API results by template.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .adapter import EMPTY_MATCH, KnowledgeBase
from .codec import parse_stream, serialize_event, serialize_events, split_input
from .core import ApiInvocation, ApiResult, DialogEvent, Speaker, Utterance

DATE_WORDS = (
    "today",
    "tonight",
    "tomorrow",
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
)

NUMBER_WORDS = {
    "one": "1",
    "two": "2",
    "three": "3",
    "four": "4",
    "five": "5",
    "six": "6",
    "seven": "7",
    "eight": "8",
    "nine": "9",
    "ten": "10",
}

CONFIRM_PHRASES = ("book it", "please do", "go ahead")
CONFIRM_WORDS = ("yes", "yeah", "yep", "sure", "ok", "okay", "confirm")

ISO_DATE_RE = re.compile(r"\b\d{4}-\d{2}-\d{2}\b")
CLOCK_RE = re.compile(r"\b(\d{1,2}):(\d{2})\b")
MERIDIEM_RE = re.compile(r"\b(\d{1,2})(?::(\d{2}))?\s*([ap])\.?m\.?\b")
COUNT_RE = re.compile(r"\b(\d+|" + "|".join(NUMBER_WORDS) + r")\s+tickets?\b")
BARE_NUMBER_RE = re.compile(r"\b(\d+|" + "|".join(NUMBER_WORDS) + r")\b")

ASK_GENRE = "Sure. I can help you with that. What kind of movies are you interested in?"
ASK_MOVIE_PICK = "Which movie would you like to see?"
ASK_THEATER = "OK. Do you have any theaters in mind?"
ASK_THEATER_PICK = "Which theater would you like?"
ASK_DATE = "What day would you like to go?"
ASK_TIME_PICK = "What time works for you?"
ASK_COUNT = "How many tickets would you like?"
NO_MOVIES = "I could not find any matching movies."
NO_THEATERS = "I could not find any theaters showing it."
NO_TIMES = "I could not find any showtimes for that day."
CLOSING = "You are all set. Enjoy the show!"
FALLBACK = "Sorry, could you say that again?"


def join_values(values: tuple[str, ...] | list[str]) -> str:
    items = list(values)
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


@dataclass
class SlotState:
    """Booking slots recovered by scanning the full event history."""

    genre: str | None = None
    movie: str | None = None
    location: str | None = None
    theater: str | None = None
    date: str | None = None
    time: str | None = None
    count: str | None = None
    offered_movies: list[str] = field(default_factory=list)
    offered_theaters: list[str] = field(default_factory=list)
    offered_times: list[str] = field(default_factory=list)
    searched_genre: str | None = None
    searched_theaters_key: tuple[str, str] | None = None
    searched_times_key: tuple[str, str, str] | None = None
    booked_ref: str | None = None

    def all_booking_slots(self) -> bool:
        return None not in (self.movie, self.theater, self.date, self.time, self.count)


def normalize_time(hour: int, minute: int, meridiem: str | None) -> str | None:
    if meridiem == "p" and hour < 12:
        hour += 12
    elif meridiem == "a" and hour == 12:
        hour = 0
    if not (0 <= hour <= 23 and 0 <= minute <= 59):
        return None
    return f"{hour:02d}:{minute:02d}"


class RuleBasedBackend:
    """AgentBackend implementation driven by the KB fixture and fixed rules."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self._title_patterns = [
            (title, re.compile(r"\b" + re.escape(title.lower()) + r"\b"))
            for title in kb.movie_titles()
        ]
        self._theater_patterns = [
            (name, re.compile(r"\b" + re.escape(name.lower()) + r"\b"))
            for name in kb.theater_names()
        ]
        self._location_patterns = [
            (loc, re.compile(r"\b" + re.escape(loc.lower()) + r"\b")) for loc in kb.locations()
        ]
        self._genre_patterns = [
            (genre, re.compile(r"\b" + re.escape(genre.lower()) + r"\b")) for genre in kb.genres()
        ]

    def predict(self, input_text: str) -> str:
        recent, context = split_input(input_text)
        history: list[DialogEvent] = []
        if context:
            history.extend(parse_stream(context))
        pending = parse_stream(recent) if recent else []
        history.extend(pending)

        slots = self._scan(history)
        if pending and all(isinstance(event, ApiResult) for event in pending):
            return serialize_event(
                Utterance(Speaker.AGENT, " ".join(self._verbalize(r, slots) for r in pending))
            )
        last_user = next(
            (e.text for e in reversed(history) if isinstance(e, Utterance) and e.speaker == Speaker.USER),
            "",
        )
        return self._act(slots, last_user)

    # -- history scanning ----------------------------------------------------

    def _scan(self, events: list[DialogEvent]) -> SlotState:
        slots = SlotState()
        for event in events:
            if isinstance(event, Utterance):
                if event.speaker == Speaker.USER:
                    self._extract(event.text, slots)
            elif isinstance(event, ApiInvocation):
                self._absorb_invocation(event, slots)
            else:
                self._absorb_result(event, slots)
        return slots

    def _extract(self, text: str, slots: SlotState) -> None:
        lowered = text.lower()
        for title, pattern in self._title_patterns:
            if pattern.search(lowered):
                slots.movie = title
        for name, pattern in self._theater_patterns:
            if pattern.search(lowered):
                slots.theater = name
        for loc, pattern in self._location_patterns:
            if pattern.search(lowered):
                slots.location = loc
        if re.search(r"\bnearby\b", lowered):
            slots.location = "nearby"
        for genre, pattern in self._genre_patterns:
            if pattern.search(lowered):
                slots.genre = genre
        iso = ISO_DATE_RE.search(lowered)
        if iso:
            slots.date = iso.group(0)
        for word in DATE_WORDS:
            if re.search(r"\b" + word + r"\b", lowered):
                slots.date = word
        meridiem = MERIDIEM_RE.search(lowered)
        if meridiem:
            normalized = normalize_time(
                int(meridiem.group(1)), int(meridiem.group(2) or 0), meridiem.group(3)
            )
            if normalized:
                slots.time = normalized
        else:
            clock = CLOCK_RE.search(lowered)
            if clock:
                normalized = normalize_time(int(clock.group(1)), int(clock.group(2)), None)
                if normalized:
                    slots.time = normalized
        count = COUNT_RE.search(lowered)
        if count:
            slots.count = NUMBER_WORDS.get(count.group(1), count.group(1))

    def _absorb_invocation(self, invocation: ApiInvocation, slots: SlotState) -> None:
        args = dict(invocation.args)
        slots.genre = args.get("name.genre", slots.genre)
        slots.movie = args.get("name.movie", slots.movie)
        slots.location = args.get("location", slots.location)
        if invocation.name == "find_movies":
            slots.searched_genre = args.get("name.genre")
        elif invocation.name == "find_theaters":
            slots.searched_theaters_key = (args.get("location", ""), args.get("name.movie", ""))
        elif invocation.name == "find_showtimes":
            slots.theater = args.get("name.theater", slots.theater)
            slots.date = args.get("date", slots.date)
            slots.searched_times_key = (
                args.get("name.theater", ""),
                args.get("date", ""),
                args.get("name.movie", ""),
            )
        elif invocation.name == "book_tickets":
            slots.theater = args.get("name.theater", slots.theater)
            slots.date = args.get("date", slots.date)
            slots.time = args.get("time.showing", slots.time)
            slots.count = args.get("num.tickets", slots.count)

    def _absorb_result(self, result: ApiResult, slots: SlotState) -> None:
        def real(values: tuple[str, ...]) -> list[str]:
            return [v for v in values if v != EMPTY_MATCH]

        if result.name == "find_movies":
            slots.offered_movies = real(result.values("name.movie"))
        elif result.name == "find_theaters":
            slots.offered_theaters = real(result.values("name.theater"))
        elif result.name == "find_showtimes":
            slots.offered_times = real(result.values("time.showing"))
        elif result.name == "book_tickets":
            status = result.values("status")
            refs = result.values("ref.id")
            if status and status[0] == "success" and refs:
                slots.booked_ref = refs[0]

    # -- responses -----------------------------------------------------------

    def _verbalize(self, result: ApiResult, slots: SlotState) -> str:
        reasons = result.values("error")
        if reasons:
            return "Sorry, I hit a problem: " + join_values(reasons)
        if result.name == "find_movies":
            titles = [v for v in result.values("name.movie") if v != EMPTY_MATCH]
            return f"I found {join_values(titles)}." if titles else NO_MOVIES
        if result.name == "find_theaters":
            names = [v for v in result.values("name.theater") if v != EMPTY_MATCH]
            return f"It is showing at {join_values(names)}." if names else NO_THEATERS
        if result.name == "find_showtimes":
            times = [v for v in result.values("time.showing") if v != EMPTY_MATCH]
            return f"Available showtimes are {join_values(times)}." if times else NO_TIMES
        if result.name == "book_tickets":
            refs = result.values("ref.id")
            if refs:
                return f"Your tickets are booked! Your confirmation id is {refs[0]}. Enjoy the show!"
            return "I could not complete the booking."
        return FALLBACK

    def _act(self, slots: SlotState, last_user: str) -> str:
        if slots.booked_ref is not None:
            return self._say(CLOSING)
        if slots.all_booking_slots() and self._confirmed(last_user):
            return serialize_event(
                ApiInvocation(
                    "book_tickets",
                    (
                        ("name.movie", slots.movie),
                        ("name.theater", slots.theater),
                        ("date", slots.date),
                        ("time.showing", slots.time),
                        ("num.tickets", slots.count),
                    ),
                )
            )
        if slots.movie is None:
            return self._movie_stage(slots)
        if slots.theater is None:
            return self._theater_stage(slots)
        if slots.date is None:
            return self._say(ASK_DATE)
        if slots.time is None:
            return self._time_stage(slots)
        if slots.count is None:
            return self._count_stage(slots, last_user)
        date_part = slots.date if slots.date in DATE_WORDS else f"on {slots.date}"
        noun = "ticket" if slots.count == "1" else "tickets"
        return self._say(
            f"You want {slots.count} {noun} for {slots.movie} at {slots.theater} "
            f"{date_part} at {slots.time}. Shall I book them?"
        )

    def _movie_stage(self, slots: SlotState) -> str:
        if slots.genre is not None and slots.genre != slots.searched_genre:
            args: list[tuple[str, str]] = []
            if slots.location is not None:
                args.append(("location", slots.location))
            args.append(("name.genre", slots.genre))
            return serialize_event(ApiInvocation("find_movies", tuple(args)))
        if slots.offered_movies:
            return self._say(ASK_MOVIE_PICK)
        return self._say(ASK_GENRE)

    def _theater_stage(self, slots: SlotState) -> str:
        if slots.location is None:
            return self._say(ASK_THEATER)
        key = (slots.location, slots.movie or "")
        if slots.searched_theaters_key != key:
            return serialize_event(
                ApiInvocation(
                    "find_theaters", (("location", slots.location), ("name.movie", slots.movie))
                )
            )
        if slots.offered_theaters:
            return self._say(ASK_THEATER_PICK)
        return self._say(ASK_THEATER)

    def _time_stage(self, slots: SlotState) -> str:
        key = (slots.theater or "", slots.date or "", slots.movie or "")
        if slots.searched_times_key != key:
            return serialize_event(
                ApiInvocation(
                    "find_showtimes",
                    (
                        ("location", slots.location or "nearby"),
                        ("name.movie", slots.movie),
                        ("name.theater", slots.theater),
                        ("date", slots.date),
                    ),
                )
            )
        if slots.offered_times:
            return self._say(ASK_TIME_PICK)
        # Searched this theater/date and found nothing: try another day.
        return self._say(ASK_DATE)

    def _count_stage(self, slots: SlotState, last_user: str) -> str:
        # A bare number counts as the ticket count only once every other slot
        # is filled, and only after stripping the entity mentions that may
        # themselves contain digits (theater names, times, dates).
        text = last_user.lower()
        for known in (slots.theater, slots.movie, slots.time, slots.date):
            if known:
                text = text.replace(known.lower(), " ")
        match = BARE_NUMBER_RE.search(text)
        if match:
            slots.count = NUMBER_WORDS.get(match.group(1), match.group(1))
            return self._act(slots, "")
        return self._say(ASK_COUNT)

    def _confirmed(self, last_user: str) -> bool:
        lowered = last_user.lower()
        if any(phrase in lowered for phrase in CONFIRM_PHRASES):
            return True
        return any(re.search(r"\b" + word + r"\b", lowered) for word in CONFIRM_WORDS)

    def _say(self, text: str) -> str:
        return serialize_event(Utterance(Speaker.AGENT, text))


def rule_based_predict(input_text: str, kb: KnowledgeBase) -> str:
    """One-shot functional form of RuleBasedBackend.predict."""
    return RuleBasedBackend(kb).predict(input_text)
