"""Argument resolution and the deterministic mock movie-ticketing KB.

The adapter sits between predicted API calls and the knowledge base: it
rewrites coreferential argument values ("tonight", "nearby") into concrete
ones, dispatches to the KB, and always hands the runtime an ApiResult —
invocation failures come back as {error: [reason]} results so they can be
folded into the transcript.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass, field
from pathlib import Path
from zoneinfo import ZoneInfo

from .core import ApiInvocation, ApiResult

WEEKDAYS = ["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"]

EVENING_START = "18:00"
EVENING_FILTER_ARG = "time.after"

# Sentinel value returned when a lookup matches nothing, so that every
# response argument still carries at least one value.
EMPTY_MATCH = "none"

KNOWN_APIS = ("find_movies", "find_theaters", "find_showtimes", "book_tickets")

REQUIRED_ARGS = {
    "find_movies": (),
    "find_theaters": ("location",),
    "find_showtimes": ("location", "name.movie", "name.theater", "date"),
    "book_tickets": ("name.movie", "name.theater", "date", "time.showing", "num.tickets"),
}


class ApiError(Exception):
    """Base for invocation failures; convertible to a transcript-safe result."""

    def __init__(self, api_name: str, reason: str):
        super().__init__(reason)
        self.api_name = api_name
        self.reason = reason

    def to_result(self) -> ApiResult:
        return ApiResult(self.api_name, (("error", (self.reason,)),))


class UnknownApi(ApiError):
    def __init__(self, name: str):
        super().__init__(name, f"unknown API {name!r}")


class MissingRequiredArg(ApiError):
    def __init__(self, api_name: str, arg: str):
        super().__init__(api_name, f"{api_name} requires argument {arg!r}")
        self.arg = arg


class DuplicateArg(ApiError):
    def __init__(self, api_name: str, arg: str):
        super().__init__(api_name, f"duplicate argument {arg!r}")
        self.arg = arg


class KbSchemaError(ValueError):
    """The fixture file does not satisfy the KB schema."""


@dataclass(frozen=True)
class ResolutionContext:
    """Per-session anchors for coreference resolution.

    clock_anchor is fixed at session creation, so resolving the same phrase
    twice in one session gives the same answer.
    """

    clock_anchor: dt.datetime
    default_location: str
    timezone: str = "UTC"

    def anchor_date(self) -> dt.date:
        anchor = self.clock_anchor
        if anchor.tzinfo is not None:
            anchor = anchor.astimezone(ZoneInfo(self.timezone))
        return anchor.date()


def resolve_date_phrase(phrase: str, ctx: ResolutionContext) -> tuple[str | None, bool]:
    """Map a coreferential date phrase to an ISO date.

    Returns (iso_date, evening) where evening marks "tonight"; (None, False)
    when the phrase is not recognized and should pass through.
    """
    key = phrase.strip().lower()
    base = ctx.anchor_date()
    if key in ("today", "tonight"):
        return base.isoformat(), key == "tonight"
    if key == "tomorrow":
        return (base + dt.timedelta(days=1)).isoformat(), False
    if key in WEEKDAYS:
        ahead = (WEEKDAYS.index(key) - base.weekday()) % 7
        return (base + dt.timedelta(days=ahead)).isoformat(), False
    return None, False


def resolve_args(invocation: ApiInvocation, ctx: ResolutionContext) -> ApiInvocation:
    """Rewrite coreferential values; unknown phrases pass through verbatim.

    "tonight" also appends a time.after=18:00 filter argument (once) so the
    KB can restrict showtimes to the evening.
    """
    args: list[tuple[str, str]] = []
    evening = False
    for name, value in invocation.args:
        if name == "date" or name.startswith("date."):
            resolved, is_evening = resolve_date_phrase(value, ctx)
            if resolved is not None:
                value = resolved
                evening = evening or is_evening
        elif name == "location" and value.strip().lower() == "nearby":
            value = ctx.default_location
        args.append((name, value))
    if evening and all(name != EVENING_FILTER_ARG for name, _ in args):
        args.append((EVENING_FILTER_ARG, EVENING_START))
    return ApiInvocation(invocation.name, tuple(args))


@dataclass
class Booking:
    ref_id: str
    movie: str
    theater: str
    date: str
    time: str
    num_tickets: str

    def to_dict(self) -> dict:
        return {
            "ref_id": self.ref_id,
            "movie": self.movie,
            "theater": self.theater,
            "date": self.date,
            "time": self.time,
            "num_tickets": self.num_tickets,
        }


@dataclass
class KnowledgeBase:
    """In-memory movie-ticketing fixture plus the append-only booking ledger.

    Lookups never mutate state; book() is the single mutating operation and
    appends exactly one ledger entry.
    """

    movies: list[dict]
    theaters: list[dict]
    showtimes: list[dict]
    bookings: list[Booking] = field(default_factory=list)
    ledger_path: Path | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "KnowledgeBase":
        if not isinstance(data, dict) or "schema_version" not in data:
            raise KbSchemaError("fixture must be an object with a schema_version field")
        if data["schema_version"] != 1:
            raise KbSchemaError(f"unsupported schema_version {data['schema_version']!r}")
        movies = list(data.get("movies", []))
        theaters = list(data.get("theaters", []))
        showtimes = list(data.get("showtimes", []))
        titles = {m["title"] for m in movies}
        names = {t["name"] for t in theaters}
        for show in showtimes:
            if show["theater"] not in names:
                raise KbSchemaError(f"showtime references unknown theater {show['theater']!r}")
            if show["movie"] not in titles:
                raise KbSchemaError(f"showtime references unknown movie {show['movie']!r}")
        return cls(movies=movies, theaters=theaters, showtimes=showtimes)

    @classmethod
    def load(cls, path: str | Path) -> "KnowledgeBase":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    # -- read-only views ---------------------------------------------------

    def movie_titles(self) -> list[str]:
        return [m["title"] for m in self.movies]

    def theater_names(self) -> list[str]:
        return [t["name"] for t in self.theaters]

    def genres(self) -> list[str]:
        seen: list[str] = []
        for movie in self.movies:
            for genre in movie.get("genres", []):
                if genre not in seen:
                    seen.append(genre)
        return seen

    def locations(self) -> list[str]:
        seen: list[str] = []
        for theater in self.theaters:
            if theater["location"] not in seen:
                seen.append(theater["location"])
        return seen

    def _theaters_at(self, location: str) -> list[dict]:
        loc = location.strip().lower()
        return [t for t in self.theaters if t["location"].strip().lower() == loc]

    def find_movies(self, location: str | None, genre: str | None) -> list[str]:
        titles = self.movie_titles()
        if genre is not None:
            g = genre.strip().lower()
            titles = [
                m["title"]
                for m in self.movies
                if any(g == x.strip().lower() for x in m.get("genres", []))
            ]
        if location is not None:
            showing = {
                title.lower()
                for t in self._theaters_at(location)
                for title in t.get("movie_titles", [])
            }
            titles = [t for t in titles if t.lower() in showing]
        return titles

    def find_theaters(self, location: str, movie: str | None) -> list[str]:
        theaters = self._theaters_at(location)
        if movie is not None:
            m = movie.strip().lower()
            theaters = [
                t
                for t in theaters
                if any(m == title.strip().lower() for title in t.get("movie_titles", []))
            ]
        return [t["name"] for t in theaters]

    def find_showtimes(
        self, location: str, movie: str, theater: str, date: str, after: str | None = None
    ) -> list[str]:
        theater_names = {t["name"].lower() for t in self._theaters_at(location)}
        times: list[str] = []
        for show in self.showtimes:
            if show["theater"].lower() != theater.strip().lower():
                continue
            if show["theater"].lower() not in theater_names:
                continue
            if show["movie"].lower() != movie.strip().lower():
                continue
            if show["date"] != date.strip():
                continue
            times.extend(show["times"])
        if after is not None:
            times = [t for t in times if t >= after]
        return times

    def book(self, movie: str, theater: str, date: str, time: str, num_tickets: str) -> Booking:
        booking = Booking(
            ref_id=f"BK-{len(self.bookings) + 1:04d}",
            movie=movie,
            theater=theater,
            date=date,
            time=time,
            num_tickets=num_tickets,
        )
        self.bookings.append(booking)
        if self.ledger_path is not None:
            with open(self.ledger_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(booking.to_dict(), ensure_ascii=False) + "\n")
        return booking


def _values_or_empty(values: list[str]) -> tuple[str, ...]:
    return tuple(values) if values else (EMPTY_MATCH,)


def invoke(invocation: ApiInvocation, kb: KnowledgeBase, ctx: ResolutionContext) -> ApiResult:
    """Dispatch a resolved invocation against the KB.

    Raises ApiError subtypes for unknown APIs, duplicate argument names and
    missing required arguments; use ApiAdapter.execute for the folding
    behavior the runtime wants.
    """
    name = invocation.name
    if name not in KNOWN_APIS:
        raise UnknownApi(name)
    seen: set[str] = set()
    for arg_name, _ in invocation.args:
        if arg_name in seen:
            raise DuplicateArg(name, arg_name)
        seen.add(arg_name)
    for required in REQUIRED_ARGS[name]:
        if invocation.arg(required) is None:
            raise MissingRequiredArg(name, required)

    if name == "find_movies":
        titles = kb.find_movies(invocation.arg("location"), invocation.arg("name.genre"))
        return ApiResult(name, (("name.movie", _values_or_empty(titles)),))
    if name == "find_theaters":
        theaters = kb.find_theaters(invocation.arg("location"), invocation.arg("name.movie"))
        return ApiResult(name, (("name.theater", _values_or_empty(theaters)),))
    if name == "find_showtimes":
        times = kb.find_showtimes(
            invocation.arg("location"),
            invocation.arg("name.movie"),
            invocation.arg("name.theater"),
            invocation.arg("date"),
            invocation.arg(EVENING_FILTER_ARG),
        )
        return ApiResult(name, (("time.showing", _values_or_empty(times)),))
    booking = kb.book(
        invocation.arg("name.movie"),
        invocation.arg("name.theater"),
        invocation.arg("date"),
        invocation.arg("time.showing"),
        invocation.arg("num.tickets"),
    )
    return ApiResult(name, (("status", ("success",)), ("ref.id", (booking.ref_id,))))


@dataclass
class ApiAdapter:
    """Bundles the KB and the per-session resolution context.

    config is a reserved block for API-specific plumbing (auth tokens,
    endpoint addresses, formatters); unused by the mock KB.
    """

    kb: KnowledgeBase
    ctx: ResolutionContext
    config: dict = field(default_factory=dict)

    def execute(self, invocation: ApiInvocation) -> tuple[ApiInvocation, ApiResult]:
        """Resolve, dispatch, and fold failures into an {error: [...]} result."""
        resolved = resolve_args(invocation, self.ctx)
        try:
            return resolved, invoke(resolved, self.kb, self.ctx)
        except ApiError as exc:
            return resolved, exc.to_result()
