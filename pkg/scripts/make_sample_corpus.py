#!/usr/bin/env python3
"""Generate the bundled 50-dialog sample corpus and its golden statistics.

Emits src/dialogkit/data/sample50.json in the external dataset schema
(array of conversations with utterances, entity segments, and attached API
calls) and tests/data/sample50_stats.json with statistics computed inline
here, independently of the package:

  turns                = utterance entries
  tokens               = whitespace split with trailing . , ! ? peeled off
                         as their own tokens
  unique tokens        = case-folded
  unique named entities = distinct segment texts, API argument values and
                          API response values

Deterministic: fixed RNG seed, no timestamps.
"""

import json
import pathlib
import random

SEED = 20201105

CITIES = [
    "Mountain View",
    "Oak Valley",
    "San Jose",
    "Palo Alto",
    "Sunnyvale",
    "Santa Clara",
    "Redwood City",
    "Fremont",
]
THEATERS = [
    "AMC Mercado 20",
    "Century Cinema 16",
    "ShowPlace Icon",
    "Aquarius Theatre",
    "CineLux Plaza",
    "Pruneyard Cinemas",
    "Landmark Guild",
    "Alameda Grand",
]
MOVIES = [
    "Crimson Tide Rising",
    "The Last Outpost",
    "Midnight in Georgia",
    "Paper Lanterns",
    "The Iron Harvest",
    "Quantum Drift",
    "A Winter Tale",
    "The Gilded Cage",
    "Starfall Protocol",
    "The Orchard Keeper",
    "Neon Skyline",
    "The Seventh Door",
    "Harbor Lights",
    "The Clockmaker Daughter",
    "Desert Mirage",
    "The Long Way Home",
    "Ashes of Empire",
    "The Velvet Hour",
    "Silent Canyon",
    "The Glass Garden",
]
GENRES = ["action", "comedy", "drama", "thriller", "romance", "horror", "animation"]
DATES = ["tonight", "tomorrow", "Thursday", "Friday", "Saturday", "Sunday"]
TIMES = ["16:30", "18:45", "19:00", "19:30", "20:00", "21:15"]
COUNTS = ["2", "3", "4"]

OPENERS = [
    "Hi, I want to see {movie} {date}.",
    "Hello, can you get me tickets for {movie} {date}?",
    "I would like to watch {movie} {date}.",
    "Hey there, is {movie} still in theaters? I want to go {date}.",
]
GENRE_OPENERS = [
    "Are there any good {genre} movies out right now?",
    "What {genre} movies are playing this week?",
    "I am in the mood for a {genre} movie.",
]


def segment(text, value):
    start = text.find(value)
    if start < 0:
        return None
    return {
        "start_index": start,
        "end_index": start + len(value),
        "text": value,
        "annotations": [{"name": "entity"}],
    }


def utter(speaker, text, entities=(), apis=None):
    entry = {"speaker": speaker, "text": text}
    segments = [s for s in (segment(text, v) for v in entities) if s is not None]
    if segments:
        entry["segments"] = segments
    if apis:
        entry["apis"] = apis
    return entry


def api(name, args, response):
    return {
        "name": name,
        "args": [{"arg_name": k, "arg_value": v} for k, v in args],
        "response": [{"response_name": k, "response_value": v} for k, values in response for v in values],
    }


def booking_dialog(rng, dashed):
    movie = rng.choice(MOVIES)
    city = rng.choice(CITIES)
    date = rng.choice(DATES)
    t1, t2 = rng.sample(THEATERS, 2)
    times = sorted(rng.sample(TIMES, 3))
    time = rng.choice(times)
    count = rng.choice(COUNTS)
    ref = f"C{rng.randint(100000, 999999)}"
    find_theaters = "find-theaters" if dashed else "find_theaters"
    find_showtimes = "find-showtimes" if dashed else "find_showtimes"
    book_tickets = "book-tickets" if dashed else "book_tickets"

    utterances = [
        utter("user", rng.choice(OPENERS).format(movie=movie, date=date), [movie, date]),
        utter("assistant", "Sure, I can help with that. Which city are you in?"),
        utter("user", f"I am in {city}.", [city]),
        utter(
            "assistant",
            f"{movie} is playing at {t1} and {t2}. Which theater do you prefer?",
            [movie, t1, t2],
            apis=[
                api(
                    find_theaters,
                    [("location", city), ("name.movie", movie)],
                    [("name.theater", [t1, t2])],
                )
            ],
        ),
        utter("user", f"Let us go with {t1}.", [t1]),
        utter(
            "assistant",
            f"Showtimes at {t1} for {date} are {times[0]}, {times[1]} and {times[2]}.",
            [t1, date] + times,
            apis=[
                api(
                    find_showtimes,
                    [
                        ("location", city),
                        ("name.movie", movie),
                        ("name.theater", t1),
                        ("date", date),
                    ],
                    [("time.showing", times)],
                )
            ],
        ),
        utter("user", f"{time} works for me.", [time]),
        utter("assistant", "How many tickets should I get?"),
        utter("user", f"{count} tickets please.", [count]),
        utter(
            "assistant",
            f"To confirm: {count} tickets for {movie} at {t1}, {date} at {time}. Shall I book it?",
            [count, movie, t1, date, time],
        ),
        utter("user", "Yes, go ahead."),
        utter(
            "assistant",
            f"Done! Your confirmation number is {ref}. Enjoy {movie}!",
            [ref, movie],
            apis=[
                api(
                    book_tickets,
                    [
                        ("name.movie", movie),
                        ("name.theater", t1),
                        ("date", date),
                        ("time.showing", time),
                        ("num.tickets", count),
                    ],
                    [("status", ["success"]), ("ref.id", [ref])],
                )
            ],
        ),
    ]
    if rng.random() < 0.6:
        utterances.append(utter("user", "Thanks so much!"))
        if rng.random() < 0.7:
            utterances.append(utter("assistant", "You are welcome. Have a great time!"))
    return utterances


def browse_dialog(rng, dashed):
    genre = rng.choice(GENRES)
    picks = rng.sample(MOVIES, 3)
    find_movies = "find-movies" if dashed else "find_movies"
    utterances = [
        utter("user", rng.choice(GENRE_OPENERS).format(genre=genre), [genre]),
        utter(
            "assistant",
            f"I found {picks[0]}, {picks[1]} and {picks[2]}.",
            picks,
            apis=[api(find_movies, [("name.genre", genre)], [("name.movie", picks)])],
        ),
        utter("user", f"Tell me more about {picks[0]}.", [picks[0]]),
        utter(
            "assistant",
            f"{picks[0]} is a popular {genre} film that is getting strong reviews.",
            [picks[0], genre],
        ),
    ]
    if rng.random() < 0.5:
        utterances.append(utter("user", "Maybe another time. Thanks anyway!"))
        utterances.append(utter("assistant", "No problem. Come back any time."))
    else:
        utterances.append(utter("user", "Great, that is all I needed."))
    return utterances


def genre_booking_dialog(rng, dashed):
    genre = rng.choice(GENRES)
    picks = rng.sample(MOVIES, 2)
    movie = picks[0]
    city = rng.choice(CITIES)
    theater = rng.choice(THEATERS)
    date = rng.choice(DATES)
    times = sorted(rng.sample(TIMES, 2))
    time = times[-1]
    count = rng.choice(COUNTS)
    ref = f"C{rng.randint(100000, 999999)}"
    find_movies = "find-movies" if dashed else "find_movies"
    find_showtimes = "find-showtimes" if dashed else "find_showtimes"
    book_tickets = "book-tickets" if dashed else "book_tickets"
    return [
        utter("user", f"Any {genre} movies playing in {city}?", [genre, city]),
        utter(
            "assistant",
            f"I found {picks[0]} and {picks[1]}. Do either of those sound good?",
            picks,
            apis=[
                api(
                    find_movies,
                    [("location", city), ("name.genre", genre)],
                    [("name.movie", picks)],
                )
            ],
        ),
        utter("user", f"{movie} sounds fun. What times can I see it {date} at {theater}?", [movie, date, theater]),
        utter(
            "assistant",
            f"You can see it at {' or '.join(times)}.",
            times,
            apis=[
                api(
                    find_showtimes,
                    [
                        ("location", city),
                        ("name.movie", movie),
                        ("name.theater", theater),
                        ("date", date),
                    ],
                    [("time.showing", times)],
                )
            ],
        ),
        utter("user", f"Book {count} seats for the {time} showing.", [count, time]),
        utter(
            "assistant",
            f"All set, confirmation {ref}. Your {count} tickets for {movie} are booked.",
            [ref, count, movie],
            apis=[
                api(
                    book_tickets,
                    [
                        ("name.movie", movie),
                        ("name.theater", theater),
                        ("date", date),
                        ("time.showing", time),
                        ("num.tickets", count),
                    ],
                    [("status", ["success"]), ("ref.id", [ref])],
                )
            ],
        ),
        utter("user", "Perfect, thank you!"),
        utter("assistant", "Enjoy the movie!"),
    ]


def tokenize(text):
    tokens = []
    for piece in text.split():
        peeled = []
        while piece and piece[-1] in ".,!?":
            peeled.append(piece[-1])
            piece = piece[:-1]
        if piece:
            tokens.append(piece)
        tokens.extend(reversed(peeled))
    return tokens


def compute_stats(conversations):
    dialog_count = len(conversations)
    total_turns = 0
    total_tokens = 0
    vocab = set()
    entities = set()
    for conv in conversations:
        for entry in conv["utterances"]:
            total_turns += 1
            tokens = tokenize(entry["text"])
            total_tokens += len(tokens)
            vocab.update(t.casefold() for t in tokens)
            for seg in entry.get("segments", []):
                entities.add(seg["text"])
            for call in entry.get("apis", []):
                for arg in call["args"]:
                    entities.add(arg["arg_value"])
                for resp in call["response"]:
                    entities.add(resp["response_value"])
    return {
        "dialog_count": dialog_count,
        "total_turns": total_turns,
        "total_tokens": total_tokens,
        "unique_tokens": len(vocab),
        "avg_turns_per_dialog": total_turns / dialog_count,
        "avg_tokens_per_turn": total_tokens / total_turns,
        "unique_named_entities": len(entities),
    }


def main():
    rng = random.Random(SEED)
    conversations = []
    for i in range(50):
        dashed = rng.random() < 0.3
        roll = rng.random()
        if roll < 0.5:
            utterances = booking_dialog(rng, dashed)
        elif roll < 0.75:
            utterances = browse_dialog(rng, dashed)
        else:
            utterances = genre_booking_dialog(rng, dashed)
        for index, entry in enumerate(utterances):
            entry["index"] = index
        conversations.append(
            {
                "conversation_id": f"sample-{i:03d}",
                "vertical": "movie-tickets",
                "utterances": utterances,
            }
        )

    root = pathlib.Path(__file__).resolve().parent.parent
    corpus_path = root / "src" / "dialogkit" / "data" / "sample50.json"
    stats_path = root / "tests" / "data" / "sample50_stats.json"
    corpus_path.write_text(
        json.dumps(conversations, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    stats = compute_stats(conversations)
    stats_path.write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(conversations)} conversations to {corpus_path}")
    print(json.dumps(stats, indent=2))


if __name__ == "__main__":
    main()
