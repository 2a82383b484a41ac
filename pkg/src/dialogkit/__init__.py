"""Transaction-based dialog toolkit.

A text-to-text dialog format (nine marker tokens over verbatim payloads),
training-pair generation with a context separator, a session runtime that
loops model predictions through a pluggable API adapter, a mock
movie-ticketing knowledge base, corpus ingestion and statistics, an
evaluation harness, and an HTTP service plus CLI on top.
"""

from .adapter import (
    ApiAdapter,
    ApiError,
    DuplicateArg,
    KnowledgeBase,
    MissingRequiredArg,
    ResolutionContext,
    UnknownApi,
    invoke,
    resolve_args,
)
from .codec import (
    Calls,
    Malformed,
    ParseError,
    Verbal,
    classify_prediction,
    parse_stream,
    parse_tokens,
    serialize_event,
    serialize_events,
    split_input,
    tokenize,
)
from .core import (
    ApiInvocation,
    ApiResult,
    Dialog,
    DialogEvent,
    Side,
    Speaker,
    Utterance,
    classify_event,
    invalid_event_order,
)
from .corpus import (
    CorpusStats,
    IngestReport,
    IngestResult,
    SubsetSpec,
    compute_stats,
    export_pairs,
    ingest,
    sample_subset,
)
from .evaluation import (
    RaterTask,
    RatingRecord,
    ScoreReport,
    aggregate_ratings,
    bleu,
    bleu_rounded,
    export_rater_tasks,
)
from .pairs import PairBatch, TrainingPair, build_input, generate_pairs
from .policy import RuleBasedBackend
from .runtime import (
    AgentBackend,
    DialogSession,
    LengthPolicy,
    LoopCapExceeded,
    MalformedPrediction,
    PreContextOverflow,
    ReservedLiteralError,
    SessionBusy,
    TurnOutcome,
    count_tokens,
    truncate_input,
)
from .service import ServiceConfig, create_app, load_config

__all__ = [
    "AgentBackend",
    "ApiAdapter",
    "ApiError",
    "ApiInvocation",
    "ApiResult",
    "Calls",
    "CorpusStats",
    "Dialog",
    "DialogEvent",
    "DialogSession",
    "DuplicateArg",
    "IngestReport",
    "IngestResult",
    "KnowledgeBase",
    "LengthPolicy",
    "LoopCapExceeded",
    "Malformed",
    "MalformedPrediction",
    "MissingRequiredArg",
    "PairBatch",
    "ParseError",
    "PreContextOverflow",
    "RaterTask",
    "RatingRecord",
    "ReservedLiteralError",
    "ResolutionContext",
    "RuleBasedBackend",
    "ScoreReport",
    "ServiceConfig",
    "SessionBusy",
    "Side",
    "Speaker",
    "SubsetSpec",
    "TrainingPair",
    "TurnOutcome",
    "UnknownApi",
    "Utterance",
    "Verbal",
    "aggregate_ratings",
    "bleu",
    "bleu_rounded",
    "build_input",
    "classify_event",
    "classify_prediction",
    "compute_stats",
    "count_tokens",
    "create_app",
    "export_pairs",
    "export_rater_tasks",
    "generate_pairs",
    "ingest",
    "invalid_event_order",
    "invoke",
    "load_config",
    "parse_stream",
    "parse_tokens",
    "resolve_args",
    "sample_subset",
    "serialize_event",
    "serialize_events",
    "split_input",
    "tokenize",
    "truncate_input",
]
