"""Command-line entry point wrapping corpus, export, eval, chat, and serve.

Every command exits 0 on success and nonzero with a one-line diagnostic on
stderr on failure. Exit codes:

  0   success
  1   unexpected failure
  2   usage error (argparse)
  10  file unreadable
  11  dataset schema mismatch
  12  subset size exceeds corpus
  13  text not encodable in the requested export format
  20  candidate/reference length mismatch
  21  empty scoring corpus
  22  not enough rateable positions

The --json flag on reporting commands switches the human-readable table to
machine-readable JSON on stdout.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import evaluation
from .adapter import ApiAdapter, KnowledgeBase, ResolutionContext
from .policy import RuleBasedBackend
from .runtime import DialogRuntimeError, DialogSession
from .service import DEFAULT_KB_PATH, load_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CODES = {
    corpus_mod.FileUnreadable: 10,
    corpus_mod.SchemaMismatch: 11,
    corpus_mod.SizeExceedsCorpus: 12,
    corpus_mod.UnencodableText: 13,
    evaluation.LengthMismatch: 20,
    evaluation.EmptyCorpus: 21,
    evaluation.InsufficientPositions: 22,
}


def _fail(exc: Exception) -> int:
    print(f"error: {exc}", file=sys.stderr)
    for kind, code in EXIT_CODES.items():
        if isinstance(exc, kind):
            return code
    return EXIT_FAILURE


def _read_lines(path: str) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return [line.rstrip("\n") for line in fh if line.strip()]
    except OSError as exc:
        raise corpus_mod.FileUnreadable(str(exc)) from exc


# -- corpus commands -----------------------------------------------------------


def cmd_corpus_stats(args) -> int:
    result = corpus_mod.ingest(args.path)
    stats = corpus_mod.compute_stats(result.dialogs)
    if args.json:
        print(json.dumps(stats.to_dict(), indent=2))
    else:
        print(stats.render_table())
    return EXIT_OK


def cmd_corpus_validate(args) -> int:
    result = corpus_mod.ingest(args.path)
    report = result.report
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"accepted {report.accepted} dialogs, rejected {len(report.rejected)}")
        for dialog_id, reason in report.rejected:
            print(f"  {dialog_id}: {reason}")
    return EXIT_OK if not report.rejected else EXIT_FAILURE


def cmd_corpus_sample(args) -> int:
    result = corpus_mod.ingest(args.input)
    spec = corpus_mod.SubsetSpec(size=args.size, seed=args.seed)
    subset = corpus_mod.sample_subset(result.dialogs, spec)
    corpus_mod.save_interchange(subset, args.output)
    if args.manifest:
        Path(args.manifest).write_text(corpus_mod.manifest_text(subset), encoding="utf-8")
    print(f"sampled {len(subset)} of {len(result.dialogs)} dialogs into {args.output}")
    return EXIT_OK


def cmd_export_pairs(args) -> int:
    result = corpus_mod.ingest(args.input)
    report = corpus_mod.export_pairs(result.dialogs, args.format, args.output)
    print(
        f"wrote {report.pair_count} pairs from {report.dialog_count} dialogs to {report.path}"
        + (f" ({len(report.dangling_inputs)} dialogs ended on input events)" if report.dangling_inputs else "")
    )
    return EXIT_OK


# -- eval commands ---------------------------------------------------------------


def cmd_eval_bleu(args) -> int:
    candidates = _read_lines(args.candidates)
    references = _read_lines(args.references)
    score = evaluation.bleu_rounded(candidates, references)
    if args.json:
        print(json.dumps({"bleu": score}))
    else:
        print(f"{score:.1f}")
    return EXIT_OK


def cmd_eval_rater_export(args) -> int:
    result = corpus_mod.ingest(args.input)
    positions = evaluation.candidate_positions(result.dialogs, source=args.source)
    tasks, manifest = evaluation.export_rater_tasks(
        positions,
        count=args.count,
        path=args.output,
        seed=args.seed,
        ratings_per_task=args.ratings_per_task,
    )
    print(f"wrote {len(tasks)} tasks to {args.output} (seed {manifest.seed})")
    return EXIT_OK


def cmd_eval_aggregate(args) -> int:
    tasks = evaluation.load_rater_tasks(args.tasks)
    records = evaluation.read_ratings_csv(args.ratings)
    report = evaluation.aggregate_ratings(records, tasks)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.render_table())
        if report.incomplete_tasks:
            print(f"excluded {len(report.incomplete_tasks)} tasks with fewer than 3 ratings")
        if report.unknown_tasks:
            print(f"ignored ratings for {len(report.unknown_tasks)} unknown tasks")
    return EXIT_OK


# -- chat ------------------------------------------------------------------------


def cmd_chat(args) -> int:
    kb = KnowledgeBase.load(args.kb)
    clock = dt.datetime.fromisoformat(args.clock) if args.clock else dt.datetime.now()
    ctx = ResolutionContext(clock_anchor=clock, default_location=args.location)
    session = DialogSession(
        backend=RuleBasedBackend(kb),
        adapter=ApiAdapter(kb=kb, ctx=ctx),
    )
    print("type your message (blank line or EOF quits)", flush=True)
    for line in sys.stdin:
        text = line.strip()
        if not text:
            break
        try:
            outcome = session.submit_utterance(text)
        except DialogRuntimeError as exc:
            print(f"[error] {exc}", flush=True)
            continue
        for entry in outcome.trace:
            rendered = " ".join(f"{n}={v}" for n, v in entry.invocation.args)
            print(f"[api] {entry.invocation.name} {rendered}".rstrip(), flush=True)
        print(f"agent: {outcome.agent_text}", flush=True)
    if session.state.booking_refs:
        print(f"bookings made: {', '.join(session.state.booking_refs)}", flush=True)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import run

    config = load_config(args.config)
    run(config)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialogkit",
        description="dialog corpus toolkit and ticket-booking runtime",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    corpus_p = sub.add_parser("corpus", help="dataset ingestion, validation, stats, sampling")
    corpus_sub = corpus_p.add_subparsers(dest="subcommand", required=True)

    stats_p = corpus_sub.add_parser("stats", help="print corpus statistics")
    stats_p.add_argument("path")
    stats_p.add_argument("--json", action="store_true")
    stats_p.set_defaults(func=cmd_corpus_stats)

    validate_p = corpus_sub.add_parser("validate", help="validate a dataset file")
    validate_p.add_argument("path")
    validate_p.add_argument("--json", action="store_true")
    validate_p.set_defaults(func=cmd_corpus_validate)

    sample_p = corpus_sub.add_parser("sample", help="sample a deterministic subset")
    sample_p.add_argument("input")
    sample_p.add_argument("output")
    sample_p.add_argument("--size", type=int, required=True)
    sample_p.add_argument("--seed", type=int, required=True)
    sample_p.add_argument("--manifest", help="also write sampled dialog ids, one per line")
    sample_p.set_defaults(func=cmd_corpus_sample)

    export_p = sub.add_parser("export", help="training-pair export")
    export_sub = export_p.add_subparsers(dest="subcommand", required=True)
    pairs_p = export_sub.add_parser("pairs", help="write (input, target) pairs")
    pairs_p.add_argument("input")
    pairs_p.add_argument("output")
    pairs_p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")
    pairs_p.set_defaults(func=cmd_export_pairs)

    eval_p = sub.add_parser("eval", help="scoring and rater workflows")
    eval_sub = eval_p.add_subparsers(dest="subcommand", required=True)

    bleu_p = eval_sub.add_parser("bleu", help="corpus BLEU of two line-aligned files")
    bleu_p.add_argument("candidates")
    bleu_p.add_argument("references")
    bleu_p.add_argument("--json", action="store_true")
    bleu_p.set_defaults(func=cmd_eval_bleu)

    rater_p = eval_sub.add_parser("rater-export", help="export makes-sense rater tasks")
    rater_p.add_argument("input")
    rater_p.add_argument("output")
    rater_p.add_argument("--count", type=int, required=True)
    rater_p.add_argument("--seed", type=int, default=0)
    rater_p.add_argument("--ratings-per-task", type=int, default=3)
    rater_p.add_argument("--source", choices=("Human", "Model"), default="Human")
    rater_p.set_defaults(func=cmd_eval_rater_export)

    agg_p = eval_sub.add_parser("aggregate", help="aggregate a ratings CSV")
    agg_p.add_argument("tasks")
    agg_p.add_argument("ratings")
    agg_p.add_argument("--json", action="store_true")
    agg_p.set_defaults(func=cmd_eval_aggregate)

    chat_p = sub.add_parser("chat", help="terminal chat against the in-process runtime")
    chat_p.add_argument("--kb", default=str(DEFAULT_KB_PATH))
    chat_p.add_argument("--location", default="Mountain View")
    chat_p.add_argument("--clock", help="fixed ISO timestamp for reproducible sessions")
    chat_p.set_defaults(func=cmd_chat)

    serve_p = sub.add_parser("serve", help="run the HTTP service")
    serve_p.add_argument("--config", help="JSON config file path")
    serve_p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except tuple(EXIT_CODES) as exc:
        return _fail(exc)
    except DialogRuntimeError as exc:
        return _fail(exc)
    except OSError as exc:
        return _fail(corpus_mod.FileUnreadable(str(exc)))


if __name__ == "__main__":
    sys.exit(main())
