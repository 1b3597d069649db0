"""Command-line access to every capability without running the service.

Exit codes: 0 ok, 2 config/data problem, 3 bad argument (e.g. unknown
sense), 4 backend failure. Output is an aligned table on terminals and
JSON when stdout is redirected (override with --format).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .backends import BackendError, UnknownEngineError
from .config import AppConfig, ConfigError, load_config
from .expansion import UnknownSyntaxProfileError, expand_query, render_query
from .lexicon import ALL_SENSES, LexiconError, UnknownSenseError, load_lexicon
from .service import (
    AppContext,
    BadRequestError,
    DocumentCache,
    build_context,
    dump_json,
    search_payload,
    senses_payload,
)
from .weighting import RankingTable, rank_results, tokenize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BAD_ARGUMENT = 3
EXIT_BACKEND = 4

DOC_SUFFIXES = (".txt", ".html", ".htm")


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, (UnknownEngineError, BackendError)):
        return EXIT_BACKEND
    if isinstance(exc, (UnknownSenseError, UnknownSyntaxProfileError, BadRequestError, ValueError)):
        return EXIT_BAD_ARGUMENT
    return EXIT_CONFIG


def _default_format() -> str:
    return "table" if sys.stdout.isatty() else "json"


def _parse_scoring_flags(pairs: list[str]) -> dict:
    """Turn repeated 'field=value' flags into a scoring override dict.

    Dotted keys reach into relation_base, e.g. relation_base.hypernym=0.5;
    values are parsed as YAML scalars so booleans and numbers work.
    """
    overrides: dict = {}
    for pair in pairs:
        key, sep, raw_value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"scoring override must look like field=value: {pair!r}")
        value = yaml.safe_load(raw_value)
        if "." in key:
            head, tail = key.split(".", 1)
            overrides.setdefault(head, {})[tail] = value
        else:
            overrides[key] = value
    return overrides


def _format_table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip())
    return "\n".join(lines)


def _load_cli_lexicon(args, config: AppConfig):
    path = getattr(args, "lexicon", None) or config.lexicon_path
    if not path:
        raise ConfigError("no lexicon configured (use --lexicon or lexicon.path)")
    return load_lexicon(path)


# ---------------------------------------------------------------------------
# Commands


def cmd_senses(args, config: AppConfig) -> int:
    lexicon = _load_cli_lexicon(args, config)
    ctx = AppContext(config, lexicon, [], DocumentCache(0))
    payload = senses_payload(ctx, args.term, args.pos)
    if args.format == "json":
        print(dump_json(payload))
        return EXIT_OK
    senses = payload["senses"]
    print(f"{len(senses)} senses for {args.term!r}")
    for entry in senses:
        synonyms = f" [{', '.join(entry['synonyms'])}]" if entry["synonyms"] else ""
        print(f"  {entry['ordinal']}. {entry['id']}{synonyms}  {entry['summary']}")
    return EXIT_OK


def cmd_expand(args, config: AppConfig) -> int:
    lexicon = _load_cli_lexicon(args, config)
    choice = lexicon.resolve_sense_choice(args.term, args.sense)
    expanded = expand_query(lexicon, args.term, choice)
    query = render_query(expanded, syntax=args.syntax, profiles=config.syntax_profiles)
    if args.format == "json":
        print(
            dump_json(
                {
                    "term": args.term,
                    "sense": choice,
                    "relation": expanded.source_relation,
                    "terms": list(expanded.expansion_terms),
                    "query": query,
                }
            )
        )
        return EXIT_OK
    print(query)
    if args.explain:
        print(f"relation: {expanded.source_relation}")
        print(f"terms: {', '.join(expanded.expansion_terms) or '(none)'}")
    return EXIT_OK


def _read_docs_dir(directory: str) -> list[tuple[str, list[str]]]:
    from .backends import extract_text

    root = Path(directory)
    if not root.is_dir():
        raise ConfigError(f"not a readable directory: {directory}")
    docs = []
    for path in sorted(root.iterdir()):
        if path.suffix.lower() not in DOC_SUFFIXES or not path.is_file():
            continue
        text = extract_text(path.read_bytes())
        docs.append((path.name, tokenize(text)))
    return docs


def _table_payload(term: str, selected: str, table: RankingTable) -> dict:
    return {
        "term": term,
        "sense": selected,
        "sense_ids": list(table.sense_ids),
        "order_key": table.order_key,
        "rows": [
            {"url": r.url, "scores": r.scores, "top_sense": r.top_sense}
            for r in table.rows
        ],
    }


def _print_ranking_table(table: RankingTable) -> None:
    headers = ["url", "top_sense", *table.sense_ids]
    rows = [
        [row.url, row.top_sense or "-"]
        + [f"{row.scores[sid]:.4f}" for sid in table.sense_ids]
        for row in table.rows
    ]
    print(_format_table(headers, rows))


def cmd_rank(args, config: AppConfig) -> int:
    lexicon = _load_cli_lexicon(args, config)
    selected = lexicon.resolve_sense_choice(args.term, args.sense)
    scoring = config.scoring.with_overrides(_parse_scoring_flags(args.scoring))
    docs = _read_docs_dir(args.docs)
    table = rank_results(docs, args.term, selected, lexicon, scoring)
    if args.report:
        from .report import write_report

        paths = write_report(table, args.report, title=f"ranking for {args.term!r}")
        print(f"report written: {', '.join(str(p) for p in paths)}", file=sys.stderr)
    if args.format == "json":
        print(dump_json(_table_payload(args.term, selected, table)))
    else:
        _print_ranking_table(table)
    return EXIT_OK


def cmd_search(args, config: AppConfig) -> int:
    ctx = build_context(config)
    payload = search_payload(
        ctx,
        term=args.term,
        mode=args.mode,
        sense=args.sense,
        engine_name=args.engine,
        limit=args.limit,
        scoring_overrides=_parse_scoring_flags(args.scoring),
    )
    if args.report and "rows" in payload:
        from .report import write_report
        from .weighting import RankRow

        table = RankingTable(
            sense_ids=tuple(payload["sense_ids"]),
            rows=[
                RankRow(r["url"], r["scores"], r["top_sense"])
                for r in payload["rows"]
            ],
            order_key=payload["order_key"],
        )
        paths = write_report(table, args.report, title=f"search {args.term!r}")
        print(f"report written: {', '.join(str(p) for p in paths)}", file=sys.stderr)
    if args.format == "json":
        print(dump_json(payload))
        return EXIT_OK
    if payload["mode"] == "pre":
        print(f"query: {payload['executed_query']}")
        headers = ["rank", "url", "title"]
        rows = [[str(h["rank"]), h["url"], h["title"]] for h in payload["hits"]]
        print(_format_table(headers, rows))
    else:
        print(f"query: {payload['executed_query']}")
        headers = ["url", "status", "top_sense", *payload["sense_ids"]]
        rows = [
            [r["url"], r["fetch_status"], r["top_sense"] or "-"]
            + [f"{r['scores'][sid]:.4f}" for sid in payload["sense_ids"]]
            for r in payload["rows"]
        ]
        print(_format_table(headers, rows))
    return EXIT_OK


def cmd_serve(args, config: AppConfig) -> int:
    from .service import run_server

    run_server(config, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sensesearch",
        description="Sense-aware search: query expansion and concept-profile ranking.",
    )
    parser.add_argument("-c", "--config", help="config file (default: $SENSESEARCH_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument(
            "--format",
            choices=("json", "table"),
            default=None,
            help="output format (default: table on a terminal, else json)",
        )

    p = sub.add_parser("senses", help="list the senses of a term")
    p.add_argument("term")
    p.add_argument("--pos", help="restrict to a part of speech (noun/verb/adj/adv)")
    p.add_argument("--lexicon", help="lexicon source (WNDB dir or fixture file)")
    add_format(p)
    p.set_defaults(func=cmd_senses)

    p = sub.add_parser("expand", help="show the expanded query for a sense")
    p.add_argument("term")
    p.add_argument("--sense", default=ALL_SENSES, help="sense id, ordinal, or 'all'")
    p.add_argument("--syntax", default="generic", help="engine syntax profile")
    p.add_argument("--explain", action="store_true", help="also print relation and terms")
    p.add_argument("--lexicon")
    add_format(p)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("rank", help="rank local documents against a term's senses")
    p.add_argument("term")
    p.add_argument("--sense", default=ALL_SENSES)
    p.add_argument("--docs", required=True, help="directory of .txt/.html documents")
    p.add_argument("--scoring", action="append", default=[], metavar="FIELD=VALUE")
    p.add_argument("--report", help="write ranking.csv and ranking.png to this directory")
    p.add_argument("--lexicon")
    add_format(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("search", help="run a pre- or post-filter search")
    p.add_argument("term")
    p.add_argument("--mode", choices=("pre", "post", "pre+post"), default="post")
    p.add_argument("--sense", default=ALL_SENSES)
    p.add_argument("--engine", required=True)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--scoring", action="append", default=[], metavar="FIELD=VALUE")
    p.add_argument("--report", help="write ranking.csv and ranking.png to this directory")
    add_format(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="run the HTTP service until interrupted")
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "format", None) is None:
        args.format = _default_format()
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    try:
        return args.func(args, config)
    except (ConfigError, LexiconError, OSError) as exc:
        return _fail(str(exc), _exit_code_for(exc))
    except (BackendError, BadRequestError, UnknownSyntaxProfileError, ValueError) as exc:
        return _fail(str(exc), _exit_code_for(exc))
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
