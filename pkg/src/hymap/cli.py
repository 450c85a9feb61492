"""Command-line entry point.

Subcommands: new, elicit, check, hypotheses, assess, summary, render,
serve. Exit codes: 0 ok, 1 domain error, 2 parse error, 3 usage error.
The default output format comes from --format or the HYMAP_FORMAT
environment variable. --non-interactive forbids prompting anywhere.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from . import dsl, hypogen, registry as registry_mod, render
from .analysis import InvalidMap, structure_report
from .elicitation import (
    AnswerShape,
    ElicitationSession,
    MapError,
    Phase,
    ReplayMismatch,
    SessionError,
    read_log,
)
from .model import SEVERITY_ERROR, CognitiveMap, NodeKind
from .registry import AssessmentRegistry, Evidence, EvidenceSource, RiskLevel, Status

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_PARSE = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise UsageError(message)


@dataclass
class CliConfig:
    map_path: Optional[Path]
    assessments_path: Optional[Path]
    output_format: Optional[str]
    color: bool
    non_interactive: bool


def _build_parser() -> _Parser:
    parser = _Parser(prog="hymap", description=__doc__)
    parser.add_argument("--assessments", metavar="PATH",
                        help="assessments file (default: <map>.assessments.json)")
    parser.add_argument("--format", dest="output_format",
                        default=os.environ.get("HYMAP_FORMAT"),
                        help="output format override (also HYMAP_FORMAT)")
    parser.add_argument("--color", dest="color", action="store_true", default=None)
    parser.add_argument("--no-color", dest="color", action="store_false")
    parser.add_argument("--non-interactive", action="store_true",
                        help="never prompt; fail where input would be needed")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("new", help="scaffold an empty map file")
    p.add_argument("file")
    p.add_argument("--name", help="product/solution name (required with --non-interactive)")

    p = sub.add_parser("elicit", help="run the guided elicitation session")
    p.add_argument("file")
    p.add_argument("--resume", action="store_true",
                   help="continue from the session log next to the map file")
    p.add_argument("--script", metavar="LOG",
                   help="replay a recorded answer log non-interactively")

    p = sub.add_parser("check", help="validate a map and report structural gaps")
    p.add_argument("file")

    p = sub.add_parser("hypotheses", help="compile relationships into hypotheses")
    p.add_argument("file")
    p.add_argument("--format", dest="sub_format", choices=["md", "json"])
    p.add_argument("--prioritized", action="store_true")

    p = sub.add_parser("assess", help="record a founder judgment on a hypothesis")
    p.add_argument("file")
    p.add_argument("hypothesis_id")
    p.add_argument("--status", required=True,
                   choices=[s.value for s in Status])
    p.add_argument("--risk", choices=["low", "medium", "high", "L", "M", "H"])
    p.add_argument("--evidence", action="append", default=[], metavar="SOURCE[:NOTE]",
                   help="repeatable; sources: " + ", ".join(s.value for s in EvidenceSource))

    p = sub.add_parser("summary", help="assessment counts by kind, status, and risk")
    p.add_argument("file")
    p.add_argument("--format", dest="sub_format", choices=["md", "csv", "json"])
    p.add_argument("--all-statuses", action="store_true",
                   help="report refuted separately instead of folding it")

    p = sub.add_parser("render", help="emit a diagram")
    p.add_argument("file")
    p.add_argument("--format", dest="sub_format", choices=["dot", "svg"])
    p.add_argument("-o", "--output", metavar="OUT")
    p.add_argument("--no-legend", action="store_true")
    p.add_argument("--orientation", choices=["product-top", "product-bottom"],
                   default="product-top")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--storage", default="hymap-data")
    p.add_argument("--cors", action="append", default=[], metavar="ORIGIN")
    p.add_argument("--ui", metavar="DIR", help="static web UI build to serve at /")

    return parser


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _load_map(path: Path) -> CognitiveMap:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from None
    if path.suffix == ".json":
        try:
            return dsl.import_json(text)
        except dsl.JsonFormatError as exc:
            raise ParseFailure([f"{path}: {exc.message}"], syntax=True) from None
    result = dsl.parse(text)
    if not result.ok:
        # malformed text is a parse failure; well-formed statements the
        # model rejected (cycles, illegal pairs) are domain errors
        raise ParseFailure([f"{path}:{d}" for d in result.errors],
                           syntax=result.has_syntax_errors)
    for warning in result.warnings:
        print(f"warning: {path}:{warning}", file=sys.stderr)
    return result.map


class ParseFailure(Exception):
    def __init__(self, messages: List[str], syntax: bool = True):
        super().__init__("parse failed")
        self.messages = messages
        self.syntax = syntax


def _assessments_path(map_path: Path, config: CliConfig) -> Path:
    if config.assessments_path:
        return config.assessments_path
    return map_path.with_suffix(".assessments.json")


def _log_path(map_path: Path) -> Path:
    return map_path.with_suffix(".log.jsonl")


def _load_registry(path: Path, known_ids) -> AssessmentRegistry:
    if not path.exists():
        return AssessmentRegistry()
    return AssessmentRegistry.load(path, known_ids=known_ids)


def _parse_evidence(raw: List[str]) -> List[Evidence]:
    out = []
    for item in raw:
        source, _, note = item.partition(":")
        try:
            parsed = EvidenceSource(source.strip())
        except ValueError:
            raise UsageError(
                f"unknown evidence source {source!r}; one of "
                + ", ".join(s.value for s in EvidenceSource)
            ) from None
        out.append(Evidence(source=parsed, note=note.strip()))
    return out


def _format_or(config: CliConfig, sub_format: Optional[str], default: str) -> str:
    return sub_format or config.output_format or default


ANSI = {"error": "\x1b[31m", "warning": "\x1b[33m", "reset": "\x1b[0m"}


def _paint(text: str, severity: str, config: CliConfig) -> str:
    if not config.color or severity not in ANSI:
        return text
    return f"{ANSI[severity]}{text}{ANSI['reset']}"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_new(args, config: CliConfig) -> int:
    path = Path(args.file)
    if path.exists():
        raise DomainError(f"{path} already exists")
    name = args.name
    if not name:
        if config.non_interactive:
            raise UsageError("--non-interactive requires --name")
        name = input("What is the product/solution name? ").strip()
    if not name:
        raise DomainError("the product needs a name")
    cmap = CognitiveMap(title=name)
    cmap.add_node(NodeKind.PRODUCT, name)
    path.write_text(dsl.serialize(cmap), encoding="utf-8")
    print(f"created {path}")
    return EXIT_OK


def _cmd_check(args, config: CliConfig) -> int:
    cmap = _load_map(Path(args.file))
    diagnostics = cmap.validate()
    for d in diagnostics:
        print(f"{_paint(d.severity, d.severity, config)}: {d.code}: {d.message}")
    report = structure_report(cmap)
    print(report.to_text(), end="")
    if any(d.severity == SEVERITY_ERROR for d in diagnostics):
        return EXIT_DOMAIN
    return EXIT_OK


def _cmd_hypotheses(args, config: CliConfig) -> int:
    map_path = Path(args.file)
    cmap = _load_map(map_path)
    hypotheses = hypogen.generate(cmap)
    registry = _load_registry(_assessments_path(map_path, config),
                              known_ids=[h.id for h in hypotheses])
    if args.prioritized:
        hypotheses = hypogen.prioritize(hypotheses, registry)
    fmt = _format_or(config, args.sub_format, "md")
    if fmt == "json":
        print(json.dumps(hypogen.to_dicts(hypotheses, registry), indent=2,
                         ensure_ascii=False))
    elif fmt == "md":
        print(hypogen.to_markdown(hypotheses, registry), end="")
    else:
        raise UsageError(f"hypotheses cannot be formatted as {fmt!r}")
    return EXIT_OK


def _cmd_assess(args, config: CliConfig) -> int:
    map_path = Path(args.file)
    cmap = _load_map(map_path)
    hypotheses = hypogen.generate(cmap)
    known = [h.id for h in hypotheses]
    path = _assessments_path(map_path, config)
    registry = _load_registry(path, known)
    risk = None
    if args.risk:
        risk = RiskLevel({"L": "low", "M": "medium", "H": "high"}.get(args.risk, args.risk))
    registry.assess(
        args.hypothesis_id,
        Status(args.status),
        risk=risk,
        evidence=_parse_evidence(args.evidence),
        known_ids=known,
    )
    registry.save(path)
    print(f"recorded {args.status} for {args.hypothesis_id} in {path}")
    return EXIT_OK


def _cmd_summary(args, config: CliConfig) -> int:
    map_path = Path(args.file)
    cmap = _load_map(map_path)
    hypotheses = hypogen.generate(cmap)
    registry = _load_registry(_assessments_path(map_path, config),
                              known_ids=[h.id for h in hypotheses])
    table = registry_mod.summary(registry, hypotheses, paper_mode=not args.all_statuses)
    fmt = _format_or(config, args.sub_format, "md")
    if fmt == "json":
        print(json.dumps(table.to_dict(), indent=2, ensure_ascii=False))
    elif fmt == "csv":
        print(table.to_csv(), end="")
    elif fmt == "md":
        print(table.to_markdown(), end="")
    else:
        raise UsageError(f"summary cannot be formatted as {fmt!r}")
    return EXIT_OK


def _cmd_render(args, config: CliConfig) -> int:
    cmap = _load_map(Path(args.file))
    fmt = _format_or(config, args.sub_format, "dot")
    options = render.RenderOptions(orientation=args.orientation,
                                   include_legend=not args.no_legend)
    if fmt == "dot":
        output = render.to_dot(cmap, options)
    elif fmt == "svg":
        output = render.to_svg(cmap, options)
    else:
        raise UsageError(f"render cannot emit {fmt!r}; use dot or svg")
    if args.output:
        Path(args.output).write_text(output, encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        print(output, end="")
    return EXIT_OK


def _cmd_serve(args, config: CliConfig) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(
        storage_dir=Path(args.storage),
        cors_origins=args.cors,
        static_dir=Path(args.ui) if args.ui else None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Elicitation wizard
# ---------------------------------------------------------------------------


def _read_lines_until_blank(prompt_text: str) -> List[str]:
    print(prompt_text)
    lines = []
    while True:
        line = input("> ").strip()
        if not line:
            return lines
        lines.append(line)


def _split_quoted(line: str) -> List[tuple]:
    """Tokenize a wizard command line into (text, quoted) pairs."""
    from .dsl import _tokenize_line
    return [(t.text, t.quoted) for t in _tokenize_line(line)]


def _read_payload(prompt) -> object:
    """Terminal input for one prompt, translated to the answer payload."""
    shape = prompt.shape
    if shape == AnswerShape.TEXT:
        return input("> ").strip()
    if shape == AnswerShape.TEXT_LIST:
        return _read_lines_until_blank("(one per line, blank line to finish, "
                                       "'skip' to skip the phase)") or []
    if shape == AnswerShape.EDGE_ANNOTATION and prompt.phase == Phase.FEATURES:
        items = _read_lines_until_blank('(lines like: "aspect label" = +|-|o, '
                                        "or 'skip')")
        if items == ["skip"]:
            return {"skip": True}
        links = []
        for line in items:
            tokens = _split_quoted(line)
            if len(tokens) == 3 and tokens[1][0] == "=":
                links.append({"aspect": tokens[0][0], "sign": tokens[2][0]})
            else:
                print(f"  ignored {line!r}")
        return links
    if shape == AnswerShape.EDGE_ANNOTATION:  # deepening
        line = input("(ok = testable as-is, skip, or: via \"new concept\" + -) > ").strip()
        if line == "ok":
            return {"saturated": True}
        if line == "skip":
            return {"skip": True}
        tokens = _split_quoted(line)
        if tokens and tokens[0][0] == "via" and len(tokens) >= 3:
            return {"concept": tokens[1][0], "signs": [t[0] for t in tokens[2:]]}
        print(f"  did not understand {line!r}; marking nothing")
        return {"skip": True}
    if shape == AnswerShape.NODE_CHOICE:
        items = _read_lines_until_blank('(lines like: "existing concept" = +|-|o; '
                                        "blank if unrelated, 'skip' to move on)")
        if items == ["skip"]:
            return {"skip": True}
        links = []
        for line in items:
            tokens = _split_quoted(line)
            if len(tokens) == 3 and tokens[1][0] == "=":
                links.append({"concept": tokens[0][0], "sign": tokens[2][0]})
        return links
    # review
    line = input("(ok = coherent, or commands: add customer|feature|concept \"X\" / "
                 "edge \"A\" +|-|o|. \"B\" / remove \"X\" / rename \"X\" \"Y\") > ").strip()
    if line == "ok":
        return {"coherent": True}
    commands = []
    while line:
        cmd = _parse_review_command(line)
        if cmd:
            commands.append(cmd)
        line = input("> ").strip()
    return {"commands": commands}


def _parse_review_command(line: str) -> Optional[dict]:
    tokens = _split_quoted(line)
    words = [t[0] for t in tokens]
    if len(tokens) == 3 and words[0] == "add" and words[1] in ("customer", "feature", "concept"):
        return {"op": f"add_{words[1]}", "label": words[2]}
    if len(tokens) == 4 and words[0] == "edge":
        cmd = {"op": "add_edge", "src": words[1], "dst": words[3]}
        if words[2] in ("+", "-", "o"):
            cmd["sign"] = words[2]
        return cmd
    if len(tokens) == 2 and words[0] == "remove":
        return {"op": "remove", "target": words[1]}
    if len(tokens) == 3 and words[0] == "rename":
        return {"op": "substitute", "target": words[1], "label": words[2]}
    print(f"  did not understand {line!r}")
    return None


def _normalize_list_payload(payload: object) -> object:
    if isinstance(payload, list) and payload and payload[0] == "skip":
        return {"skip": True}
    return payload


def _append_log(path: Path, events: List[dict], start_at: int) -> int:
    with open(path, "a", encoding="utf-8") as handle:
        for event in events[start_at:]:
            handle.write(json.dumps(event, ensure_ascii=False) + "\n")
    return len(events)


def _finish_and_save(session: ElicitationSession, map_path: Path, config: CliConfig) -> int:
    result = session.finish()
    map_path.write_text(dsl.serialize(result.map), encoding="utf-8")
    for warning in result.warnings:
        edges = ", ".join(e["statement"] for e in warning["edges"])
        print(f"warning: {warning['code']}: {edges}")
    print(f"map saved to {map_path}")
    print(hypogen.to_markdown(result.hypotheses), end="")
    return EXIT_OK


def _cmd_elicit(args, config: CliConfig) -> int:
    map_path = Path(args.file)
    log_path = _log_path(map_path)

    if args.script:
        events = read_log(Path(args.script).read_text(encoding="utf-8"))
        session, result = ElicitationSession.replay(events)
        log_path.write_text(session.log_jsonl(), encoding="utf-8")
        if result is None:
            raise DomainError("script ends before the session finished")
        map_path.write_text(dsl.serialize(result.map), encoding="utf-8")
        print(f"map saved to {map_path}")
        print(hypogen.to_markdown(result.hypotheses), end="")
        return EXIT_OK

    if config.non_interactive:
        raise UsageError("elicit without --script needs an interactive terminal")

    if args.resume:
        if not log_path.exists():
            raise DomainError(f"no session log at {log_path}")
        events = read_log(log_path.read_text(encoding="utf-8"))
        session, result = ElicitationSession.replay(events)
        if result is not None:
            raise DomainError("that session already finished")
        print(f"resumed session with {len(events)} recorded events")
        written = len(session.events)  # the log already holds these
    else:
        title = input("Session title (blank to use the product name): ").strip()
        session = ElicitationSession(title=title)
        log_path.write_text("", encoding="utf-8")
        written = _append_log(log_path, session.events, 0)

    while True:
        prompt = session.next_prompt()
        if prompt is None:
            code = _finish_and_save(session, map_path, config)
            _append_log(log_path, session.events, written)
            return code
        print()
        print(prompt.text)
        payload = _normalize_list_payload(_read_payload(prompt))
        try:
            deltas = session.answer(prompt.id, payload)
        except (MapError, SessionError) as exc:
            print(f"  error: {exc}")
            continue
        written = _append_log(log_path, session.events, written)
        for delta in deltas:
            print(f"  {delta['op']}: "
                  f"{delta.get('node', delta.get('edge', delta))}")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def run(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    config = CliConfig(
        map_path=Path(args.file) if hasattr(args, "file") else None,
        assessments_path=Path(args.assessments) if args.assessments else None,
        output_format=args.output_format,
        color=args.color if args.color is not None else sys.stdout.isatty(),
        non_interactive=args.non_interactive,
    )

    handlers = {
        "new": _cmd_new,
        "elicit": _cmd_elicit,
        "check": _cmd_check,
        "hypotheses": _cmd_hypotheses,
        "assess": _cmd_assess,
        "summary": _cmd_summary,
        "render": _cmd_render,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args, config)
    except ParseFailure as exc:
        for message in exc.messages:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_PARSE if exc.syntax else EXIT_DOMAIN
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, MapError, SessionError, InvalidMap,
            registry_mod.RegistryError, ReplayMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
