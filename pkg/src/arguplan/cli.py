"""Command-line driver.

Everything the engine can do, scriptable against a plan file: create plans,
run ideation (interactively or with --pick), draft, refine, export, and
launch the HTTP service. All state lives in the plan file; the only hidden
inputs are the LLM_* environment variables for the live provider.

Exit codes: 0 success, 1 usage problem, 2 engine error, 3 provider error.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from pathlib import Path

from . import clock, drafting, ideation, persistence, service
from .errors import ArguplanError, ParseFailure, PlanError, ProviderError
from .parsing import format_as_numbered
from .plan import ArgumentPlan, EdgeKind, new_plan
from .providers import HttpProvider, Provider, ReplayProvider, config_from_env
from .session import PlanSession


class UsageError(Exception):
    pass


def _parse_picks(raw: str, count: int) -> list[int]:
    """Parse 1-based "--pick 1,3" style selections against a list size."""
    picks: list[int] = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        if not part.isdigit():
            raise UsageError(f"--pick takes comma-separated numbers, not {part!r}")
        index = int(part)
        if not (1 <= index <= count):
            raise UsageError(f"pick {index} out of range 1..{count}")
        picks.append(index - 1)
    return picks


def _ask_picks(count: int) -> list[int]:
    print("Select numbers (comma-separated, empty for none): ", end="", flush=True)
    line = sys.stdin.readline()
    if not line:
        return []
    return _parse_picks(line.strip(), count) if line.strip() else []


def _select(items: list[str], pick: str | None) -> list[str]:
    print(format_as_numbered(items))
    indices = _parse_picks(pick, len(items)) if pick is not None else _ask_picks(len(items))
    return [items[i] for i in indices]


def _build_provider(args: argparse.Namespace) -> Provider:
    if args.provider == "replay":
        if not args.replay_store:
            raise UsageError("--provider replay requires --replay-store PATH")
        path = Path(args.replay_store)
        if getattr(args, "record", False):
            live = HttpProvider(config_from_env(dict(os.environ)))
            if path.exists():
                return ReplayProvider.load(path, fallback=live)
            return ReplayProvider(fallback=live)
        return ReplayProvider.load(path)
    return HttpProvider(config_from_env(dict(os.environ)))


def _finish_provider(args: argparse.Namespace, provider: Provider) -> None:
    if getattr(args, "record", False) and isinstance(provider, ReplayProvider):
        provider.save(args.replay_store)


def _load(path: str) -> ArgumentPlan:
    return persistence.load(path)


def _save(plan: ArgumentPlan, path: str) -> None:
    persistence.save(plan, path)


# -- subcommand implementations -------------------------------------------


def cmd_new(args: argparse.Namespace) -> int:
    created = clock.now()
    plan_id = hashlib.sha256(f"{created}\n{args.argument}".encode("utf-8")).hexdigest()[:12]
    plan = new_plan(args.argument, plan_id=plan_id, now=created)
    _save(plan, args.out)
    print(f"created plan {plan.id} at {args.out}")
    return 0


def cmd_tree(args: argparse.Namespace) -> int:
    plan = _load(args.file)

    def walk(node_id: str, depth: int) -> None:
        node = plan.node(node_id)
        marker = ""
        if node.edge_from_parent is not None:
            if node.draft is None:
                marker = " [undrafted]"
            elif node.draft.stale:
                marker = " [stale]"
        edge = f" <{node.edge_from_parent.value}>" if node.edge_from_parent else ""
        print(f"{'  ' * depth}{node.id} {node.kind.value}{edge}{marker}: {node.prompt_text}")
        for child in node.children:
            walk(child.id, depth + 1)

    walk(plan.root.id, 0)
    return 0


def cmd_elaborate(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    result = ideation.elaborate_key_aspects(plan, args.node, provider)
    chosen = _select(result.items, args.pick)
    if chosen:
        session = PlanSession(plan, provider)
        ids, _ = session.accept(args.node, EdgeKind.FEATURED_BY, chosen)
        _save(plan, args.file)
        print(f"accepted {len(ids)} aspect(s): {', '.join(ids)}")
    _finish_provider(args, provider)
    return 0


def cmd_points(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    aspects = [a.strip() for a in args.aspects.split(";") if a.strip()]
    if not aspects:
        raise UsageError("--aspects needs at least one ';'-separated aspect")
    results = ideation.discussion_points(plan, args.node, aspects, provider)
    # Flatten to one numbered list so --pick stays simple.
    flat: list[tuple[str, str]] = []
    for aspect in aspects:
        if aspect in results.points:
            for item in results.points[aspect].items:
                flat.append((aspect, item))
        else:
            print(f"(failed for {aspect}: {results.errors[aspect]})", file=sys.stderr)
    chosen_indices = (
        _parse_picks(args.pick, len(flat)) if args.pick is not None else None
    )
    print(format_as_numbered([f"({aspect}) {item}" for aspect, item in flat]))
    if chosen_indices is None:
        chosen_indices = _ask_picks(len(flat))
    if chosen_indices:
        session = PlanSession(plan, provider)
        source = plan.node(args.node)
        created: list[str] = []
        for index in chosen_indices:
            aspect, item = flat[index]
            # Attach under the aspect's node when one exists, else the source.
            target = next(
                (c.id for c in source.children if c.prompt_text == aspect), args.node
            )
            ids, _ = session.accept(target, EdgeKind.ELABORATED_BY, [item])
            created.extend(ids)
        _save(plan, args.file)
        print(f"accepted {len(created)} point(s): {', '.join(created)}")
    _finish_provider(args, provider)
    return 0


def cmd_sparks(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    if args.kind == "counter":
        items = ideation.counterargument_sparks(plan, args.node, provider).items
        chosen = _select(items, args.pick)
        edge = EdgeKind.ATTACKED_BY
    elif args.kind == "evidence":
        suggestions = ideation.evidence_sparks(plan, args.node, provider)
        items = [ideation.evidence_goal_text(s) for s in suggestions]
        chosen = _select(items, args.pick)
        edge = EdgeKind.SUPPORTED_BY
    else:  # fallacy: critique, not a node; display only
        if args.pick is not None:
            raise UsageError("fallacy sparks cannot be accepted as nodes")
        fallacies = ideation.fallacy_sparks(plan, args.node, provider)
        print(format_as_numbered([f"{f.name}: {f.explanation}" for f in fallacies]))
        _finish_provider(args, provider)
        return 0
    if chosen:
        session = PlanSession(plan, provider)
        ids, _ = session.accept(args.node, edge, chosen)
        _save(plan, args.file)
        print(f"accepted {len(ids)} node(s): {', '.join(ids)}")
    _finish_provider(args, provider)
    return 0


def cmd_draft(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    if args.node:
        text = drafting.generate_draft(plan, args.node, provider)
        print(text)
    else:
        processed = drafting.generate_all_stale(plan, provider)
        print(f"generated {len(processed)} draft(s)")
    _save(plan, args.file)
    _finish_provider(args, provider)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    processed = drafting.generate_all_stale(plan, provider)
    _save(plan, args.file)
    print(f"generated {len(processed)} draft(s)" + (f": {', '.join(processed)}" if processed else ""))
    _finish_provider(args, provider)
    return 0


def cmd_lazy(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    on = args.mode == "on"
    provider: Provider
    if on:
        provider = ReplayProvider()  # never called when turning lazy on
    else:
        provider = _build_provider(args)
    generated = drafting.set_lazy_mode(plan, on, provider)
    _save(plan, args.file)
    print(f"lazy mode {'on' if on else 'off'}"
          + (f"; regenerated {len(generated)} draft(s)" if generated else ""))
    if not on:
        _finish_provider(args, provider)
    return 0


def cmd_refine(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    provider = _build_provider(args)
    text = drafting.refine(plan, args.node, args.message, provider)
    _save(plan, args.file)
    print(text)
    _finish_provider(args, provider)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    plan = _load(args.file)
    if args.format == "md":
        sys.stdout.write(persistence.export_markdown(plan))
    else:
        sys.stdout.write(persistence.export_text(plan))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    provider = _build_provider(args)
    service.run(
        args.store,
        provider,
        host=args.host,
        port=args.port,
        ui_dir=args.ui,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arguplan",
        description="Plan argumentative essays as typed argument trees with generated drafts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    provider_args = argparse.ArgumentParser(add_help=False)
    provider_args.add_argument(
        "--provider", choices=["live", "replay"], default="live",
        help="completion backend (default: live, configured via LLM_* env vars)",
    )
    provider_args.add_argument("--replay-store", help="replay store JSON path")
    provider_args.add_argument(
        "--record", action="store_true",
        help="with --provider replay: fill misses from the live backend and save",
    )

    p = sub.add_parser("new", help="create a plan file from a main argument")
    p.add_argument("argument")
    p.add_argument("-o", "--out", required=True, help="plan file to write")
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("tree", help="print the plan outline")
    p.add_argument("file")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("elaborate", parents=[provider_args],
                       help="suggest key aspects for a node and accept picks")
    p.add_argument("file")
    p.add_argument("--node", required=True)
    p.add_argument("--pick", help="1-based suggestion numbers, e.g. 1,3")
    p.set_defaults(func=cmd_elaborate)

    p = sub.add_parser("points", parents=[provider_args],
                       help="suggest discussion points for chosen aspects")
    p.add_argument("file")
    p.add_argument("--node", required=True)
    p.add_argument("--aspects", required=True, help="';'-separated aspect texts")
    p.add_argument("--pick", help="1-based numbers in the printed flattened list")
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("sparks", parents=[provider_args],
                       help="probe a node for counterarguments, fallacies, or evidence")
    p.add_argument("file")
    p.add_argument("--node", required=True)
    p.add_argument("--kind", required=True, choices=["counter", "fallacy", "evidence"])
    p.add_argument("--pick", help="1-based suggestion numbers (not valid for fallacy)")
    p.set_defaults(func=cmd_sparks)

    p = sub.add_parser("draft", parents=[provider_args],
                       help="generate one node's draft, or all stale drafts")
    p.add_argument("file")
    p.add_argument("--node")
    p.set_defaults(func=cmd_draft)

    p = sub.add_parser("generate", parents=[provider_args],
                       help="generate every missing or stale draft")
    p.add_argument("file")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("lazy", parents=[provider_args],
                       help="toggle deferred draft regeneration")
    p.add_argument("file")
    p.add_argument("mode", choices=["on", "off"])
    p.set_defaults(func=cmd_lazy)

    p = sub.add_parser("refine", parents=[provider_args],
                       help="revise a draft with a conversational instruction")
    p.add_argument("file")
    p.add_argument("--node", required=True)
    p.add_argument("-m", "--message", required=True)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("export", help="print the plan as a document")
    p.add_argument("file")
    p.add_argument("--format", required=True, choices=["md", "txt"])
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", parents=[provider_args], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--store", default="plans", help="plan directory (default: ./plans)")
    p.add_argument("--ui", help="static UI directory to mount at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ProviderError, ParseFailure) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 3
    except PlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArguplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
