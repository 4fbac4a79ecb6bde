"""HTTP facade over the planning engine.

One process, one plan directory. Every route is a thin adapter: validate
the body, run the corresponding engine operation, persist, respond. Errors
come back as ``{code, message}`` with 400 for bad input, 404 for unknown
ids, 409 for state conflicts, and 502 for provider failures.

Concurrency: requests touching different plans run freely in parallel;
mutations of one plan serialize through that plan's lock, and every
successful mutation is written to disk before the response leaves.
Completion calls never run while holding a plan lock. Endpoints that both
call the model and mutate work in three phases: snapshot or prompt-build
under the lock, network call without it, then re-validate and apply under
the lock again, answering 409 if the target vanished in between.

Cascade wizards are stateful: cascade_update opens a server-side session
addressed by cascade_id, stepped through with follow-up requests, and
dropped after 30 idle minutes.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import drafting, ideation, persistence
from .drafting import StepStatus, build_draft_prompt, record_draft
from .errors import (
    ArguplanError,
    CycleForbidden,
    GenerationInterrupted,
    InvalidArgument,
    NoDraft,
    NodeVanished,
    ParseFailure,
    ProviderError,
    StepNotPending,
    UnknownCascade,
    UnknownNode,
    UnknownPlan,
)
from .parsing import FallacySuggestion
from .plan import (
    ArgumentPlan,
    EdgeKind,
    add_child,
    document_order,
    edit_prompt_text,
    move_node,
    needs_generation,
    new_plan,
    remove_subtree,
    reorder_child,
    set_edge_kind,
)
from .providers import Provider

CASCADE_TTL_SECONDS = 1800.0


class PlanStore:
    """Directory-backed plan collection with a per-plan mutation lock."""

    def __init__(self, directory: str | Path):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._mutex = threading.Lock()
        self._plans: dict[str, ArgumentPlan] = {}
        self._locks: dict[str, threading.RLock] = {}
        for path in sorted(self._dir.glob("*.plan.json")):
            plan = persistence.load(path)
            self._plans[plan.id] = plan

    def lock(self, plan_id: str) -> threading.RLock:
        with self._mutex:
            lock = self._locks.get(plan_id)
            if lock is None:
                lock = self._locks[plan_id] = threading.RLock()
            return lock

    def _path(self, plan_id: str) -> Path:
        return self._dir / f"{plan_id}.plan.json"

    def get(self, plan_id: str) -> ArgumentPlan:
        with self._mutex:
            plan = self._plans.get(plan_id)
        if plan is None:
            raise UnknownPlan(plan_id)
        return plan

    def all(self) -> list[ArgumentPlan]:
        with self._mutex:
            plans = list(self._plans.values())
        return sorted(plans, key=lambda p: (p.created_at, p.id))

    def add(self, plan: ArgumentPlan) -> None:
        persistence.save(plan, self._path(plan.id))
        with self._mutex:
            self._plans[plan.id] = plan

    def save(self, plan: ArgumentPlan) -> None:
        persistence.save(plan, self._path(plan.id))

    def delete(self, plan_id: str) -> None:
        with self._mutex:
            if plan_id not in self._plans:
                raise UnknownPlan(plan_id)
            del self._plans[plan_id]
        path = self._path(plan_id)
        if path.exists():
            path.unlink()


@dataclass
class CascadeEntry:
    plan_id: str
    cascade: drafting.CascadePlan
    last_used: float


class CascadeRegistry:
    """Open cascade wizards, dropped after sitting idle past the TTL."""

    def __init__(
        self,
        *,
        ttl: float = CASCADE_TTL_SECONDS,
        now: Callable[[], float] = time.monotonic,
    ):
        self._ttl = ttl
        self._now = now
        self._mutex = threading.Lock()
        self._entries: dict[str, CascadeEntry] = {}

    def create(self, plan_id: str, cascade: drafting.CascadePlan) -> str:
        cascade_id = uuid.uuid4().hex[:12]
        with self._mutex:
            self._purge()
            self._entries[cascade_id] = CascadeEntry(plan_id, cascade, self._now())
        return cascade_id

    def get(self, cascade_id: str) -> CascadeEntry:
        with self._mutex:
            self._purge()
            entry = self._entries.get(cascade_id)
            if entry is None:
                raise UnknownCascade(cascade_id)
            entry.last_used = self._now()
            return entry

    def _purge(self) -> None:
        cutoff = self._now() - self._ttl
        for cascade_id in [c for c, e in self._entries.items() if e.last_used < cutoff]:
            del self._entries[cascade_id]


def _status_for(exc: ArguplanError) -> int:
    if isinstance(exc, (UnknownNode, UnknownPlan, UnknownCascade)):
        return 404
    if isinstance(exc, (CycleForbidden, StepNotPending, NoDraft, NodeVanished)):
        return 409
    if isinstance(exc, (ProviderError, ParseFailure)):
        return 502
    return 400


def _required_str(payload: dict[str, Any], key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str) or not value.strip():
        raise InvalidArgument(f"body field {key!r} must be a non-blank string")
    return value


def _string_list(payload: dict[str, Any], key: str) -> list[str]:
    value = payload.get(key)
    if not isinstance(value, list) or any(not isinstance(v, str) or not v.strip() for v in value):
        raise InvalidArgument(f"body field {key!r} must be a list of non-blank strings")
    return value


def _edge_value(value: Any) -> EdgeKind:
    try:
        return EdgeKind(value)
    except ValueError:
        names = ", ".join(e.value for e in EdgeKind)
        raise InvalidArgument(f"edge must be one of {names}, not {value!r}") from None


def _step_dict(index: int, step: drafting.CascadeStep) -> dict[str, Any]:
    return {
        "index": index,
        "node_id": step.node_id,
        "suggested_topics": list(step.suggested_topics),
        "status": step.status.value,
    }


def create_app(
    store_dir: str | Path,
    provider: Provider,
    *,
    ui_dir: str | Path | None = None,
    cascade_ttl: float = CASCADE_TTL_SECONDS,
    cascade_clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    store = PlanStore(store_dir)
    cascades = CascadeRegistry(ttl=cascade_ttl, now=cascade_clock)
    app = FastAPI(title="argument plan service")
    app.state.store = store
    app.state.cascades = cascades
    app.state.provider = provider

    # -- shared machinery --------------------------------------------------

    def snapshot(plan_id: str) -> ArgumentPlan:
        """Deep copy of a plan, taken under its lock, safe to use unlocked."""
        with store.lock(plan_id):
            return persistence.plan_from_dict(persistence.plan_to_dict(store.get(plan_id)))

    def generate_sweep(plan_id: str) -> list[str]:
        """Draft every node needing generation, one lock-release cycle each."""
        processed: list[str] = []
        while True:
            with store.lock(plan_id):
                plan = store.get(plan_id)
                target = next(
                    (
                        nid
                        for nid in document_order(plan)
                        if needs_generation(plan, plan.node(nid))
                    ),
                    None,
                )
                if target is None:
                    return processed
                prompt = build_draft_prompt(plan, target)
            try:
                text = provider.complete(prompt)
            except (ProviderError, ParseFailure) as exc:
                raise GenerationInterrupted(target, processed, exc) from exc
            with store.lock(plan_id):
                plan = store.get(plan_id)
                try:
                    record_draft(plan, target, text)
                except UnknownNode:
                    continue  # removed mid-flight; the next pass skips it
                store.save(plan)
            processed.append(target)

    def after_mutation(plan_id: str) -> list[str]:
        with store.lock(plan_id):
            lazy = store.get(plan_id).lazy_mode
        if lazy:
            return []
        return generate_sweep(plan_id)

    # -- error rendering ---------------------------------------------------

    @app.exception_handler(ArguplanError)
    def engine_error(request: Request, exc: ArguplanError) -> JSONResponse:
        body: dict[str, Any] = {"code": exc.code, "message": str(exc)}
        if isinstance(exc, GenerationInterrupted):
            body["failed_node_id"] = exc.failed_node_id
            body["processed"] = exc.processed
        return JSONResponse(status_code=_status_for(exc), content=body)

    @app.exception_handler(RequestValidationError)
    def bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "invalid_request", "message": str(exc)},
        )

    # -- plan collection ---------------------------------------------------

    @app.post("/plans", status_code=201)
    def create_plan(payload: dict = Body(...)):
        argument = _required_str(payload, "argument")
        plan = new_plan(argument)
        store.add(plan)
        return persistence.plan_to_dict(plan)

    @app.get("/plans")
    def list_plans():
        summaries = [
            {
                "id": plan.id,
                "argument": plan.root.prompt_text,
                "lazy_mode": plan.lazy_mode,
                "created_at": plan.created_at,
                "modified_at": plan.modified_at,
                "nodes": len(document_order(plan)),
            }
            for plan in store.all()
        ]
        return {"plans": summaries}

    @app.get("/plans/{plan_id}")
    def read_plan(plan_id: str):
        with store.lock(plan_id):
            return persistence.plan_to_dict(store.get(plan_id))

    @app.delete("/plans/{plan_id}", status_code=204)
    def delete_plan(plan_id: str):
        with store.lock(plan_id):
            store.delete(plan_id)
        return Response(status_code=204)

    @app.patch("/plans/{plan_id}")
    def patch_plan(plan_id: str, payload: dict = Body(...)):
        lazy = payload.get("lazy_mode")
        if not isinstance(lazy, bool):
            raise InvalidArgument("body field 'lazy_mode' must be a boolean")
        with store.lock(plan_id):
            plan = store.get(plan_id)
            plan.lazy_mode = lazy
            plan._touch()
            store.save(plan)
        generated = [] if lazy else generate_sweep(plan_id)
        with store.lock(plan_id):
            return {
                "plan": persistence.plan_to_dict(store.get(plan_id)),
                "generated": generated,
            }

    # -- structural edits --------------------------------------------------

    @app.post("/plans/{plan_id}/nodes", status_code=201)
    def create_node(plan_id: str, payload: dict = Body(...)):
        parent_id = _required_str(payload, "parent_id")
        edge = _edge_value(payload.get("edge"))
        text = _required_str(payload, "text")
        with store.lock(plan_id):
            plan = store.get(plan_id)
            node_id = add_child(plan, parent_id, edge, text)
            store.save(plan)
        after_mutation(plan_id)
        with store.lock(plan_id):
            plan = store.get(plan_id)
            return persistence.node_to_dict(plan.node(node_id))

    @app.patch("/plans/{plan_id}/nodes/{node_id}")
    def patch_node(plan_id: str, node_id: str, payload: dict = Body(...)):
        known = {"text", "edge", "move", "reorder"}
        requested = known & payload.keys()
        if not requested:
            raise InvalidArgument("body must set at least one of text, edge, move, reorder")
        with store.lock(plan_id):
            plan = store.get(plan_id)
            if "text" in payload:
                edit_prompt_text(plan, node_id, _required_str(payload, "text"))
            if "edge" in payload:
                set_edge_kind(plan, node_id, _edge_value(payload.get("edge")))
            if "move" in payload:
                move = payload["move"]
                if not isinstance(move, dict):
                    raise InvalidArgument("'move' must be {parent_id, edge}")
                move_node(
                    plan,
                    node_id,
                    _required_str(move, "parent_id"),
                    _edge_value(move.get("edge")),
                )
            if "reorder" in payload:
                reorder = payload["reorder"]
                if not isinstance(reorder, dict) or not isinstance(
                    reorder.get("to_index"), int
                ):
                    raise InvalidArgument("'reorder' must be {to_index}")
                parent = plan.parent_of(node_id)
                if parent is None:
                    raise InvalidArgument("the root has no siblings to reorder among")
                from_index = next(
                    i for i, child in enumerate(parent.children) if child.id == node_id
                )
                reorder_child(plan, parent.id, from_index, reorder["to_index"])
            store.save(plan)
        after_mutation(plan_id)
        with store.lock(plan_id):
            plan = store.get(plan_id)
            return persistence.node_to_dict(plan.node(node_id))

    @app.delete("/plans/{plan_id}/nodes/{node_id}")
    def delete_node(plan_id: str, node_id: str):
        with store.lock(plan_id):
            plan = store.get(plan_id)
            removed = remove_subtree(plan, node_id)
            store.save(plan)
        after_mutation(plan_id)
        return {"removed": removed}

    # -- ideation ------------------------------------------------------------

    @app.post("/plans/{plan_id}/nodes/{node_id}/elaborate")
    def elaborate(plan_id: str, node_id: str):
        snap = snapshot(plan_id)
        result = ideation.elaborate_key_aspects(snap, node_id, provider)
        return {"aspects": result.items}

    @app.post("/plans/{plan_id}/nodes/{node_id}/discussion-points")
    def discussion_points(plan_id: str, node_id: str, payload: dict = Body(...)):
        aspects = _string_list(payload, "aspects")
        snap = snapshot(plan_id)
        results = ideation.discussion_points(snap, node_id, aspects, provider)
        return {
            "points": {aspect: sl.items for aspect, sl in results.points.items()},
            "errors": results.errors,
        }

    @app.post("/plans/{plan_id}/nodes/{node_id}/sparks/{kind}")
    def sparks(plan_id: str, node_id: str, kind: str):
        snap = snapshot(plan_id)
        if kind == "counterarguments":
            items: list[Any] = ideation.counterargument_sparks(snap, node_id, provider).items
        elif kind == "fallacies":
            items = [
                {"name": f.name, "explanation": f.explanation}
                for f in ideation.fallacy_sparks(snap, node_id, provider)
            ]
        elif kind == "evidence":
            items = [
                {"strategy": e.strategy, "description": e.description}
                for e in ideation.evidence_sparks(snap, node_id, provider)
            ]
        else:
            raise InvalidArgument(
                f"spark kind must be counterarguments, fallacies, or evidence, not {kind!r}"
            )
        return {"items": items}

    @app.post("/plans/{plan_id}/nodes/{node_id}/accept")
    def accept(plan_id: str, node_id: str, payload: dict = Body(...)):
        edge = _edge_value(payload.get("edge"))
        items = _string_list(payload, "items")
        with store.lock(plan_id):
            plan = store.get(plan_id)
            ids = ideation.accept_suggestions(plan, node_id, edge, items)
            store.save(plan)
        after_mutation(plan_id)
        return {"node_ids": ids}

    # -- drafting ------------------------------------------------------------

    @app.post("/plans/{plan_id}/nodes/{node_id}/draft")
    def draft(plan_id: str, node_id: str):
        with store.lock(plan_id):
            prompt = build_draft_prompt(store.get(plan_id), node_id)
        text = provider.complete(prompt)
        with store.lock(plan_id):
            plan = store.get(plan_id)
            try:
                record_draft(plan, node_id, text)
            except UnknownNode:
                raise NodeVanished(node_id) from None
            store.save(plan)
        return {"text": text}

    @app.post("/plans/{plan_id}/generate")
    def generate(plan_id: str):
        store.get(plan_id)  # 404 before an empty sweep succeeds vacuously
        return {"node_ids": generate_sweep(plan_id)}

    @app.post("/plans/{plan_id}/nodes/{node_id}/alternatives")
    def propose_alternatives(plan_id: str, node_id: str, payload: dict = Body(...)):
        n = payload.get("n")
        if not isinstance(n, int) or isinstance(n, bool):
            raise InvalidArgument("body field 'n' must be an integer")
        snap = snapshot(plan_id)
        return {"candidates": drafting.alternatives(snap, node_id, n, provider)}

    @app.post("/plans/{plan_id}/nodes/{node_id}/replace")
    def replace(plan_id: str, node_id: str, payload: dict = Body(...)):
        text = _required_str(payload, "text")
        with store.lock(plan_id):
            plan = store.get(plan_id)
            drafting.replace_draft(plan, node_id, text)
            store.save(plan)
            return persistence.node_to_dict(plan.node(node_id))

    @app.post("/plans/{plan_id}/nodes/{node_id}/refine")
    def refine_draft(plan_id: str, node_id: str, payload: dict = Body(...)):
        instruction = _required_str(payload, "instruction")
        snap = snapshot(plan_id)
        text = drafting.refine(snap, node_id, instruction, provider)
        with store.lock(plan_id):
            plan = store.get(plan_id)
            try:
                node = plan.node(node_id)
            except UnknownNode:
                raise NodeVanished(node_id) from None
            node.draft = snap.node(node_id).draft  # adopt the refined block
            plan._touch()
            store.save(plan)
        return {"text": text}

    @app.post("/plans/{plan_id}/nodes/{node_id}/fix-fallacies")
    def fix_fallacies(plan_id: str, node_id: str, payload: dict = Body(...)):
        raw = payload.get("fallacies")
        if not isinstance(raw, list) or not raw:
            raise InvalidArgument("body field 'fallacies' must be a non-empty list")
        fallacies = []
        for item in raw:
            if not isinstance(item, dict):
                raise InvalidArgument("each fallacy must be {name, explanation}")
            fallacies.append(
                FallacySuggestion(
                    name=_required_str(item, "name"),
                    explanation=_required_str(item, "explanation"),
                )
            )
        snap = snapshot(plan_id)
        return {"text": drafting.fix_fallacies(snap, node_id, fallacies, provider)}

    # -- cascade wizard --------------------------------------------------------

    @app.post("/plans/{plan_id}/nodes/{node_id}/cascade", status_code=201)
    def open_cascade(plan_id: str, node_id: str, payload: dict = Body(...)):
        text = _required_str(payload, "text")
        snap = snapshot(plan_id)
        cascade = drafting.cascade_update(snap, node_id, text, provider)
        with store.lock(plan_id):
            plan = store.get(plan_id)
            try:
                edit_prompt_text(plan, node_id, text)
                node = plan.node(node_id)
                if node.edge_from_parent is not None:
                    snap_draft = snap.node(node_id).draft
                    assert snap_draft is not None
                    record_draft(plan, node_id, snap_draft.text)
            except UnknownNode:
                raise NodeVanished(node_id) from None
            store.save(plan)
        cascade_id = cascades.create(plan_id, cascade)
        return {
            "cascade_id": cascade_id,
            "steps": [_step_dict(i, s) for i, s in enumerate(cascade.steps)],
        }

    @app.post("/cascades/{cascade_id}/steps/{step_index}")
    def resolve_step(cascade_id: str, step_index: int, payload: dict = Body(...)):
        entry = cascades.get(cascade_id)
        skip = payload.get("skip") is True
        keep = payload.get("keep") is True
        topic = payload.get("topic")
        if topic is not None and (not isinstance(topic, str) or not topic.strip()):
            raise InvalidArgument("'topic' must be a non-blank string")
        chosen = [name for name, on in (("topic", topic is not None), ("keep", keep), ("skip", skip)) if on]
        if len(chosen) != 1:
            raise InvalidArgument("body must specify exactly one of topic, keep, skip")
        if skip:
            with store.lock(entry.plan_id):
                plan = store.get(entry.plan_id)
                step = drafting.cascade_step(
                    plan, entry.cascade, step_index, provider, skip=True
                )
            return {"step": _step_dict(step_index, step)}
        snap = snapshot(entry.plan_id)
        step = drafting.cascade_step(snap, entry.cascade, step_index, provider, topic=topic)
        with store.lock(entry.plan_id):
            plan = store.get(entry.plan_id)
            try:
                if topic is not None:
                    edit_prompt_text(plan, step.node_id, topic)
                snap_draft = snap.node(step.node_id).draft
                assert snap_draft is not None
                record_draft(plan, step.node_id, snap_draft.text)
            except UnknownNode:
                step.status = StepStatus.PENDING  # stays retryable
                raise NodeVanished(step.node_id) from None
            store.save(plan)
        return {"step": _step_dict(step_index, step)}

    # -- exports -----------------------------------------------------------

    @app.get("/plans/{plan_id}/export")
    def export(plan_id: str, format: str = "markdown"):
        with store.lock(plan_id):
            plan = store.get(plan_id)
            if format == "markdown":
                return PlainTextResponse(
                    persistence.export_markdown(plan),
                    media_type="text/markdown; charset=utf-8",
                )
            if format == "text":
                return PlainTextResponse(
                    persistence.export_text(plan),
                    media_type="text/plain; charset=utf-8",
                )
        raise InvalidArgument(f"format must be markdown or text, not {format!r}")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def run(
    store_dir: str | Path,
    provider: Provider,
    *,
    host: str = "127.0.0.1",
    port: int = 8000,
    ui_dir: str | Path | None = None,
) -> None:
    import uvicorn

    app = create_app(store_dir, provider, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)
