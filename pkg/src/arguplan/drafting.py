"""Draft prototyping: per-node generation, revision tools, cascade updates.

Each non-root node can carry one generated paragraph (or opening sentence,
for key aspects). The draft prompt is chosen by node kind and always embeds
the parent's goal text as context, never the parent's generated prose, so
regeneration of one node does not depend on any other node's draft.

Scheduling is controlled by the plan's lazy flag. Lazy ON defers all
generation until an explicit request; lazy OFF (eager) is enforced by the
session layer, which regenerates every stale node right after a mutation.

Cascade updates implement the wizard flow for propagating an upstream text
change: edit the node, regenerate it, then walk its dependents one step at
a time, offering suggested replacement topics for each.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from . import clock
from .errors import (
    EmptyArgument,
    GenerationInterrupted,
    IndexOutOfRange,
    InvalidArgument,
    NoDraft,
    ParseFailure,
    ProviderError,
    RootDraftForbidden,
    StepNotPending,
)
from .parsing import FallacySuggestion, parse_numbered_list
from .plan import (
    ArgumentPlan,
    ChatTurn,
    DraftBlock,
    NodeKind,
    PlanNode,
    dependents,
    document_order,
    edit_prompt_text,
    needs_generation,
)
from .prompting import Message, PromptTask, RenderedPrompt, load_template, render
from .providers import Provider

_DRAFT_TASK = {
    NodeKind.KEY_ASPECT: PromptTask.DRAFT_KEY_ASPECT,
    NodeKind.DISCUSSION_POINT: PromptTask.DRAFT_DISCUSSION_POINT,
    NodeKind.COUNTERARGUMENT: PromptTask.DRAFT_COUNTERARGUMENT,
    NodeKind.SUPPORTING_EVIDENCE: PromptTask.DRAFT_SUPPORTING_EVIDENCE,
}


def build_draft_prompt(plan: ArgumentPlan, node_id: str) -> RenderedPrompt:
    """Render the draft prompt a node would be generated from."""
    node = plan.node(node_id)
    if node.edge_from_parent is None:
        raise RootDraftForbidden("the main argument is its own text block")
    parent = plan.parent_of(node_id)
    assert parent is not None
    slots = {"selected_argument": parent.prompt_text}
    if node.kind is NodeKind.KEY_ASPECT:
        slots["selected_aspect"] = node.prompt_text
    elif node.kind is NodeKind.DISCUSSION_POINT:
        slots["selected_point"] = node.prompt_text
    elif node.kind is NodeKind.COUNTERARGUMENT:
        slots["counter_argument"] = node.prompt_text
        slots["selected_aspect"] = _nearest_aspect_text(plan, node_id)
    else:
        slots["evidence_type"] = node.prompt_text
    return render(_DRAFT_TASK[node.kind], slots)


def _nearest_aspect_text(plan: ArgumentPlan, node_id: str) -> str:
    """Closest key-aspect ancestor's text; the parent's text when none."""
    current = plan.parent_of(node_id)
    fallback = current.prompt_text if current is not None else ""
    while current is not None:
        if current.kind is NodeKind.KEY_ASPECT:
            return current.prompt_text
        current = plan.parent_of(current.id)
    return fallback


def _seed_refine_chat(text: str) -> list[ChatTurn]:
    role = load_template(PromptTask.REFINE_WITH_INSTRUCTION).role
    return [ChatTurn("system", role), ChatTurn("assistant", text)]


def _set_draft_text(node: PlanNode, text: str) -> None:
    # A fresh text restarts the refinement conversation; the old text is
    # still reachable through history.
    if node.draft is None:
        node.draft = DraftBlock(text=text, refine_chat=_seed_refine_chat(text))
    else:
        node.draft.history.append(node.draft.text)
        node.draft.text = text
        node.draft.stale = False
        node.draft.refine_chat = _seed_refine_chat(text)


def record_draft(plan: ArgumentPlan, node_id: str, text: str) -> None:
    """Store draft text on a node, pushing any prior text to history."""
    node = plan.node(node_id)
    if node.edge_from_parent is None:
        raise RootDraftForbidden("the main argument is its own text block")
    _set_draft_text(node, text)
    plan._touch()


def generate_draft(plan: ArgumentPlan, node_id: str, provider: Provider) -> str:
    """Generate (or regenerate) one node's draft; returns the text."""
    prompt = build_draft_prompt(plan, node_id)
    text = provider.complete(prompt)
    record_draft(plan, node_id, text)
    return text


def generate_all_stale(plan: ArgumentPlan, provider: Provider) -> list[str]:
    """Generate every node needing a draft, parents before children.

    Returns processed ids in order. A provider failure stops the sweep and
    raises GenerationInterrupted carrying the progress so far; drafts
    already written stay written.
    """
    processed: list[str] = []
    for node_id in document_order(plan):
        node = plan.node(node_id)
        if not needs_generation(plan, node):
            continue
        try:
            generate_draft(plan, node_id, provider)
        except (ProviderError, ParseFailure) as exc:
            raise GenerationInterrupted(node_id, processed, exc) from exc
        processed.append(node_id)
    return processed


def set_lazy_mode(plan: ArgumentPlan, on: bool, provider: Provider) -> list[str]:
    """Switch scheduling mode; turning eager catches up on stale nodes."""
    plan.lazy_mode = on
    plan._touch()
    if on:
        return []
    return generate_all_stale(plan, provider)


def alternatives(plan: ArgumentPlan, node_id: str, n: int, provider: Provider) -> list[str]:
    """Propose n replacement candidates for a draft; the plan is untouched."""
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    node = plan.node(node_id)
    if node.draft is None:
        raise NoDraft(node_id)
    draft_prompt = build_draft_prompt(plan, node_id).messages[-1].content
    prompt = render(PromptTask.ALTERNATIVES, {"draft_prompt": draft_prompt})
    return [provider.complete(prompt) for _ in range(n)]


def replace_draft(plan: ArgumentPlan, node_id: str, text: str) -> None:
    """Set a node's draft text directly (alternative pick or hand edit).

    Draft text is never generation context, so descendants stay fresh.
    """
    if text is None or not text.strip():
        raise EmptyArgument("draft text must be non-blank")
    record_draft(plan, node_id, text)


def refine(plan: ArgumentPlan, node_id: str, instruction: str, provider: Provider) -> str:
    """Revise a draft conversationally; the full transcript is resent."""
    if instruction is None or not instruction.strip():
        raise InvalidArgument("instruction must be non-blank")
    node = plan.node(node_id)
    if node.draft is None:
        raise NoDraft(node_id)
    chat = node.draft.refine_chat
    chat.append(ChatTurn("user", instruction))
    prompt = RenderedPrompt(
        task=PromptTask.REFINE_WITH_INSTRUCTION,
        messages=tuple(Message(turn.role, turn.content) for turn in chat),
        temperature=load_template(PromptTask.REFINE_WITH_INSTRUCTION).temperature,
    )
    try:
        text = provider.complete(prompt)
    except ProviderError:
        chat.pop()  # keep the transcript consistent with what the model saw
        raise
    chat.append(ChatTurn("assistant", text))
    node.draft.history.append(node.draft.text)
    node.draft.text = text
    plan._touch()
    return text


def fix_fallacies(
    plan: ArgumentPlan,
    node_id: str,
    fallacies: list[FallacySuggestion],
    provider: Provider,
) -> str:
    """Ask for a rewrite addressing the named weaknesses; returns the text.

    Pure proposal: the caller decides whether to apply it via replace_draft.
    """
    if not fallacies:
        raise InvalidArgument("fallacies must be non-empty")
    node = plan.node(node_id)
    selected = node.draft.text if node.draft is not None else node.prompt_text
    listed = "; ".join(f"{f.name}: {f.explanation}" for f in fallacies)
    prompt = render(
        PromptTask.FIX_FALLACIES,
        {"selected_argument": selected, "fallacy_list": listed},
    )
    return provider.complete(prompt)


class StepStatus(Enum):
    PENDING = "pending"
    APPLIED = "applied"
    SKIPPED = "skipped"


@dataclass
class CascadeStep:
    node_id: str
    suggested_topics: list[str] = field(default_factory=list)
    status: StepStatus = StepStatus.PENDING


@dataclass
class CascadePlan:
    changed_node: str
    created_at: str = field(default_factory=clock.now)
    steps: list[CascadeStep] = field(default_factory=list)


def cascade_update(
    plan: ArgumentPlan,
    node_id: str,
    new_text: str,
    provider: Provider,
) -> CascadePlan:
    """Rewrite a node's goal and open a wizard over its dependents.

    The changed node's own draft regenerates immediately (the root has no
    draft and is skipped). Every strict descendant becomes one pending step,
    in document order, with replacement topics suggested from its parent's
    current goal text. Topic suggestion failures leave that step's list
    empty; the wizard still works with manual topics.
    """
    node = plan.node(node_id)
    edit_prompt_text(plan, node_id, new_text)
    if node.edge_from_parent is not None:
        generate_draft(plan, node_id, provider)
    cascade = CascadePlan(changed_node=node_id)
    for dep_id in dependents(plan, node_id):
        parent = plan.parent_of(dep_id)
        assert parent is not None
        prompt = render(
            PromptTask.CASCADE_TOPIC_SUGGESTIONS, {"parent_context": parent.prompt_text}
        )
        try:
            topics = parse_numbered_list(provider.complete(prompt))
        except (ProviderError, ParseFailure):
            topics = []
        cascade.steps.append(CascadeStep(node_id=dep_id, suggested_topics=topics))
    return cascade


def cascade_step(
    plan: ArgumentPlan,
    cascade: CascadePlan,
    step_index: int,
    provider: Provider,
    *,
    topic: str | None = None,
    skip: bool = False,
) -> CascadeStep:
    """Resolve one wizard step: adopt a topic, keep the current one, or skip.

    Skipping leaves the node stale for a later sweep. Adopting or keeping
    regenerates the node's draft; only a successful resolution flips the
    status, so a provider failure leaves the step retryable.
    """
    if not (0 <= step_index < len(cascade.steps)):
        raise IndexOutOfRange(f"step {step_index} outside 0..{len(cascade.steps) - 1}")
    step = cascade.steps[step_index]
    if step.status is not StepStatus.PENDING:
        raise StepNotPending(f"step {step_index} already {step.status.value}")
    if skip:
        step.status = StepStatus.SKIPPED
        return step
    if topic is not None:
        edit_prompt_text(plan, step.node_id, topic)
    generate_draft(plan, step.node_id, provider)
    step.status = StepStatus.APPLIED
    return step
