"""Goal recommendation and argumentative sparks.

The chain-of-thought flow asks the model to widen the plan step by step:
elaborate a node into key aspects, then expand chosen aspects into
discussion points (one completion per aspect). Sparks probe a node's text
for counterarguments, logical weaknesses, and candidate evidence moves.

Suggestions are transient. Nothing touches the plan until the writer
accepts items, at which point each accepted item becomes a child node whose
kind follows from the chosen edge.

Malformed replies get one retry with the identical prompt before the
ParseFailure surfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, TypeVar

from .errors import InvalidArgument, ParseFailure, ProviderError
from .parsing import (
    EvidenceSuggestion,
    FallacySuggestion,
    parse_evidence,
    parse_fallacies,
    parse_numbered_list,
)
from .plan import ArgumentPlan, EdgeKind, add_child
from .prompting import PromptTask, RenderedPrompt, render
from .providers import Provider

T = TypeVar("T")


@dataclass
class SuggestionList:
    task: PromptTask
    source_node: str
    items: list[str]


@dataclass
class DiscussionPointResults:
    """Per-aspect outcomes; an aspect lands in exactly one of the maps."""

    points: dict[str, SuggestionList] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


def _complete_parsed(
    provider: Provider,
    prompt: RenderedPrompt,
    parser: Callable[[str], T],
) -> T:
    raw = provider.complete(prompt)
    try:
        return parser(raw)
    except ParseFailure:
        raw = provider.complete(prompt)
        return parser(raw)


def elaborate_key_aspects(plan: ArgumentPlan, node_id: str, provider: Provider) -> SuggestionList:
    """Suggest high-level aspects that could support the node's goal."""
    node = plan.node(node_id)
    prompt = render(PromptTask.KEY_ASPECTS, {"selected_argument": node.prompt_text})
    items = _complete_parsed(provider, prompt, parse_numbered_list)
    return SuggestionList(task=PromptTask.KEY_ASPECTS, source_node=node_id, items=items)


def discussion_points(
    plan: ArgumentPlan,
    node_id: str,
    aspects: list[str],
    provider: Provider,
) -> DiscussionPointResults:
    """Expand aspects into discussion points, one completion per aspect.

    Aspects fail independently; the call as a whole raises only when every
    aspect failed (re-raising the first failure).
    """
    if not aspects:
        raise InvalidArgument("aspects must be non-empty")
    node = plan.node(node_id)
    results = DiscussionPointResults()
    first_failure: Exception | None = None
    for aspect in aspects:
        prompt = render(
            PromptTask.DISCUSSION_POINTS,
            {"selected_argument": node.prompt_text, "selected_aspect": aspect},
        )
        try:
            items = _complete_parsed(provider, prompt, parse_numbered_list)
        except (ProviderError, ParseFailure) as exc:
            results.errors[aspect] = str(exc)
            if first_failure is None:
                first_failure = exc
            continue
        results.points[aspect] = SuggestionList(
            task=PromptTask.DISCUSSION_POINTS, source_node=node_id, items=items
        )
    if not results.points and first_failure is not None:
        raise first_failure
    return results


def counterargument_sparks(plan: ArgumentPlan, node_id: str, provider: Provider) -> SuggestionList:
    """Suggest counterarguments that challenge the node's text."""
    node = plan.node(node_id)
    prompt = render(PromptTask.COUNTERARGUMENTS, {"selected_argument": node.prompt_text})
    items = _complete_parsed(provider, prompt, parse_numbered_list)
    return SuggestionList(task=PromptTask.COUNTERARGUMENTS, source_node=node_id, items=items)


def fallacy_sparks(plan: ArgumentPlan, node_id: str, provider: Provider) -> list[FallacySuggestion]:
    """Point out logical weaknesses in the node's text, with explanations."""
    node = plan.node(node_id)
    prompt = render(PromptTask.LOGICAL_FALLACIES, {"selected_argument": node.prompt_text})
    return _complete_parsed(provider, prompt, parse_fallacies)


def evidence_sparks(plan: ArgumentPlan, node_id: str, provider: Provider) -> list[EvidenceSuggestion]:
    """Suggest evidence moves for the node, tagged by rhetorical strategy."""
    node = plan.node(node_id)
    prompt = render(PromptTask.SUPPORTING_EVIDENCE, {"selected_argument": node.prompt_text})
    return _complete_parsed(provider, prompt, parse_evidence)


def evidence_goal_text(suggestion: EvidenceSuggestion) -> str:
    """Node text for an accepted evidence suggestion.

    Keeps the strategy tag in front so the draft prompt can name the kind
    of evidence being realized.
    """
    return f"{suggestion.strategy}: {suggestion.description}"


def accept_suggestions(
    plan: ArgumentPlan,
    node_id: str,
    edge: EdgeKind,
    items: list[str],
) -> list[str]:
    """Attach accepted suggestions as children, in item order; returns ids."""
    if not items:
        raise InvalidArgument("items must be non-empty")
    plan.node(node_id)  # fail before any insertion
    return [add_child(plan, node_id, edge, item) for item in items]
