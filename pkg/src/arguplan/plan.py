"""Argumentation tree model and structural operations.

A plan is a rooted tree of typed writing goals. The root always carries the
main argument; every other node hangs off its parent through one of four
edge kinds, and the edge kind fully determines the node kind:

    featured_by   -> key_aspect
    elaborated_by -> discussion_point
    attacked_by   -> counterargument
    supported_by  -> supporting_evidence

Structural mutations keep three invariants: the document stays a tree, node
kind always matches the incoming edge, and any change to a node's goal text,
edge kind, or position marks the node and its whole subtree stale so the
draft pipeline knows what to regenerate.

Plans are single-writer documents: callers must not mutate one plan from
two threads at once (the HTTP layer serializes mutations per plan id).
Concurrent reads of a quiescent plan are safe.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from enum import Enum

from . import clock
from .errors import (
    CycleForbidden,
    EmptyArgument,
    IndexOutOfRange,
    RootEdgeForbidden,
    RootRemovalForbidden,
    UnknownNode,
)


class NodeKind(Enum):
    MAIN_ARGUMENT = "main_argument"
    KEY_ASPECT = "key_aspect"
    DISCUSSION_POINT = "discussion_point"
    COUNTERARGUMENT = "counterargument"
    SUPPORTING_EVIDENCE = "supporting_evidence"


class EdgeKind(Enum):
    FEATURED_BY = "featured_by"
    ELABORATED_BY = "elaborated_by"
    ATTACKED_BY = "attacked_by"
    SUPPORTED_BY = "supported_by"


_KIND_FOR_EDGE = {
    EdgeKind.FEATURED_BY: NodeKind.KEY_ASPECT,
    EdgeKind.ELABORATED_BY: NodeKind.DISCUSSION_POINT,
    EdgeKind.ATTACKED_BY: NodeKind.COUNTERARGUMENT,
    EdgeKind.SUPPORTED_BY: NodeKind.SUPPORTING_EVIDENCE,
}


def kind_for_edge(edge: EdgeKind) -> NodeKind:
    """Node kind implied by the edge connecting a node to its parent."""
    return _KIND_FOR_EDGE[edge]


@dataclass
class ChatTurn:
    role: str  # system | user | assistant
    content: str
    timestamp: str = field(default_factory=clock.now)


@dataclass
class DraftBlock:
    """Generated prose for one node, plus its revision bookkeeping.

    ``stale`` means the text predates the latest change to this node's
    generation context (its own goal text or its ancestry). ``history`` is
    append-only within a session; ``refine_chat`` holds the conversational
    refinement transcript, seeded with a system turn and the draft itself.
    """

    text: str
    stale: bool = False
    history: list[str] = field(default_factory=list)
    refine_chat: list[ChatTurn] = field(default_factory=list)


@dataclass
class PlanNode:
    id: str
    kind: NodeKind
    prompt_text: str
    color_index: int
    edge_from_parent: EdgeKind | None = None  # None iff root
    draft: DraftBlock | None = None
    children: list[PlanNode] = field(default_factory=list)


@dataclass
class ArgumentPlan:
    id: str
    root: PlanNode
    lazy_mode: bool = False
    created_at: str = ""
    modified_at: str = ""
    next_color: int = 1  # creation counter; also mints node ids

    # -- lookup helpers -------------------------------------------------

    def node(self, node_id: str) -> PlanNode:
        found = self._find(self.root, node_id)
        if found is None:
            raise UnknownNode(node_id)
        return found

    def parent_of(self, node_id: str) -> PlanNode | None:
        """Parent of a node, or None for the root. Raises for unknown ids."""
        if node_id == self.root.id:
            return None
        parent = self._find_parent(self.root, node_id)
        if parent is None:
            raise UnknownNode(node_id)
        return parent

    def _find(self, node: PlanNode, node_id: str) -> PlanNode | None:
        if node.id == node_id:
            return node
        for child in node.children:
            found = self._find(child, node_id)
            if found is not None:
                return found
        return None

    def _find_parent(self, node: PlanNode, node_id: str) -> PlanNode | None:
        for child in node.children:
            if child.id == node_id:
                return node
            found = self._find_parent(child, node_id)
            if found is not None:
                return found
        return None

    def _touch(self) -> None:
        self.modified_at = clock.now()

    def _mint_node(self, edge: EdgeKind, text: str) -> PlanNode:
        node = PlanNode(
            id=f"n{self.next_color}",
            kind=kind_for_edge(edge),
            prompt_text=text,
            color_index=self.next_color,
            edge_from_parent=edge,
        )
        self.next_color += 1
        return node


def _require_text(text: str) -> str:
    if text is None or not text.strip():
        raise EmptyArgument("text must be non-blank")
    return text


def new_plan(argument_text: str, *, plan_id: str | None = None, now: str | None = None) -> ArgumentPlan:
    """Create a plan whose root carries the main argument.

    ``plan_id`` and ``now`` exist so scripted runs can be reproducible;
    they default to a random id and the current time.
    """
    _require_text(argument_text)
    created = now if now is not None else clock.now()
    root = PlanNode(
        id="n0",
        kind=NodeKind.MAIN_ARGUMENT,
        prompt_text=argument_text,
        color_index=0,
    )
    return ArgumentPlan(
        id=plan_id if plan_id is not None else uuid.uuid4().hex[:12],
        root=root,
        lazy_mode=False,
        created_at=created,
        modified_at=created,
        next_color=1,
    )


def add_child(plan: ArgumentPlan, parent_id: str, edge: EdgeKind, text: str) -> str:
    """Append a new goal as the last child of ``parent_id``; returns its id."""
    _require_text(text)
    parent = plan.node(parent_id)
    node = plan._mint_node(edge, text)
    parent.children.append(node)
    plan._touch()
    return node.id


def add_to_graph(plan: ArgumentPlan, selected_text: str, anchor_node_id: str | None = None) -> str:
    """Turn user-selected text into a node under the anchor (default: root).

    User-authored goals default to the most generic relationship,
    elaborated_by, so they land as discussion points.
    """
    anchor = anchor_node_id if anchor_node_id is not None else plan.root.id
    return add_child(plan, anchor, EdgeKind.ELABORATED_BY, selected_text)


def set_edge_kind(plan: ArgumentPlan, node_id: str, edge: EdgeKind) -> None:
    """Re-type the edge above a node; its kind follows, its subtree goes stale."""
    node = plan.node(node_id)
    if node is plan.root:
        raise RootEdgeForbidden("root has no incoming edge")
    node.edge_from_parent = edge
    node.kind = kind_for_edge(edge)
    _mark_subtree_stale(node)
    plan._touch()


def move_node(plan: ArgumentPlan, node_id: str, new_parent_id: str, edge: EdgeKind) -> None:
    """Re-parent a subtree as the last child of ``new_parent_id``."""
    node = plan.node(node_id)
    if node is plan.root:
        raise RootEdgeForbidden("root cannot be moved")
    new_parent = plan.node(new_parent_id)
    if new_parent is node or plan._find(node, new_parent_id) is not None:
        raise CycleForbidden(f"{new_parent_id!r} is inside the subtree of {node_id!r}")
    old_parent = plan.parent_of(node_id)
    assert old_parent is not None
    old_parent.children.remove(node)
    node.edge_from_parent = edge
    node.kind = kind_for_edge(edge)
    new_parent.children.append(node)
    _mark_subtree_stale(node)
    plan._touch()


def remove_subtree(plan: ArgumentPlan, node_id: str) -> int:
    """Delete a node and everything under it; returns the removed count."""
    node = plan.node(node_id)
    if node is plan.root:
        raise RootRemovalForbidden("cannot remove the main argument")
    parent = plan.parent_of(node_id)
    assert parent is not None
    count = len(_subtree_ids(node))
    parent.children.remove(node)
    plan._touch()
    return count


def edit_prompt_text(plan: ArgumentPlan, node_id: str, new_text: str) -> list[str]:
    """Replace a node's goal text; returns the stale set in document order.

    The whole subtree is marked stale even when the text is unchanged:
    staleness tracks context edits, not text diffs, so the behavior stays
    predictable and cheap.
    """
    _require_text(new_text)
    node = plan.node(node_id)
    node.prompt_text = new_text
    _mark_subtree_stale(node)
    plan._touch()
    return _subtree_ids(node)


def reorder_child(plan: ArgumentPlan, parent_id: str, from_index: int, to_index: int) -> None:
    """Move a child within its siblings. Pure ordering change, no staleness."""
    parent = plan.node(parent_id)
    n = len(parent.children)
    if not (0 <= from_index < n and 0 <= to_index < n):
        raise IndexOutOfRange(f"indices ({from_index}, {to_index}) outside 0..{n - 1}")
    child = parent.children.pop(from_index)
    parent.children.insert(to_index, child)
    plan._touch()


def document_order(plan: ArgumentPlan) -> list[str]:
    """Node ids in depth-first pre-order: the linear draft/paragraph order."""
    return _subtree_ids(plan.root)


def dependents(plan: ArgumentPlan, node_id: str) -> list[str]:
    """Strict descendants of a node, in document order."""
    node = plan.node(node_id)
    return _subtree_ids(node)[1:]


def color_of(plan: ArgumentPlan, node_id: str) -> int:
    """Creation-order color index; the UI maps it onto its palette."""
    return plan.node(node_id).color_index


def needs_generation(plan: ArgumentPlan, node: PlanNode) -> bool:
    """True when the draft pipeline owes this node a (re)generation."""
    if node is plan.root:
        return False  # the root's block is its own argument text
    return node.draft is None or node.draft.stale


def _subtree_ids(node: PlanNode) -> list[str]:
    ids = [node.id]
    for child in node.children:
        ids.extend(_subtree_ids(child))
    return ids


def _mark_subtree_stale(node: PlanNode) -> None:
    if node.draft is not None:
        node.draft.stale = True
    for child in node.children:
        _mark_subtree_stale(child)
