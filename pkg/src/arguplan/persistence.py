"""Plan files and document exports.

Plans serialize to a versioned UTF-8 JSON file carrying the full node tree:
ids, colors, goal texts, drafts with staleness, histories, and refinement
transcripts. Serialization is canonical (sorted keys, fixed indentation,
trailing newline), so saving an unchanged plan reproduces the identical
bytes; that property is what makes scripted runs diffable.

Writes go through a temp file and an atomic rename, so a reader never sees
a half-written plan.

Exports are pure reads: a nested-bullet outline of the goals, and a linear
draft document in paragraph order.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

from .errors import SchemaError
from .plan import (
    ArgumentPlan,
    ChatTurn,
    DraftBlock,
    EdgeKind,
    NodeKind,
    PlanNode,
    document_order,
)

SCHEMA_VERSION = 1

_EDGE_TAG = {
    EdgeKind.FEATURED_BY: "[featured]",
    EdgeKind.ELABORATED_BY: "[elaborated]",
    EdgeKind.ATTACKED_BY: "[counter]",
    EdgeKind.SUPPORTED_BY: "[support]",
}


def _draft_to_dict(draft: DraftBlock | None) -> dict[str, Any] | None:
    if draft is None:
        return None
    return {
        "text": draft.text,
        "stale": draft.stale,
        "history": list(draft.history),
        "refine_chat": [
            {"role": turn.role, "content": turn.content, "timestamp": turn.timestamp}
            for turn in draft.refine_chat
        ],
    }


def node_to_dict(node: PlanNode) -> dict[str, Any]:
    return {
        "id": node.id,
        "kind": node.kind.value,
        "edge_from_parent": node.edge_from_parent.value if node.edge_from_parent else None,
        "prompt_text": node.prompt_text,
        "color_index": node.color_index,
        "draft": _draft_to_dict(node.draft),
        "children": [node_to_dict(child) for child in node.children],
    }


def plan_to_dict(plan: ArgumentPlan) -> dict[str, Any]:
    return {
        "version": SCHEMA_VERSION,
        "id": plan.id,
        "lazy_mode": plan.lazy_mode,
        "created_at": plan.created_at,
        "modified_at": plan.modified_at,
        "next_color": plan.next_color,
        "root": node_to_dict(plan.root),
    }


def _draft_from_dict(data: dict[str, Any] | None) -> DraftBlock | None:
    if data is None:
        return None
    return DraftBlock(
        text=data["text"],
        stale=data["stale"],
        history=list(data["history"]),
        refine_chat=[
            ChatTurn(role=t["role"], content=t["content"], timestamp=t["timestamp"])
            for t in data["refine_chat"]
        ],
    )


def _node_from_dict(data: dict[str, Any]) -> PlanNode:
    edge = data["edge_from_parent"]
    return PlanNode(
        id=data["id"],
        kind=NodeKind(data["kind"]),
        edge_from_parent=EdgeKind(edge) if edge is not None else None,
        prompt_text=data["prompt_text"],
        color_index=data["color_index"],
        draft=_draft_from_dict(data["draft"]),
        children=[_node_from_dict(child) for child in data["children"]],
    )


def plan_from_dict(data: dict[str, Any]) -> ArgumentPlan:
    version = data.get("version")
    if not isinstance(version, int) or version > SCHEMA_VERSION or version < 1:
        raise SchemaError(version)
    return ArgumentPlan(
        id=data["id"],
        root=_node_from_dict(data["root"]),
        lazy_mode=data["lazy_mode"],
        created_at=data["created_at"],
        modified_at=data["modified_at"],
        next_color=data["next_color"],
    )


def dumps_plan(plan: ArgumentPlan) -> str:
    return json.dumps(plan_to_dict(plan), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def loads_plan(text: str) -> ArgumentPlan:
    return plan_from_dict(json.loads(text))


def save(plan: ArgumentPlan, path: str | Path) -> None:
    path = Path(path)
    blob = dumps_plan(plan)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(blob)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load(path: str | Path) -> ArgumentPlan:
    return loads_plan(Path(path).read_text(encoding="utf-8"))


def export_markdown(plan: ArgumentPlan) -> str:
    """Nested-bullet outline of the goal texts, tagged by relationship."""
    lines: list[str] = []

    def walk(node: PlanNode, depth: int) -> None:
        indent = "  " * depth
        if node.edge_from_parent is None:
            lines.append(f"{indent}- {node.prompt_text}")
        else:
            lines.append(f"{indent}- {_EDGE_TAG[node.edge_from_parent]} {node.prompt_text}")
        for child in node.children:
            walk(child, depth + 1)

    walk(plan.root, 0)
    return "\n".join(lines) + "\n"


def export_text(plan: ArgumentPlan) -> str:
    """Linear draft: thesis first, then every block in paragraph order.

    Undrafted nodes appear as their goal text in brackets, so the export is
    a complete skeleton even before generation.
    """
    blocks: list[str] = []
    for node_id in document_order(plan):
        node = plan.node(node_id)
        if node.edge_from_parent is None:
            blocks.append(node.prompt_text)
        elif node.draft is not None:
            blocks.append(node.draft.text)
        else:
            blocks.append(f"[{node.prompt_text}]")
    return "\n\n".join(blocks) + "\n"
