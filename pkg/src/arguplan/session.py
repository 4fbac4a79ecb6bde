"""Mutation facade that enforces the plan's scheduling mode.

Callers that want lazy/eager semantics route structural edits through a
PlanSession instead of calling the plan ops directly. Every mutation method
ends with the same hook: in eager mode (lazy off) it synchronously
regenerates whatever the mutation left stale or undrafted, so the writer
always sees up-to-date prose; in lazy mode it does nothing and the stale
set simply grows until an explicit generate().

Cascade updates are the one deliberate exception: the wizard exists to walk
the affected nodes interactively, so the hook must not bulk-regenerate them
out from under it.
"""

from __future__ import annotations

from .drafting import (
    CascadePlan,
    CascadeStep,
    cascade_step,
    cascade_update,
    generate_all_stale,
    set_lazy_mode,
)
from .ideation import accept_suggestions
from .plan import (
    ArgumentPlan,
    EdgeKind,
    add_child,
    edit_prompt_text,
    move_node,
    remove_subtree,
    reorder_child,
    set_edge_kind,
)
from .providers import Provider


class PlanSession:
    def __init__(self, plan: ArgumentPlan, provider: Provider):
        self.plan = plan
        self.provider = provider

    def _after_mutation(self) -> list[str]:
        if self.plan.lazy_mode:
            return []
        return generate_all_stale(self.plan, self.provider)

    # -- structural edits, each returning (result, regenerated ids) ------

    def add_child(self, parent_id: str, edge: EdgeKind, text: str) -> tuple[str, list[str]]:
        node_id = add_child(self.plan, parent_id, edge, text)
        return node_id, self._after_mutation()

    def accept(self, node_id: str, edge: EdgeKind, items: list[str]) -> tuple[list[str], list[str]]:
        ids = accept_suggestions(self.plan, node_id, edge, items)
        return ids, self._after_mutation()

    def edit_text(self, node_id: str, text: str) -> list[str]:
        edit_prompt_text(self.plan, node_id, text)
        return self._after_mutation()

    def set_edge(self, node_id: str, edge: EdgeKind) -> list[str]:
        set_edge_kind(self.plan, node_id, edge)
        return self._after_mutation()

    def move(self, node_id: str, new_parent_id: str, edge: EdgeKind) -> list[str]:
        move_node(self.plan, node_id, new_parent_id, edge)
        return self._after_mutation()

    def reorder(self, parent_id: str, from_index: int, to_index: int) -> list[str]:
        reorder_child(self.plan, parent_id, from_index, to_index)
        return self._after_mutation()

    def remove(self, node_id: str) -> tuple[int, list[str]]:
        count = remove_subtree(self.plan, node_id)
        return count, self._after_mutation()

    # -- scheduling -------------------------------------------------------

    def set_lazy(self, on: bool) -> list[str]:
        return set_lazy_mode(self.plan, on, self.provider)

    def generate(self) -> list[str]:
        return generate_all_stale(self.plan, self.provider)

    # -- cascade wizard (hook bypassed by design) -------------------------

    def cascade_update(self, node_id: str, new_text: str) -> CascadePlan:
        return cascade_update(self.plan, node_id, new_text, self.provider)

    def cascade_step(
        self,
        cascade: CascadePlan,
        step_index: int,
        *,
        topic: str | None = None,
        skip: bool = False,
    ) -> CascadeStep:
        return cascade_step(
            self.plan, cascade, step_index, self.provider, topic=topic, skip=skip
        )
