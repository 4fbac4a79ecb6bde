"""Scheduling semantics of the mutation facade (lazy vs eager)."""

from __future__ import annotations

import pytest

from arguplan.plan import EdgeKind, new_plan
from arguplan.session import PlanSession
from oracles import stale_ids


def _draft_calls(provider) -> int:
    return sum(1 for p in provider.calls if p.task.value.startswith("draft_"))


@pytest.fixture
def eager(scripted):
    plan = new_plan("Remote work should be a legal right", plan_id="s1",
                    now="2026-01-01T00:00:00Z")
    provider = scripted(default="generated text")
    return PlanSession(plan, provider), provider


@pytest.fixture
def lazy(scripted):
    plan = new_plan("Remote work should be a legal right", plan_id="s2",
                    now="2026-01-01T00:00:00Z")
    plan.lazy_mode = True
    provider = scripted(default="generated text")
    return PlanSession(plan, provider), provider


class TestEagerMode:
    def test_every_mutation_leaves_no_stale_node(self, eager):
        session, provider = eager
        plan = session.plan

        aspect, generated = session.add_child("n0", EdgeKind.FEATURED_BY, "flexibility")
        assert generated == [aspect]
        assert stale_ids(plan) == set()

        ids, generated = session.accept(aspect, EdgeKind.ELABORATED_BY, ["focus", "health"])
        assert generated == ids
        assert stale_ids(plan) == set()

        generated = session.edit_text(aspect, "schedule flexibility")
        assert set(generated) == {aspect, *ids}
        assert stale_ids(plan) == set()

        generated = session.set_edge(ids[0], EdgeKind.SUPPORTED_BY)
        assert generated == [ids[0]]
        assert stale_ids(plan) == set()

        generated = session.move(ids[1], "n0", EdgeKind.FEATURED_BY)
        assert generated == [ids[1]]
        assert stale_ids(plan) == set()

        generated = session.reorder("n0", 0, 1)
        assert generated == []
        assert stale_ids(plan) == set()

        count, generated = session.remove(ids[0])
        assert count == 1
        assert generated == []
        assert stale_ids(plan) == set()

    def test_accept_then_generate_is_a_no_op(self, eager):
        session, provider = eager
        session.accept("n0", EdgeKind.FEATURED_BY, ["a", "b"])
        calls_before = len(provider.calls)
        assert session.generate() == []
        assert len(provider.calls) == calls_before


class TestLazyMode:
    def test_no_draft_calls_across_a_whole_editing_session(self, lazy):
        session, provider = lazy
        plan = session.plan

        aspect, generated = session.add_child("n0", EdgeKind.FEATURED_BY, "flexibility")
        assert generated == []
        ids, _ = session.accept(aspect, EdgeKind.ELABORATED_BY, ["focus", "health"])
        session.edit_text(aspect, "schedule flexibility")
        session.set_edge(ids[0], EdgeKind.SUPPORTED_BY)
        session.move(ids[1], "n0", EdgeKind.FEATURED_BY)
        session.reorder("n0", 0, 1)
        session.remove(ids[0])

        assert _draft_calls(provider) == 0
        assert provider.calls == []

    def test_explicit_generate_clears_the_backlog(self, lazy):
        session, provider = lazy
        aspect, _ = session.add_child("n0", EdgeKind.FEATURED_BY, "flexibility")
        session.accept(aspect, EdgeKind.ELABORATED_BY, ["focus"])
        generated = session.generate()
        assert len(generated) == 2
        assert stale_ids(session.plan) == set()
        assert _draft_calls(provider) == 2

    def test_switching_eager_catches_up(self, lazy):
        session, provider = lazy
        session.add_child("n0", EdgeKind.FEATURED_BY, "flexibility")
        generated = session.set_lazy(False)
        assert len(generated) == 1
        assert session.plan.lazy_mode is False
        # and stays eager: the next mutation drafts immediately
        _, generated = session.add_child("n0", EdgeKind.FEATURED_BY, "savings")
        assert len(generated) == 1

    def test_switching_lazy_stops_generation(self, eager):
        session, provider = eager
        session.set_lazy(True)
        _, generated = session.add_child("n0", EdgeKind.FEATURED_BY, "quiet")
        assert generated == []
        assert _draft_calls(provider) == 0


class TestCascadeBypass:
    def test_wizard_controls_regeneration_not_the_hook(self, eager, scripted):
        session, provider = eager
        aspect, _ = session.add_child("n0", EdgeKind.FEATURED_BY, "flexibility")
        [point], _ = session.accept(aspect, EdgeKind.ELABORATED_BY, ["focus"])

        wizard_provider = scripted(
            {
                "draft_key_aspect": "redrafted aspect",
                "draft_discussion_point": "redrafted point",
                "cascade_topic_suggestions": "1. better topic",
            }
        )
        session.provider = wizard_provider
        cascade = session.cascade_update(aspect, "work-hour autonomy")

        # the changed node regenerated, but its dependent is left to the wizard
        assert session.plan.node(aspect).draft.text == "redrafted aspect"
        assert session.plan.node(point).draft.stale is True
        assert [s.node_id for s in cascade.steps] == [point]

        step = session.cascade_step(cascade, 0, topic="better topic")
        assert step.node_id == point
        assert session.plan.node(point).prompt_text == "better topic"
        assert session.plan.node(point).draft.text == "redrafted point"
        assert stale_ids(session.plan) == set()
