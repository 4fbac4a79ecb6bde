"""HTTP facade conformance: routes, status codes, bodies, and locking."""

from __future__ import annotations

import json
import threading

import pytest
from fastapi.testclient import TestClient

from arguplan import persistence, service
from arguplan.plan import remove_subtree
from arguplan.providers import ReplayProvider
from conftest import ScriptedProvider
from oracles import check_invariants, stale_ids

LIST_REPLY = "1. first suggestion\n2. second suggestion"


def _provider():
    return ScriptedProvider(
        {
            "key_aspects": LIST_REPLY,
            "discussion_points": LIST_REPLY,
            "counterarguments": LIST_REPLY,
            "cascade_topic_suggestions": LIST_REPLY,
            "logical_fallacies": "1. False Dilemma: two options only",
            "supporting_evidence": "1. agency data (logos)",
            "alternatives": "another take",
            "refine_with_instruction": "refined text",
            "fix_fallacies": "repaired text",
        },
        default="generated prose",
    )


@pytest.fixture
def harness(tmp_path):
    """(client, provider, app) against a fresh store directory."""

    def build(provider=None, **kwargs):
        provider = provider if provider is not None else _provider()
        app = service.create_app(tmp_path / "plans", provider, **kwargs)
        return TestClient(app), provider, app

    return build


@pytest.fixture
def client(harness):
    built, _, _ = harness()
    return built


def _new_plan(client, argument="Public libraries deserve more funding", lazy=True):
    plan = client.post("/plans", json={"argument": argument}).json()
    if lazy:
        client.patch(f"/plans/{plan['id']}", json={"lazy_mode": True})
    return plan["id"]


def _add(client, plan_id, parent, edge, text):
    response = client.post(
        f"/plans/{plan_id}/nodes", json={"parent_id": parent, "edge": edge, "text": text}
    )
    assert response.status_code == 201, response.text
    return response.json()["id"]


class TestPlanCollection:
    def test_create_returns_full_plan(self, client):
        response = client.post("/plans", json={"argument": "Yes to trams"})
        assert response.status_code == 201
        body = response.json()
        assert body["version"] == 1
        assert body["root"]["prompt_text"] == "Yes to trams"
        assert body["root"]["children"] == []
        assert body["lazy_mode"] is False

    def test_create_requires_argument(self, client):
        response = client.post("/plans", json={})
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_argument"

    def test_malformed_json_is_a_400(self, client):
        response = client.post(
            "/plans", content="{not json", headers={"content-type": "application/json"}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_request"

    def test_list_summarizes(self, client):
        first = _new_plan(client, "Argument one")
        second = _new_plan(client, "Argument two")
        body = client.get("/plans").json()
        # same-second creations tie on created_at and fall back to id order
        assert {p["id"] for p in body["plans"]} == {first, second}
        keyed = [(p["created_at"], p["id"]) for p in body["plans"]]
        assert keyed == sorted(keyed)
        summary = next(p for p in body["plans"] if p["id"] == first)
        assert summary["argument"] == "Argument one"
        assert summary["nodes"] == 1
        assert set(summary) == {"id", "argument", "lazy_mode", "created_at", "modified_at", "nodes"}

    def test_get_unknown_plan(self, client):
        response = client.get("/plans/absent")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_plan"

    def test_delete_removes_plan_and_file(self, harness, tmp_path):
        client, _, _ = harness()
        plan_id = _new_plan(client)
        assert (tmp_path / "plans" / f"{plan_id}.plan.json").exists()
        assert client.delete(f"/plans/{plan_id}").status_code == 204
        assert client.get(f"/plans/{plan_id}").status_code == 404
        assert not (tmp_path / "plans" / f"{plan_id}.plan.json").exists()

    def test_delete_unknown(self, client):
        assert client.delete("/plans/absent").status_code == 404

    def test_lazy_patch_validates(self, client):
        plan_id = _new_plan(client)
        response = client.patch(f"/plans/{plan_id}", json={"lazy_mode": "yes"})
        assert response.status_code == 400

    def test_lazy_off_generates_backlog(self, client):
        plan_id = _new_plan(client, lazy=True)
        nid = _add(client, plan_id, "n0", "featured_by", "an aspect")
        body = client.patch(f"/plans/{plan_id}", json={"lazy_mode": False}).json()
        assert body["generated"] == [nid]
        assert body["plan"]["lazy_mode"] is False
        node = body["plan"]["root"]["children"][0]
        assert node["draft"]["text"] == "generated prose"

    def test_store_survives_restart(self, harness, tmp_path):
        client, _, _ = harness()
        plan_id = _new_plan(client, "Persistent argument")
        reopened = TestClient(service.create_app(tmp_path / "plans", _provider()))
        body = reopened.get(f"/plans/{plan_id}").json()
        assert body["root"]["prompt_text"] == "Persistent argument"


class TestNodes:
    def test_create_node_drafts_eagerly(self, client):
        plan_id = _new_plan(client, lazy=False)
        response = client.post(
            f"/plans/{plan_id}/nodes",
            json={"parent_id": "n0", "edge": "featured_by", "text": "cost"},
        )
        assert response.status_code == 201
        node = response.json()
        assert node["kind"] == "key_aspect"
        assert node["edge_from_parent"] == "featured_by"
        assert node["draft"]["text"] == "generated prose"

    def test_create_node_lazy_leaves_undrafted(self, client):
        plan_id = _new_plan(client, lazy=True)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        node = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]
        assert node["id"] == nid
        assert node["draft"] is None

    def test_bad_edge_value(self, client):
        plan_id = _new_plan(client)
        response = client.post(
            f"/plans/{plan_id}/nodes",
            json={"parent_id": "n0", "edge": "linked_by", "text": "x"},
        )
        assert response.status_code == 400
        assert "linked_by" in response.json()["message"]

    def test_unknown_parent(self, client):
        plan_id = _new_plan(client)
        response = client.post(
            f"/plans/{plan_id}/nodes",
            json={"parent_id": "n9", "edge": "featured_by", "text": "x"},
        )
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_node"

    def test_patch_text(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "old")
        body = client.patch(
            f"/plans/{plan_id}/nodes/{nid}", json={"text": "new"}
        ).json()
        assert body["prompt_text"] == "new"

    def test_patch_edge_rekinds(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "claim")
        body = client.patch(
            f"/plans/{plan_id}/nodes/{nid}", json={"edge": "attacked_by"}
        ).json()
        assert body["kind"] == "counterargument"

    def test_patch_move(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "a")
        b = _add(client, plan_id, "n0", "featured_by", "b")
        client.patch(
            f"/plans/{plan_id}/nodes/{b}",
            json={"move": {"parent_id": a, "edge": "elaborated_by"}},
        )
        tree = client.get(f"/plans/{plan_id}").json()["root"]
        assert [c["id"] for c in tree["children"]] == [a]
        assert [c["id"] for c in tree["children"][0]["children"]] == [b]

    def test_patch_move_cycle_conflict(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "a")
        b = _add(client, plan_id, a, "elaborated_by", "b")
        response = client.patch(
            f"/plans/{plan_id}/nodes/{a}",
            json={"move": {"parent_id": b, "edge": "elaborated_by"}},
        )
        assert response.status_code == 409
        assert response.json()["code"] == "cycle_forbidden"

    def test_patch_reorder(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "a")
        b = _add(client, plan_id, "n0", "featured_by", "b")
        client.patch(f"/plans/{plan_id}/nodes/{b}", json={"reorder": {"to_index": 0}})
        tree = client.get(f"/plans/{plan_id}").json()["root"]
        assert [c["id"] for c in tree["children"]] == [b, a]

    def test_patch_reorder_root_rejected(self, client):
        plan_id = _new_plan(client)
        response = client.patch(
            f"/plans/{plan_id}/nodes/n0", json={"reorder": {"to_index": 0}}
        )
        assert response.status_code == 400

    def test_patch_without_known_field(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "a")
        response = client.patch(f"/plans/{plan_id}/nodes/{nid}", json={"nothing": 1})
        assert response.status_code == 400

    def test_delete_subtree_reports_count(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "a")
        _add(client, plan_id, a, "elaborated_by", "b")
        body = client.delete(f"/plans/{plan_id}/nodes/{a}").json()
        assert body == {"removed": 2}

    def test_delete_root_rejected(self, client):
        plan_id = _new_plan(client)
        response = client.delete(f"/plans/{plan_id}/nodes/n0")
        assert response.status_code == 400
        assert response.json()["code"] == "root_removal_forbidden"


class TestIdeationRoutes:
    def test_elaborate(self, client):
        plan_id = _new_plan(client)
        body = client.post(f"/plans/{plan_id}/nodes/n0/elaborate").json()
        assert body == {"aspects": ["first suggestion", "second suggestion"]}

    def test_elaborate_never_mutates(self, client):
        plan_id = _new_plan(client)
        client.post(f"/plans/{plan_id}/nodes/n0/elaborate")
        assert client.get(f"/plans/{plan_id}").json()["root"]["children"] == []

    def test_strict_replay_miss_maps_to_502(self, harness):
        client, _, _ = harness(provider=ReplayProvider())
        plan_id = _new_plan(client)
        response = client.post(f"/plans/{plan_id}/nodes/n0/elaborate")
        assert response.status_code == 502
        assert response.json()["code"] == "provider"

    def test_discussion_points(self, client):
        plan_id = _new_plan(client)
        body = client.post(
            f"/plans/{plan_id}/nodes/n0/discussion-points",
            json={"aspects": ["cost", "health"]},
        ).json()
        assert set(body["points"]) == {"cost", "health"}
        assert body["points"]["cost"] == ["first suggestion", "second suggestion"]
        assert body["errors"] == {}

    def test_discussion_points_need_aspects(self, client):
        plan_id = _new_plan(client)
        response = client.post(
            f"/plans/{plan_id}/nodes/n0/discussion-points", json={"aspects": []}
        )
        assert response.status_code == 400

    def test_sparks_counterarguments(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "claim")
        body = client.post(f"/plans/{plan_id}/nodes/{nid}/sparks/counterarguments").json()
        assert body == {"items": ["first suggestion", "second suggestion"]}

    def test_sparks_fallacies(self, client):
        plan_id = _new_plan(client)
        body = client.post(f"/plans/{plan_id}/nodes/n0/sparks/fallacies").json()
        assert body == {"items": [{"name": "False Dilemma", "explanation": "two options only"}]}

    def test_sparks_evidence(self, client):
        plan_id = _new_plan(client)
        body = client.post(f"/plans/{plan_id}/nodes/n0/sparks/evidence").json()
        assert body == {"items": [{"strategy": "logos", "description": "agency data"}]}

    def test_sparks_unknown_kind(self, client):
        plan_id = _new_plan(client)
        response = client.post(f"/plans/{plan_id}/nodes/n0/sparks/quips")
        assert response.status_code == 400

    def test_accept(self, client):
        plan_id = _new_plan(client)
        body = client.post(
            f"/plans/{plan_id}/nodes/n0/accept",
            json={"edge": "featured_by", "items": ["cost", "health"]},
        ).json()
        assert body == {"node_ids": ["n1", "n2"]}
        tree = client.get(f"/plans/{plan_id}").json()["root"]
        assert [c["prompt_text"] for c in tree["children"]] == ["cost", "health"]


class TestDraftRoutes:
    def test_draft_one_node(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        body = client.post(f"/plans/{plan_id}/nodes/{nid}/draft").json()
        assert body == {"text": "generated prose"}
        node = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]
        assert node["draft"]["stale"] is False

    def test_draft_root_rejected(self, client):
        plan_id = _new_plan(client)
        response = client.post(f"/plans/{plan_id}/nodes/n0/draft")
        assert response.status_code == 400
        assert response.json()["code"] == "root_draft_forbidden"

    def test_draft_vanished_node_conflicts(self, harness):
        provider = _provider()
        client, _, app = harness(provider=provider)
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "doomed")

        def vanish(prompt):
            store = app.state.store
            with store.lock(plan_id):
                remove_subtree(store.get(plan_id), nid)
                store.save(store.get(plan_id))
            return "too late"

        provider.script["draft_key_aspect"] = vanish
        response = client.post(f"/plans/{plan_id}/nodes/{nid}/draft")
        assert response.status_code == 409
        assert response.json()["code"] == "node_vanished"

    def test_generate_sweep(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "a")
        b = _add(client, plan_id, a, "elaborated_by", "b")
        body = client.post(f"/plans/{plan_id}/generate").json()
        assert body == {"node_ids": [a, b]}
        assert client.post(f"/plans/{plan_id}/generate").json() == {"node_ids": []}

    def test_generate_unknown_plan(self, client):
        assert client.post("/plans/absent/generate").status_code == 404

    def test_alternatives(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        client.post(f"/plans/{plan_id}/nodes/{nid}/draft")
        body = client.post(
            f"/plans/{plan_id}/nodes/{nid}/alternatives", json={"n": 2}
        ).json()
        assert body == {"candidates": ["another take", "another take"]}

    def test_alternatives_validate_n(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        for bad in ({}, {"n": "3"}, {"n": True}):
            assert (
                client.post(f"/plans/{plan_id}/nodes/{nid}/alternatives", json=bad).status_code
                == 400
            )

    def test_alternatives_without_draft_conflict(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        response = client.post(f"/plans/{plan_id}/nodes/{nid}/alternatives", json={"n": 1})
        assert response.status_code == 409
        assert response.json()["code"] == "no_draft"

    def test_replace(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        body = client.post(
            f"/plans/{plan_id}/nodes/{nid}/replace", json={"text": "my own words"}
        ).json()
        assert body["draft"]["text"] == "my own words"

    def test_refine(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        client.post(f"/plans/{plan_id}/nodes/{nid}/draft")
        body = client.post(
            f"/plans/{plan_id}/nodes/{nid}/refine", json={"instruction": "shorter"}
        ).json()
        assert body == {"text": "refined text"}
        node = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]
        assert node["draft"]["text"] == "refined text"
        assert node["draft"]["history"] == ["generated prose"]
        assert [t["role"] for t in node["draft"]["refine_chat"]] == [
            "system", "assistant", "user", "assistant",
        ]

    def test_refine_without_draft_conflict(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        response = client.post(
            f"/plans/{plan_id}/nodes/{nid}/refine", json={"instruction": "x"}
        )
        assert response.status_code == 409

    def test_fix_fallacies(self, client):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        body = client.post(
            f"/plans/{plan_id}/nodes/{nid}/fix-fallacies",
            json={"fallacies": [{"name": "False Dilemma", "explanation": "two options"}]},
        ).json()
        assert body == {"text": "repaired text"}

    @pytest.mark.parametrize(
        "payload",
        [{}, {"fallacies": []}, {"fallacies": ["loose string"]}, {"fallacies": [{"name": "x"}]}],
    )
    def test_fix_fallacies_validates(self, client, payload):
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "cost")
        response = client.post(f"/plans/{plan_id}/nodes/{nid}/fix-fallacies", json=payload)
        assert response.status_code == 400


class TestCascadeRoutes:
    def _planted(self, client):
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "aspect")
        b = _add(client, plan_id, a, "elaborated_by", "point")
        client.post(f"/plans/{plan_id}/generate")
        return plan_id, a, b

    def test_open_cascade(self, client):
        plan_id, a, b = self._planted(client)
        response = client.post(f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"})
        assert response.status_code == 201
        body = response.json()
        assert body["cascade_id"]
        assert body["steps"] == [
            {
                "index": 0,
                "node_id": b,
                "suggested_topics": ["first suggestion", "second suggestion"],
                "status": "pending",
            }
        ]
        plan = client.get(f"/plans/{plan_id}").json()
        aspect = plan["root"]["children"][0]
        assert aspect["prompt_text"] == "new goal"
        assert aspect["draft"]["stale"] is False  # regenerated on open
        assert aspect["children"][0]["draft"]["stale"] is True

    def test_step_with_topic(self, client):
        plan_id, a, b = self._planted(client)
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        body = client.post(f"/cascades/{cid}/steps/0", json={"topic": "picked topic"}).json()
        assert body["step"]["status"] == "applied"
        point = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]["children"][0]
        assert point["prompt_text"] == "picked topic"
        assert point["draft"]["stale"] is False

    def test_step_keep(self, client):
        plan_id, a, b = self._planted(client)
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        body = client.post(f"/cascades/{cid}/steps/0", json={"keep": True}).json()
        assert body["step"]["status"] == "applied"
        point = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]["children"][0]
        assert point["prompt_text"] == "point"

    def test_step_skip(self, client):
        plan_id, a, b = self._planted(client)
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        body = client.post(f"/cascades/{cid}/steps/0", json={"skip": True}).json()
        assert body["step"]["status"] == "skipped"
        point = client.get(f"/plans/{plan_id}").json()["root"]["children"][0]["children"][0]
        assert point["draft"]["stale"] is True

    def test_step_choice_must_be_exactly_one(self, client):
        plan_id, a, b = self._planted(client)
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        for payload in ({}, {"keep": True, "skip": True}, {"topic": "t", "keep": True}):
            assert client.post(f"/cascades/{cid}/steps/0", json=payload).status_code == 400

    def test_step_resolved_twice_conflicts(self, client):
        plan_id, a, b = self._planted(client)
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        client.post(f"/cascades/{cid}/steps/0", json={"keep": True})
        response = client.post(f"/cascades/{cid}/steps/0", json={"keep": True})
        assert response.status_code == 409
        assert response.json()["code"] == "step_not_pending"

    def test_unknown_cascade(self, client):
        response = client.post("/cascades/nope/steps/0", json={"keep": True})
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_cascade"

    def test_idle_cascades_expire(self, harness):
        now = [0.0]
        client, _, _ = harness(cascade_ttl=60.0, cascade_clock=lambda: now[0])
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "aspect")
        _add(client, plan_id, a, "elaborated_by", "point")
        cid = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "new goal"}
        ).json()["cascade_id"]
        now[0] = 59.0
        assert client.post(f"/cascades/{cid}/steps/0", json={"skip": True}).status_code == 200
        cid2 = client.post(
            f"/plans/{plan_id}/nodes/{a}/cascade", json={"text": "newer goal"}
        ).json()["cascade_id"]
        now[0] = 121.0
        response = client.post(f"/cascades/{cid2}/steps/0", json={"skip": True})
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_cascade"


class TestExports:
    def test_markdown(self, client):
        plan_id = _new_plan(client, "Thesis here")
        _add(client, plan_id, "n0", "featured_by", "one aspect")
        response = client.get(f"/plans/{plan_id}/export?format=markdown")
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/markdown")
        assert response.text == "- Thesis here\n  - [featured] one aspect\n"

    def test_text(self, client):
        plan_id = _new_plan(client, "Thesis here")
        response = client.get(f"/plans/{plan_id}/export?format=text")
        assert response.headers["content-type"].startswith("text/plain")
        assert response.text == "Thesis here\n"

    def test_default_is_markdown(self, client):
        plan_id = _new_plan(client, "Thesis here")
        assert client.get(f"/plans/{plan_id}/export").text.startswith("- Thesis here")

    def test_unknown_format(self, client):
        plan_id = _new_plan(client)
        assert client.get(f"/plans/{plan_id}/export?format=pdf").status_code == 400


class TestPersistenceOrdering:
    def test_mutation_is_on_disk_before_the_response(self, harness, tmp_path):
        client, _, _ = harness()
        plan_id = _new_plan(client, lazy=False)
        _add(client, plan_id, "n0", "featured_by", "durable")
        on_disk = persistence.load(tmp_path / "plans" / f"{plan_id}.plan.json")
        assert on_disk.node("n1").prompt_text == "durable"
        assert on_disk.node("n1").draft.text == "generated prose"


class TestConcurrency:
    def test_conflicting_patches_serialize(self, harness, tmp_path):
        client, _, app = harness()
        plan_id = _new_plan(client)
        nid = _add(client, plan_id, "n0", "featured_by", "start")

        barrier = threading.Barrier(8)
        results: list[int] = []

        def hammer(i: int) -> None:
            barrier.wait()
            r = client.patch(
                f"/plans/{plan_id}/nodes/{nid}", json={"text": f"text from {i}"}
            )
            results.append(r.status_code)

        threads = [threading.Thread(target=hammer, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert results == [200] * 8
        plan = app.state.store.get(plan_id)
        check_invariants(plan)
        assert plan.node(nid).prompt_text in {f"text from {i}" for i in range(8)}
        on_disk = persistence.load(tmp_path / "plans" / f"{plan_id}.plan.json")
        assert on_disk.node(nid).prompt_text == plan.node(nid).prompt_text

    def test_concurrent_adds_all_land(self, harness):
        client, _, app = harness()
        plan_id = _new_plan(client)
        barrier = threading.Barrier(6)
        statuses: list[int] = []

        def add(i: int) -> None:
            barrier.wait()
            r = client.post(
                f"/plans/{plan_id}/nodes",
                json={"parent_id": "n0", "edge": "featured_by", "text": f"aspect {i}"},
            )
            statuses.append(r.status_code)

        threads = [threading.Thread(target=add, args=(i,)) for i in range(6)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert statuses == [201] * 6
        plan = app.state.store.get(plan_id)
        check_invariants(plan)
        assert len(plan.root.children) == 6
        assert len({c.id for c in plan.root.children}) == 6

    def test_generation_survives_node_removal_mid_sweep(self, harness):
        provider = _provider()
        client, _, app = harness(provider=provider)
        plan_id = _new_plan(client)
        a = _add(client, plan_id, "n0", "featured_by", "keep me")
        b = _add(client, plan_id, "n0", "featured_by", "remove me")

        removed = []

        def sabotage(prompt):
            # while the sweep is off-lock, remove the second target
            if not removed and "remove me" in prompt.messages[-1].content:
                removed.append(True)
                store = app.state.store
                with store.lock(plan_id):
                    remove_subtree(store.get(plan_id), b)
                    store.save(store.get(plan_id))
            return "swept"

        provider.script["draft_key_aspect"] = sabotage
        body = client.post(f"/plans/{plan_id}/generate").json()
        assert body == {"node_ids": [a]}
        plan = app.state.store.get(plan_id)
        assert stale_ids(plan) == set()
        check_invariants(plan)


class TestUiMount:
    def test_static_mount_when_directory_exists(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<h1>planner</h1>", encoding="utf-8")
        app = service.create_app(tmp_path / "plans", _provider(), ui_dir=ui)
        client = TestClient(app)
        response = client.get("/ui/")
        assert response.status_code == 200
        assert "planner" in response.text

    def test_no_mount_without_directory(self, tmp_path):
        app = service.create_app(tmp_path / "plans", _provider(), ui_dir=tmp_path / "missing")
        assert TestClient(app).get("/ui/").status_code == 404


def test_error_body_shape_is_uniform(client):
    for response in (
        client.get("/plans/absent"),
        client.post("/plans", json={}),
        client.delete("/plans/zzz"),
    ):
        body = response.json()
        assert set(body) == {"code", "message"}
        assert isinstance(body["code"], str) and isinstance(body["message"], str)
