from __future__ import annotations

import pytest

from arguplan import clock
from arguplan.plan import EdgeKind, add_child, new_plan
from arguplan.prompting import RenderedPrompt

FROZEN_NOW = "2026-03-01T10:00:00Z"


@pytest.fixture
def frozen_clock():
    clock.set_fixed_now(FROZEN_NOW)
    yield FROZEN_NOW
    clock.set_fixed_now(None)


@pytest.fixture
def small_plan():
    """root -> aspect(n1) -> point(n2), plus a second aspect n3."""
    plan = new_plan("City centers should be car-free", plan_id="small", now="2026-01-01T00:00:00Z")
    n1 = add_child(plan, "n0", EdgeKind.FEATURED_BY, "air quality")
    add_child(plan, n1, EdgeKind.ELABORATED_BY, "fewer respiratory illnesses")
    add_child(plan, "n0", EdgeKind.FEATURED_BY, "street life")
    return plan


class ScriptedProvider:
    """Answers by task name, recording every prompt it sees.

    Values in the script may be strings or callables taking the prompt.
    A list value is consumed one element per call.
    """

    def __init__(self, script=None, default="1. alpha\n2. beta"):
        self.script = dict(script or {})
        self.default = default
        self.calls: list[RenderedPrompt] = []

    def complete(self, prompt: RenderedPrompt) -> str:
        self.calls.append(prompt)
        value = self.script.get(prompt.task.value, self.default)
        if isinstance(value, list):
            value = value.pop(0)
        if callable(value):
            value = value(prompt)
        return value

    def tasks_seen(self) -> list[str]:
        return [p.task.value for p in self.calls]


@pytest.fixture
def scripted():
    return ScriptedProvider


class ExplodingProvider:
    """Raises the given error, optionally only after N good answers."""

    def __init__(self, error, good_answers=0, text="fine"):
        self.error = error
        self.remaining = good_answers
        self.text = text
        self.calls = 0

    def complete(self, prompt):
        self.calls += 1
        if self.remaining > 0:
            self.remaining -= 1
            return self.text
        raise self.error


@pytest.fixture
def exploding():
    return ExplodingProvider
