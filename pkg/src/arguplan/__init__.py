"""Argumentative essay planning engine.

Plans are typed argument trees (main argument, key aspects, discussion
points, counterarguments, supporting evidence) built up through LLM-backed
goal recommendation and argumentative sparks, with rapid draft prototyping
per node and lazy or eager regeneration when the plan changes.
"""

from .errors import ArguplanError, ParseFailure, PlanError, ProviderError
from .plan import (
    ArgumentPlan,
    EdgeKind,
    NodeKind,
    PlanNode,
    document_order,
    kind_for_edge,
    new_plan,
)
from .prompting import PromptTask, render
from .providers import HttpProvider, ProviderConfig, ReplayProvider
from .session import PlanSession

__version__ = "0.1.0"

__all__ = [
    "ArgumentPlan",
    "ArguplanError",
    "EdgeKind",
    "HttpProvider",
    "NodeKind",
    "ParseFailure",
    "PlanError",
    "PlanNode",
    "PlanSession",
    "PromptTask",
    "ProviderConfig",
    "ProviderError",
    "ReplayProvider",
    "document_order",
    "kind_for_edge",
    "new_plan",
    "render",
]
