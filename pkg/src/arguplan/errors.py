"""Exception hierarchy for the planning engine.

Every error carries a stable ``code`` (snake_case) used by the HTTP layer
and the CLI to map failures onto status codes / exit codes without string
matching on messages.
"""

from __future__ import annotations


class ArguplanError(Exception):
    """Base class for all engine errors."""

    code = "error"


class PlanError(ArguplanError):
    """Structural or validation failure inside a plan."""

    code = "plan"


class EmptyArgument(PlanError):
    code = "empty_argument"


class UnknownNode(PlanError):
    code = "unknown_node"

    def __init__(self, node_id: str):
        super().__init__(f"no node with id {node_id!r}")
        self.node_id = node_id


class RootEdgeForbidden(PlanError):
    code = "root_edge_forbidden"


class RootRemovalForbidden(PlanError):
    code = "root_removal_forbidden"


class RootDraftForbidden(PlanError):
    code = "root_draft_forbidden"


class CycleForbidden(PlanError):
    code = "cycle_forbidden"


class IndexOutOfRange(PlanError):
    code = "index_out_of_range"


class InvalidArgument(PlanError):
    code = "invalid_argument"


class NoDraft(PlanError):
    code = "no_draft"

    def __init__(self, node_id: str):
        super().__init__(f"node {node_id!r} has no draft")
        self.node_id = node_id


class StepNotPending(PlanError):
    code = "step_not_pending"


class SchemaError(PlanError):
    code = "schema"

    def __init__(self, version, message: str | None = None):
        super().__init__(message or f"unsupported plan file version {version}")
        self.version = version


class UnknownPlan(PlanError):
    code = "unknown_plan"

    def __init__(self, plan_id: str):
        super().__init__(f"no plan with id {plan_id!r}")
        self.plan_id = plan_id


class UnknownCascade(PlanError):
    code = "unknown_cascade"

    def __init__(self, cascade_id: str):
        super().__init__(f"no active cascade {cascade_id!r} (it may have expired)")
        self.cascade_id = cascade_id


class NodeVanished(PlanError):
    """The target node was deleted while a completion was in flight."""

    code = "node_vanished"

    def __init__(self, node_id: str):
        super().__init__(f"node {node_id!r} was removed while the request was running")
        self.node_id = node_id


class MissingSlot(ArguplanError):
    """A prompt template referenced a slot that was absent or blank."""

    code = "missing_slot"

    def __init__(self, task: str, slot: str):
        super().__init__(f"task {task} requires slot {slot!r}")
        self.task = task
        self.slot = slot


class ParseFailure(ArguplanError):
    """A model response could not be parsed into the expected structure."""

    code = "parse_failure"


class ProviderError(ArguplanError):
    """Base class for completion-backend failures."""

    code = "provider"


class ProviderTimeout(ProviderError):
    code = "provider"


class ProviderHttpError(ProviderError):
    code = "provider"

    def __init__(self, status: int, message: str = ""):
        super().__init__(message or f"provider returned HTTP {status}")
        self.status = status


class ReplayMiss(ProviderError):
    code = "provider"

    def __init__(self, fingerprint: str):
        super().__init__(f"no recorded response for fingerprint {fingerprint}")
        self.fingerprint = fingerprint


class DuplicateFingerprint(ProviderError):
    code = "provider"

    def __init__(self, fingerprint: str):
        super().__init__(
            f"fingerprint {fingerprint} already recorded (pass overwrite=True to replace)"
        )
        self.fingerprint = fingerprint


class GenerationInterrupted(ProviderError):
    """Bulk draft generation stopped mid-way; carries progress so far."""

    code = "provider"

    def __init__(self, failed_node_id: str, processed: list[str], cause: Exception):
        super().__init__(f"draft generation failed at node {failed_node_id!r}: {cause}")
        self.failed_node_id = failed_node_id
        self.processed = processed
        self.__cause__ = cause
