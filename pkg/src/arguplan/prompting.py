"""Prompt template loading and rendering.

Each chat task the engine can issue has one template file under
``templates/``. A file starts with a front-matter line::

    #% temperature=0.7 blocks=role,example,input

where ``blocks`` declares the block sequence that must follow. Blocks are
introduced by marker lines (``--- role ---``, ``--- example ---``,
``--- input ---``):

* ``role``: the system message, verbatim.
* ``example``: one few-shot exchange; ``slot: value`` lines give the slot
  bindings for the user turn, then a ``>>>`` line, then the verbatim
  assistant reply.
* ``input``: the user message with ``{{slot}}`` placeholders.

Rendering is a pure function of (task, slots, temperature): the same inputs
always produce the same message list, byte for byte. Few-shot examples are
emitted as alternating user/assistant turns after the system message, so a
chat-completion backend sees the demonstrations as prior conversation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .errors import MissingSlot


class PromptTask(Enum):
    """Every distinct prompt the engine can send, one template file each."""

    KEY_ASPECTS = "key_aspects"
    DISCUSSION_POINTS = "discussion_points"
    COUNTERARGUMENTS = "counterarguments"
    LOGICAL_FALLACIES = "logical_fallacies"
    SUPPORTING_EVIDENCE = "supporting_evidence"
    DRAFT_KEY_ASPECT = "draft_key_aspect"
    DRAFT_DISCUSSION_POINT = "draft_discussion_point"
    DRAFT_COUNTERARGUMENT = "draft_counterargument"
    DRAFT_SUPPORTING_EVIDENCE = "draft_supporting_evidence"
    FIX_FALLACIES = "fix_fallacies"
    ALTERNATIVES = "alternatives"
    REFINE_WITH_INSTRUCTION = "refine_with_instruction"
    CASCADE_TOPIC_SUGGESTIONS = "cascade_topic_suggestions"


@dataclass(frozen=True)
class Message:
    role: str  # system | user | assistant
    content: str


@dataclass(frozen=True)
class RenderedPrompt:
    task: PromptTask
    messages: tuple[Message, ...]
    temperature: float


@dataclass
class TemplateExample:
    """One few-shot demonstration: slot bindings plus the expected reply."""

    slots: dict[str, str]
    output: str


@dataclass
class Template:
    task: PromptTask
    role: str
    input_template: str
    temperature: float
    examples: list[TemplateExample] = field(default_factory=list)


_MARKER = re.compile(r"^--- (role|example|input) ---$")
_PLACEHOLDER = re.compile(r"\{\{(\w+)\}\}")

_cache: dict[PromptTask, Template] = {}


def load_template(task: PromptTask) -> Template:
    """Load (and cache) the template file for a task."""
    cached = _cache.get(task)
    if cached is not None:
        return cached
    path = resources.files(__package__).joinpath("templates", f"{task.value}.prompt")
    template = _parse_template(task, path.read_text(encoding="utf-8"))
    _cache[task] = template
    return template


def _parse_template(task: PromptTask, text: str) -> Template:
    lines = text.split("\n")
    header = lines[0]
    if not header.startswith("#%"):
        raise ValueError(f"{task.value}: missing front-matter line")
    fields: dict[str, str] = {}
    for token in header[2:].split():
        key, _, value = token.partition("=")
        fields[key] = value
    declared = fields["blocks"].split(",")
    temperature = float(fields["temperature"])

    # Slice the body into (block name, lines) runs at the marker lines.
    blocks: list[tuple[str, list[str]]] = []
    for line in lines[1:]:
        marker = _MARKER.match(line)
        if marker:
            blocks.append((marker.group(1), []))
        elif blocks:
            blocks[-1][1].append(line)
        elif line.strip():
            raise ValueError(f"{task.value}: content before first block marker")

    if [name for name, _ in blocks] != declared:
        raise ValueError(
            f"{task.value}: front-matter declares blocks {declared}, "
            f"file has {[name for name, _ in blocks]}"
        )

    role: str | None = None
    input_template: str | None = None
    examples: list[TemplateExample] = []
    for name, body in blocks:
        content = "\n".join(body).rstrip("\n")
        if name == "role":
            role = content
        elif name == "input":
            input_template = content
        else:
            examples.append(_parse_example(task, content))
    if role is None or input_template is None:
        raise ValueError(f"{task.value}: role and input blocks are required")
    return Template(
        task=task,
        role=role,
        input_template=input_template,
        temperature=temperature,
        examples=examples,
    )


def _parse_example(task: PromptTask, content: str) -> TemplateExample:
    slot_part, sep, output = content.partition("\n>>>\n")
    if not sep:
        raise ValueError(f"{task.value}: example block lacks a >>> separator")
    slots: dict[str, str] = {}
    for line in slot_part.split("\n"):
        if not line.strip():
            continue
        name, colon, value = line.partition(": ")
        if not colon:
            raise ValueError(f"{task.value}: malformed example slot line {line!r}")
        slots[name] = value
    return TemplateExample(slots=slots, output=output)


def _substitute(task: PromptTask, template: str, slots: dict[str, str]) -> str:
    def replace(match: re.Match[str]) -> str:
        name = match.group(1)
        value = slots.get(name)
        if value is None or not value.strip():
            raise MissingSlot(task.value, name)
        return value

    return _PLACEHOLDER.sub(replace, template)


def render(
    task: PromptTask,
    slots: dict[str, str],
    *,
    temperature: float | None = None,
) -> RenderedPrompt:
    """Instantiate a task's template with slot values.

    Returns the full message list: system role, few-shot exchanges where the
    template ships them, and the final user message with every ``{{slot}}``
    replaced. Raises MissingSlot when a referenced slot is absent or blank.
    """
    template = load_template(task)
    messages: list[Message] = [Message("system", template.role)]
    for example in template.examples:
        messages.append(Message("user", _substitute(task, template.input_template, example.slots)))
        messages.append(Message("assistant", example.output))
    messages.append(Message("user", _substitute(task, template.input_template, slots)))
    return RenderedPrompt(
        task=task,
        messages=tuple(messages),
        temperature=temperature if temperature is not None else template.temperature,
    )


def system_role(task: PromptTask) -> str:
    """The system message text for a task, without rendering the rest."""
    return load_template(task).role
