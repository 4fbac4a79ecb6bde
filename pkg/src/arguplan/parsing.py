"""Parsers for model replies.

Every list-producing prompt asks for a numbered list, so these parsers
accept the common bullet shapes models actually emit ("1.", "2)", "-", "•")
and ignore everything else: preambles, closing remarks, and blank lines.
The only error they raise on arbitrary text is ParseFailure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseFailure

EVIDENCE_STRATEGIES = ("ethos", "pathos", "logos", "example")


@dataclass(frozen=True)
class FallacySuggestion:
    """A named logical weakness and how it applies to the selected text."""

    name: str
    explanation: str


@dataclass(frozen=True)
class EvidenceSuggestion:
    """A suggested evidence move, tagged with its rhetorical strategy."""

    strategy: str  # one of EVIDENCE_STRATEGIES
    description: str

    def __post_init__(self) -> None:
        if self.strategy not in EVIDENCE_STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")


_ITEM = re.compile(r"^\s*(?:\d+[.)]|[-•])\s*(\S.*?)\s*$")
_EMPHASIS_PAIRS = ("**", "__", "*", "_", "`")
_STRATEGY_TAG = re.compile(r"\s*\((ethos|pathos|logos|example)\)", re.IGNORECASE)


def _strip_emphasis(text: str) -> str:
    changed = True
    while changed:
        changed = False
        for mark in _EMPHASIS_PAIRS:
            if text.startswith(mark) and text.endswith(mark) and len(text) > 2 * len(mark):
                text = text[len(mark) : -len(mark)].strip()
                changed = True
    return text


def parse_numbered_list(raw: str) -> list[str]:
    """Extract list items from a model reply, in order.

    Lines that do not look like list items are dropped, so a chatty reply
    ("Sure! Here are some aspects: ...") still parses. Raises ParseFailure
    when no item is found.
    """
    items: list[str] = []
    for line in raw.split("\n"):
        match = _ITEM.match(line)
        if match:
            items.append(_strip_emphasis(match.group(1)))
    if not items:
        raise ParseFailure(f"no list items in reply: {raw[:80]!r}")
    return items


def format_as_numbered(items: list[str]) -> str:
    """Inverse of parse_numbered_list for newline-free items."""
    return "\n".join(f"{i}. {item}" for i, item in enumerate(items, start=1))


def parse_fallacies(raw: str) -> list[FallacySuggestion]:
    """Parse "Name: explanation" items; items without both parts are dropped.

    The explanation carries the actual critique, so an item that is only a
    label is useless and gets rejected rather than padded.
    """
    suggestions: list[FallacySuggestion] = []
    for item in parse_numbered_list(raw):
        name, colon, explanation = item.partition(":")
        name = _strip_emphasis(name.strip())
        explanation = explanation.strip()
        if not colon or not name or not explanation:
            continue
        suggestions.append(FallacySuggestion(name=name, explanation=explanation))
    if not suggestions:
        raise ParseFailure(f"no name: explanation items in reply: {raw[:80]!r}")
    return suggestions


def parse_evidence(raw: str) -> list[EvidenceSuggestion]:
    """Parse evidence items, reading the "(logos)"-style strategy tag.

    The first recognized parenthesized tag names the strategy and is removed
    from the description; untagged items default to "example".
    """
    suggestions: list[EvidenceSuggestion] = []
    for item in parse_numbered_list(raw):
        match = _STRATEGY_TAG.search(item)
        if match:
            strategy = match.group(1).lower()
            description = (item[: match.start()] + item[match.end() :]).strip()
        else:
            strategy = "example"
            description = item
        suggestions.append(EvidenceSuggestion(strategy=strategy, description=description))
    return suggestions
