"""Few-shot prompt rendering and completion parsing for the synthesis subtasks.

Templates live in catalog/ as plain text resources, one per subtask kind,
with a manifest naming each kind's required context fields. Rendering is a
pure function of (kind, context): identical inputs give byte-identical text.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Any, Optional

from .parsing import (
    Diagnostic,
    indefinite_article,
    FieldPhrase,
    ParseResult,
    dedupe_names,
    describe_app,
    describe_object,
    infer_multiplicity,
    methods_sentence,
    normalize_name,
    parse_field_phrases,
    parse_method_names,
    parse_name_list,
    parse_type_answer,
    pluralize,
    singularize,
    split_enumeration,
    tables_sentence,
)

__all__ = [
    "SubtaskKind",
    "PromptContext",
    "PromptExchange",
    "MissingContext",
    "render_prompt",
    "catalog_version",
    "Diagnostic",
    "FieldPhrase",
    "ParseResult",
    "dedupe_names",
    "describe_app",
    "describe_object",
    "infer_multiplicity",
    "methods_sentence",
    "normalize_name",
    "parse_field_phrases",
    "parse_method_names",
    "parse_name_list",
    "parse_type_answer",
    "pluralize",
    "singularize",
    "split_enumeration",
    "tables_sentence",
]


class SubtaskKind(str, Enum):
    """The prompt-backed synthesis subtasks. Multiplicity inference is a local
    heuristic over field phrases and has no prompt of its own."""

    ST1_INITIAL = "st1_initial"
    ST1_FOLLOWUP = "st1_followup"
    ST2_MORE_OBJECTS = "st2_more_objects"
    ST3_FIELDS = "st3_fields"
    ST4_TYPE = "st4_type"
    ST6_METHODS = "st6_methods"
    ST7_MORE_FIELDS = "st7_more_fields"
    ST8_MORE_METHODS = "st8_more_methods"


class MissingContext(Exception):
    """A required context field for the selected subtask kind is absent."""

    def __init__(self, field_name: str):
        self.field_name = field_name
        super().__init__(f"prompt context is missing {field_name!r}")


@dataclass
class PromptExchange:
    """One rendered prompt and the completion it produced."""

    kind: SubtaskKind
    rendered: str
    completion: str
    parsed: Any = None
    timestamp: float = dc_field(default_factory=time.time)

    def to_document(self) -> dict:
        return {
            "kind": self.kind.value,
            "rendered": self.rendered,
            "completion": self.completion,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "PromptExchange":
        return cls(
            kind=SubtaskKind(doc["kind"]),
            rendered=doc["rendered"],
            completion=doc["completion"],
        )


@dataclass
class PromptContext:
    userPrompt: str = ""
    objectNames: Optional[list[str]] = None
    objectName: Optional[str] = None
    fieldName: Optional[str] = None
    fieldPhrases: Optional[list[FieldPhrase]] = None
    methodNames: Optional[list[str]] = None
    typeVocabulary: Optional[list[str]] = None
    appDescription: Optional[str] = None
    priorExchange: Optional[PromptExchange] = None


_SECTION = re.compile(r"^<<([a-z -]+)>>$", re.MULTILINE)
_SLOT = re.compile(r"\{\{(\w+)\}\}")


@dataclass
class _Template:
    primers: list[tuple[str, bool]]  # (text, skip_when_user_prompt_matches)
    body: str
    requires: list[str]


def _parse_template(text: str, requires: list[str]) -> _Template:
    primers: list[tuple[str, bool]] = []
    body = ""
    sections: list[tuple[str, str]] = []
    matches = list(_SECTION.finditer(text))
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        sections.append((m.group(1), text[m.end():end].strip("\n")))
    for tag, content in sections:
        if tag == "body":
            body = content
        elif tag.startswith("primer"):
            primers.append((content, "skip-if-user-prompt" in tag))
        else:
            raise ValueError(f"unknown catalog section {tag!r}")
    return _Template(primers=primers, body=body, requires=requires)


@lru_cache(maxsize=1)
def _catalog() -> tuple[dict[SubtaskKind, _Template], list[str], int]:
    root = resources.files(__package__) / "catalog"
    manifest = json.loads((root / "manifest.json").read_text(encoding="utf-8"))
    templates: dict[SubtaskKind, _Template] = {}
    for key, entry in manifest["kinds"].items():
        kind = SubtaskKind(key)
        text = (root / entry["file"]).read_text(encoding="utf-8")
        templates[kind] = _parse_template(text, list(entry.get("requires", [])))
    return templates, list(manifest["st6_turn_questions"]), int(manifest["version"])


def catalog_version() -> int:
    return _catalog()[2]


def _slot_values(ctx: PromptContext) -> dict[str, Optional[str]]:
    app_desc = ctx.appDescription
    if app_desc is None and ctx.objectNames is not None:
        app_desc = tables_sentence(ctx.objectNames)
    return {
        "userPrompt": ctx.userPrompt.strip() or None,
        "objectName": ctx.objectName,
        "objectArticle": indefinite_article(ctx.objectName) if ctx.objectName else None,
        "appDescription": app_desc,
        "typeVocabulary": ", ".join(ctx.typeVocabulary) if ctx.typeVocabulary else None,
        "fieldName": ctx.fieldName,
        "methodList": (
            ", ".join(f"{m}()" for m in ctx.methodNames)
            if ctx.methodNames is not None
            else None
        ),
    }


def _substitute(text: str, values: dict[str, Optional[str]]) -> str:
    def repl(m: re.Match) -> str:
        slot = m.group(1)
        value = values.get(slot)
        if value is None:
            raise MissingContext(slot)
        return value

    return _SLOT.sub(repl, text)


def _check_requires(template: _Template, ctx: PromptContext, values: dict) -> None:
    for req in template.requires:
        if req == "priorExchange":
            if ctx.priorExchange is None:
                raise MissingContext("priorExchange")
        elif req == "methodNames":
            if ctx.methodNames is None:
                raise MissingContext("methodNames")
        elif values.get(req) is None:
            raise MissingContext(req)


def _ensure_answer_prefix(completion: str) -> str:
    text = completion.strip()
    if text[:2].upper() != "A:":
        text = "A: " + text
    return text


def _first_paragraph(text: str) -> str:
    return text.split("\n\n", 1)[0].strip()


def render_prompt(kind: SubtaskKind, ctx: PromptContext) -> str:
    """Render the few-shot prompt for one subtask call.

    Multi-turn kinds extend the prior transcript: the follow-up table question
    appends to the first table exchange, and each method-synthesis turn appends
    the previous answer plus the next scripted question.
    """
    templates, turn_questions, _ = _catalog()
    template = templates[kind]
    values = _slot_values(ctx)

    if kind is SubtaskKind.ST1_FOLLOWUP:
        if ctx.priorExchange is None:
            raise MissingContext("priorExchange")
        prior = ctx.priorExchange
        return (
            prior.rendered
            + "\n"
            + _ensure_answer_prefix(prior.completion)
            + "\n\n"
            + template.body
        )

    if kind is SubtaskKind.ST6_METHODS and ctx.priorExchange is not None:
        prior = ctx.priorExchange
        q_else = _substitute(turn_questions[0], values)
        next_q = turn_questions[1] if q_else in prior.rendered else q_else
        return prior.rendered + "\n" + _ensure_answer_prefix(prior.completion) + "\n" + next_q

    _check_requires(template, ctx, values)
    sections: list[str] = []
    user_prompt = ctx.userPrompt.strip()
    for primer, skippable in template.primers:
        if skippable and _first_paragraph(primer) == user_prompt:
            continue
        sections.append(primer)
    sections.append(_substitute(template.body, values))
    return "\n\n".join(sections)
