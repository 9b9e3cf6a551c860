"""Composes prompt subtasks into the automation buttons and applies the parsed
results to the object model.

Every component added here carries synthesized provenance. The orchestrator
only ever adds: overgenerated candidates are for the human to prune, so nothing
is mutated or deleted on its behalf. Each button returns a delta record listing
what was added, the prompt exchanges that produced it, and any diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from enum import Enum

from .llm import Backend, CompletionRequest, DEFAULT_MODEL_ID, LLMError
from .model import (
    ComponentPath,
    DuplicateName,
    ModelError,
    NotFound,
    ObjectModel,
    Phase,
    Provenance,
)
from .prompts import (
    Diagnostic,
    PromptContext,
    PromptExchange,
    SubtaskKind,
    dedupe_names,
    describe_app,
    parse_field_phrases,
    parse_method_names,
    parse_name_list,
    parse_type_answer,
    render_prompt,
)

# the type-prediction prompt offers these primitives (boolean stays out of the
# prompt vocabulary but remains a legal stored type)
PROMPT_PRIMITIVES = ("int", "float", "string", "datetime")

# how many fresh objects one full-phase auto-add click will flesh out
FULL_PHASE_OBJECT_CAP = 3


class ButtonAction(str, Enum):
    BEGIN = "begin"
    AUTO_ADD_OBJECT_INITIAL = "autoAddObjectInitial"
    GENERATE_FIELDS_AND_METHODS = "generateFieldsAndMethods"
    AUTO_ADD_OBJECT_FULL = "autoAddObjectFull"
    AUTO_ADD_FIELD = "autoAddField"
    AUTO_ADD_METHOD = "autoAddMethod"


class OrchestratorError(Exception):
    code = "orchestrator_error"


class PreconditionFailed(OrchestratorError):
    code = "precondition_failed"


@dataclass
class ActionDelta:
    """What one automation button did to the model."""

    action: ButtonAction
    additions: list[ComponentPath] = dc_field(default_factory=list)
    diagnostics: list[Diagnostic] = dc_field(default_factory=list)
    exchanges: list[PromptExchange] = dc_field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "action": self.action.value,
            "additions": [
                {"kind": p.kind, "object": p.object_name, "name": p.name}
                for p in self.additions
            ],
            "diagnostics": [{"code": d.code, "message": d.message} for d in self.diagnostics],
            "exchanges": [e.to_document() for e in self.exchanges],
        }


class Orchestrator:
    def __init__(self, backend: Backend, model_id: str = DEFAULT_MODEL_ID):
        self.backend = backend
        self.model_id = model_id

    # -- plumbing -------------------------------------------------------------

    def _call(self, kind: SubtaskKind, ctx: PromptContext) -> PromptExchange:
        rendered = render_prompt(kind, ctx)
        resp = self.backend.complete(CompletionRequest(prompt=rendered, modelId=self.model_id))
        return PromptExchange(kind=kind, rendered=rendered, completion=resp.text)

    def _type_vocabulary(self, model: ObjectModel) -> list[str]:
        return list(PROMPT_PRIMITIVES) + [o.name for o in model.active_objects()]

    # -- buttons ----------------------------------------------------------------

    def run_begin(self, model: ObjectModel) -> ActionDelta:
        """First click: draft an initial object-name list from the prompt, then
        ask once more and keep the union (overgeneration by design)."""
        if model.phase is not Phase.DRAFTING_NAMES:
            raise PreconditionFailed("begin is only valid while drafting names")
        if model.active_objects():
            raise PreconditionFailed("begin needs an empty model")
        delta = ActionDelta(ButtonAction.BEGIN)
        first = self._call(SubtaskKind.ST1_INITIAL, PromptContext(userPrompt=model.prompt))
        first.parsed = parse_name_list(first.completion)
        delta.exchanges.append(first)
        delta.diagnostics.extend(first.parsed.diagnostics)
        followup = self._call(
            SubtaskKind.ST1_FOLLOWUP,
            PromptContext(userPrompt=model.prompt, priorExchange=first),
        )
        followup.parsed = parse_name_list(followup.completion)
        delta.exchanges.append(followup)
        delta.diagnostics.extend(followup.parsed.diagnostics)
        candidates = list(first.parsed.value) + list(followup.parsed.value)
        for name in dedupe_names(candidates, existing=[]):
            self._add_object(model, name, delta)
        return delta

    def run_auto_add_object(self, model: ObjectModel) -> ActionDelta:
        """Ask for more table names. While drafting they come in empty; once the
        model is full each fresh object gets the whole field/method pipeline."""
        actives = model.active_objects()
        if not actives:
            raise PreconditionFailed("auto add object needs at least one existing object")
        full = model.phase is Phase.FULL_MODEL
        action = ButtonAction.AUTO_ADD_OBJECT_FULL if full else ButtonAction.AUTO_ADD_OBJECT_INITIAL
        delta = ActionDelta(action)
        existing = [o.name for o in actives]
        ex = self._call(
            SubtaskKind.ST2_MORE_OBJECTS,
            PromptContext(userPrompt=model.prompt, objectNames=existing),
        )
        ex.parsed = parse_name_list(ex.completion)
        delta.exchanges.append(ex)
        delta.diagnostics.extend(ex.parsed.diagnostics)
        fresh = dedupe_names(ex.parsed.value, existing)
        if ex.parsed.value and not fresh:
            delta.diagnostics.append(
                Diagnostic("all_duplicates", "every candidate object name already exists")
            )
        if full:
            fresh = fresh[:FULL_PHASE_OBJECT_CAP]
        added = [name for name in fresh if self._add_object(model, name, delta)]
        if full:
            for name in added:
                self._populate_object(model, name, delta)
        return delta

    def run_generate_fields_and_methods(self, model: ObjectModel) -> ActionDelta:
        """Flesh out every drafted object with fields, types, multiplicities,
        and methods; the model graduates to the full-editing phase."""
        if model.phase is not Phase.DRAFTING_NAMES:
            raise PreconditionFailed("fields and methods are generated from the drafting phase")
        targets = [o.name for o in model.active_objects()]
        if not targets:
            raise PreconditionFailed("no objects to generate fields for")
        delta = ActionDelta(ButtonAction.GENERATE_FIELDS_AND_METHODS)
        for name in targets:
            self._populate_object(model, name, delta)
        model.phase = Phase.FULL_MODEL
        return delta

    def run_auto_add_field(self, model: ObjectModel, object_name: str) -> ActionDelta:
        obj = model.find_object(object_name)
        if obj is None:
            raise NotFound(f"no active object named {object_name!r}")
        delta = ActionDelta(ButtonAction.AUTO_ADD_FIELD)
        ex = self._call(
            SubtaskKind.ST7_MORE_FIELDS,
            PromptContext(
                userPrompt=model.prompt,
                objectName=obj.name,
                appDescription=describe_app(model),
            ),
        )
        ex.parsed = parse_field_phrases(ex.completion)
        delta.exchanges.append(ex)
        delta.diagnostics.extend(ex.parsed.diagnostics)
        self._add_fields(model, obj.name, ex.parsed.value, delta)
        return delta

    def run_auto_add_method(self, model: ObjectModel, object_name: str) -> ActionDelta:
        obj = model.find_object(object_name)
        if obj is None:
            raise NotFound(f"no active object named {object_name!r}")
        delta = ActionDelta(ButtonAction.AUTO_ADD_METHOD)
        ex = self._call(
            SubtaskKind.ST8_MORE_METHODS,
            PromptContext(
                userPrompt=model.prompt,
                objectName=obj.name,
                methodNames=[m.name for m in obj.active_methods()],
            ),
        )
        ex.parsed = parse_method_names(ex.completion)
        delta.exchanges.append(ex)
        delta.diagnostics.extend(ex.parsed.diagnostics)
        self._add_methods(model, obj.name, ex.parsed.value, delta)
        return delta

    def run(self, model: ObjectModel, action: ButtonAction, object_name: str = "") -> ActionDelta:
        if action is ButtonAction.BEGIN:
            return self.run_begin(model)
        if action in (ButtonAction.AUTO_ADD_OBJECT_INITIAL, ButtonAction.AUTO_ADD_OBJECT_FULL):
            return self.run_auto_add_object(model)
        if action is ButtonAction.GENERATE_FIELDS_AND_METHODS:
            return self.run_generate_fields_and_methods(model)
        if action is ButtonAction.AUTO_ADD_FIELD:
            return self.run_auto_add_field(model, object_name)
        return self.run_auto_add_method(model, object_name)

    # -- shared steps ------------------------------------------------------------

    def _add_object(self, model: ObjectModel, name: str, delta: ActionDelta) -> bool:
        try:
            model.add_object(name, Provenance.SYNTHESIZED)
        except ModelError as e:
            delta.diagnostics.append(Diagnostic(e.code, f"skipped object {name!r}: {e}"))
            return False
        delta.additions.append(ComponentPath("object", name))
        return True

    def _populate_object(self, model: ObjectModel, object_name: str, delta: ActionDelta) -> None:
        """Field phrases, then a type per field, then methods, for one object.
        A failure here is recorded and skipped so sibling objects still run."""
        try:
            ex = self._call(
                SubtaskKind.ST3_FIELDS,
                PromptContext(userPrompt=model.prompt, objectName=object_name),
            )
            ex.parsed = parse_field_phrases(ex.completion)
            delta.exchanges.append(ex)
            delta.diagnostics.extend(ex.parsed.diagnostics)
            self._add_fields(model, object_name, ex.parsed.value, delta)
            self._generate_methods(model, object_name, delta)
        except (LLMError, ModelError, OrchestratorError) as e:
            delta.diagnostics.append(
                Diagnostic("subtask_failed", f"object {object_name!r}: {e}")
            )

    def _add_fields(self, model: ObjectModel, object_name: str, phrases, delta: ActionDelta) -> None:
        obj = model.find_object(object_name)
        if obj is None:
            raise NotFound(f"no active object named {object_name!r}")
        existing = [f.name for f in obj.active_fields()]
        keep = set(dedupe_names([p.name for p in phrases], existing))
        seen: set[str] = set()
        for phrase in phrases:
            if phrase.name not in keep or phrase.name in seen:
                continue
            seen.add(phrase.name)
            vocab = self._type_vocabulary(model)
            ex = self._call(
                SubtaskKind.ST4_TYPE,
                PromptContext(typeVocabulary=vocab, fieldName=phrase.name),
            )
            ex.parsed = parse_type_answer(ex.completion, vocab)
            delta.exchanges.append(ex)
            delta.diagnostics.extend(ex.parsed.diagnostics)
            try:
                model.add_field(
                    object_name,
                    phrase.name,
                    ex.parsed.value,
                    multiplicity=phrase.multiplicity,
                    provenance=Provenance.SYNTHESIZED,
                )
            except ModelError as e:
                delta.diagnostics.append(
                    Diagnostic(e.code, f"skipped field {phrase.name!r}: {e}")
                )
                continue
            delta.additions.append(ComponentPath("field", object_name, phrase.name))

    def _generate_methods(self, model: ObjectModel, object_name: str, delta: ActionDelta) -> None:
        ctx = PromptContext(userPrompt=model.prompt, objectName=object_name)
        first = self._call(SubtaskKind.ST6_METHODS, ctx)
        delta.exchanges.append(first)
        second = self._call(
            SubtaskKind.ST6_METHODS,
            PromptContext(userPrompt=model.prompt, objectName=object_name, priorExchange=first),
        )
        delta.exchanges.append(second)
        third = self._call(
            SubtaskKind.ST6_METHODS,
            PromptContext(userPrompt=model.prompt, objectName=object_name, priorExchange=second),
        )
        third.parsed = parse_method_names(third.completion)
        delta.exchanges.append(third)
        delta.diagnostics.extend(third.parsed.diagnostics)
        self._add_methods(model, object_name, third.parsed.value, delta)

    def _add_methods(self, model: ObjectModel, object_name: str, names, delta: ActionDelta) -> None:
        obj = model.find_object(object_name)
        if obj is None:
            raise NotFound(f"no active object named {object_name!r}")
        existing = {m.name for m in obj.active_methods()}
        for name in names:
            if name in existing:
                continue
            existing.add(name)
            try:
                model.add_method(object_name, name, Provenance.SYNTHESIZED)
            except ModelError as e:
                delta.diagnostics.append(Diagnostic(e.code, f"skipped method {name!r}: {e}"))
                continue
            delta.additions.append(ComponentPath("method", object_name, name))
