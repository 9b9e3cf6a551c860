"""Object model data structure and the editing operations offered by the workbench.

An object model is a set of objects, each with named typed fields and named
methods. Everything the user deletes is kept around (soft delete) so it can be
restored later; validation flags the inconsistencies that soft deletion can
introduce instead of refusing the edit.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from enum import Enum
from typing import Any, Iterator, Optional

PRIMITIVES = ("int", "float", "string", "boolean", "datetime")

_WS = re.compile(r"\s+")


class Phase(str, Enum):
    DRAFTING_NAMES = "drafting_names"
    FULL_MODEL = "full_model"
    FINISHED = "finished"


class Provenance(str, Enum):
    SYNTHESIZED = "synthesized"
    USER_ADDED = "user_added"


class Multiplicity(str, Enum):
    ONE = "one"
    MANY = "many"

    def flipped(self) -> "Multiplicity":
        return Multiplicity.MANY if self is Multiplicity.ONE else Multiplicity.ONE


class ModelError(Exception):
    """Base class for object-model editing errors."""

    code = "model_error"


class DuplicateName(ModelError):
    code = "duplicate_name"


class NotFound(ModelError):
    code = "not_found"


class NameCollision(ModelError):
    code = "name_collision"


class UnknownTypeTarget(ModelError):
    code = "unknown_type_target"


class InvalidType(ModelError):
    code = "invalid_type"


class NotObjectTyped(ModelError):
    code = "not_object_typed"


class TargetDeleted(ModelError):
    code = "target_deleted"


class PhaseError(ModelError):
    code = "phase_error"


class DecodeError(ModelError):
    """Raised when a model document cannot be decoded; message carries the position."""

    code = "decode_error"


class ExportBlocked(ModelError):
    """Raised when exporting a model that still has dangling object references."""

    code = "export_blocked"

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        paths = ", ".join(v.path for v in violations)
        super().__init__(f"model has dangling references: {paths}")


def canonical_name(raw: str) -> str:
    """Canonical form for object and field names: lowercase, trimmed, single spaces."""
    return _WS.sub(" ", raw.strip()).lower()


def canonical_method_name(raw: str) -> str:
    """Method names keep their case; a trailing call-parenthesis pair is stripped."""
    name = raw.strip()
    if name.endswith("()"):
        name = name[:-2].rstrip()
    return name


@dataclass
class FieldType:
    """Either a primitive or a reference to another object in the model."""

    kind: str  # "primitive" | "object"
    primitive: Optional[str] = None
    target: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind == "primitive":
            if self.primitive is None or self.target is not None:
                raise InvalidType("primitive type must set exactly the primitive name")
            if self.primitive not in PRIMITIVES:
                raise InvalidType(f"unknown primitive {self.primitive!r}")
        elif self.kind == "object":
            if self.target is None or self.primitive is not None:
                raise InvalidType("object type must set exactly the target name")
        else:
            raise InvalidType(f"unknown type kind {self.kind!r}")

    @classmethod
    def prim(cls, name: str) -> "FieldType":
        return cls(kind="primitive", primitive=name)

    @classmethod
    def ref(cls, target: str) -> "FieldType":
        return cls(kind="object", target=canonical_name(target))

    @property
    def is_ref(self) -> bool:
        return self.kind == "object"

    def display(self) -> str:
        return self.primitive if self.kind == "primitive" else str(self.target)


@dataclass
class Field:
    name: str
    ftype: FieldType
    multiplicity: Multiplicity = Multiplicity.ONE
    deleted: bool = False
    provenance: Provenance = Provenance.USER_ADDED
    # (object name, field name) of the forward field, set only on fields the
    # two-way toggle created; lets the toggle remove its own work and nothing else
    reverse_of: Optional[tuple[str, str]] = None


@dataclass
class Method:
    name: str
    deleted: bool = False
    provenance: Provenance = Provenance.USER_ADDED


@dataclass
class ObjectDef:
    name: str
    fields: list[Field] = dc_field(default_factory=list)
    methods: list[Method] = dc_field(default_factory=list)
    deleted: bool = False
    provenance: Provenance = Provenance.USER_ADDED

    def active_fields(self) -> list[Field]:
        return [f for f in self.fields if not f.deleted]

    def active_methods(self) -> list[Method]:
        return [m for m in self.methods if not m.deleted]

    def find_field(self, name: str, deleted: bool = False) -> Optional[Field]:
        want = canonical_name(name)
        matches = [f for f in self.fields if f.name == want and f.deleted == deleted]
        return matches[-1] if matches else None

    def find_method(self, name: str, deleted: bool = False) -> Optional[Method]:
        want = canonical_method_name(name)
        matches = [m for m in self.methods if m.name == want and m.deleted == deleted]
        return matches[-1] if matches else None


@dataclass
class ComponentPath:
    """Addresses one object, field, or method in a model."""

    kind: str  # "object" | "field" | "method"
    object_name: str
    name: Optional[str] = None  # field or method name; None for objects

    def __post_init__(self) -> None:
        if self.kind not in ("object", "field", "method"):
            raise NotFound(f"unknown component kind {self.kind!r}")
        if self.kind != "object" and self.name is None:
            raise NotFound(f"{self.kind} path needs a name")


@dataclass
class Violation:
    """One invariant violation reported by validate()."""

    code: str
    path: str
    message: str


@dataclass
class ObjectModel:
    """The full mutable design artifact: prompt, objects, and their parts."""

    prompt: str = ""
    objects: list[ObjectDef] = dc_field(default_factory=list)
    phase: Phase = Phase.DRAFTING_NAMES

    # -- lookups ------------------------------------------------------------

    def active_objects(self) -> list[ObjectDef]:
        return [o for o in self.objects if not o.deleted]

    def find_object(self, name: str, deleted: bool = False) -> Optional[ObjectDef]:
        want = canonical_name(name)
        matches = [o for o in self.objects if o.name == want and o.deleted == deleted]
        return matches[-1] if matches else None

    def _require_active_object(self, name: str) -> ObjectDef:
        obj = self.find_object(name)
        if obj is None:
            raise NotFound(f"no active object named {canonical_name(name)!r}")
        return obj

    def _require_mutable(self) -> None:
        if self.phase is Phase.FINISHED:
            raise PhaseError("model is finished; no further edits")

    # -- editing operations --------------------------------------------------

    def add_object(self, name: str, provenance: Provenance = Provenance.USER_ADDED) -> ObjectDef:
        self._require_mutable()
        cname = canonical_name(name)
        if not cname:
            raise NotFound("object name is empty")
        if self.find_object(cname) is not None:
            raise DuplicateName(f"an active object named {cname!r} already exists")
        obj = ObjectDef(name=cname, provenance=provenance)
        self.objects.append(obj)
        return obj

    def rename_object(self, name: str, new_name: str) -> None:
        """Rename an object and propagate: field types keep pointing at it, and a
        field whose own name equals the old object name follows the rename too."""
        self._require_mutable()
        obj = self._require_active_object(name)
        old = obj.name
        new = canonical_name(new_name)
        if not new:
            raise NotFound("new object name is empty")
        if new == old:
            return
        other = self.find_object(new)
        if other is not None and other is not obj:
            raise DuplicateName(f"an active object named {new!r} already exists")
        obj.name = new
        renamed_fields: list[tuple[str, str]] = []  # (owner, old field name)
        for owner in self.objects:
            for f in owner.fields:
                if f.ftype.is_ref and f.ftype.target == old:
                    f.ftype.target = new
                if f.name == old:
                    # keep user-chosen names; only an exact name match follows,
                    # and never into a collision with an existing active field
                    collides = any(
                        g is not f and not g.deleted and g.name == new for g in owner.fields
                    )
                    if not (collides and not f.deleted):
                        f.name = new
                        renamed_fields.append((owner.name, old))
        for owner in self.objects:
            for f in owner.fields:
                if f.reverse_of is None:
                    continue
                r_obj, r_field = f.reverse_of
                if r_obj == old:
                    r_obj = new
                if (r_obj, r_field) in renamed_fields:
                    r_field = new
                f.reverse_of = (r_obj, r_field)

    def add_field(
        self,
        object_name: str,
        name: str,
        ftype: FieldType,
        multiplicity: Multiplicity = Multiplicity.ONE,
        provenance: Provenance = Provenance.USER_ADDED,
        reverse_of: Optional[tuple[str, str]] = None,
    ) -> Field:
        self._require_mutable()
        obj = self._require_active_object(object_name)
        cname = canonical_name(name)
        if not cname:
            raise NotFound("field name is empty")
        if obj.find_field(cname) is not None:
            raise DuplicateName(f"object {obj.name!r} already has an active field {cname!r}")
        if ftype.is_ref and not any(o.name == ftype.target for o in self.objects):
            raise UnknownTypeTarget(f"no object named {ftype.target!r} in the model")
        f = Field(
            name=cname,
            ftype=ftype,
            multiplicity=multiplicity,
            provenance=provenance,
            reverse_of=reverse_of,
        )
        obj.fields.append(f)
        return f

    def edit_field(
        self,
        object_name: str,
        field_name: str,
        new_name: Optional[str] = None,
        ftype: Optional[FieldType] = None,
        multiplicity: Optional[Multiplicity] = None,
    ) -> Field:
        self._require_mutable()
        obj = self._require_active_object(object_name)
        f = obj.find_field(field_name)
        if f is None:
            raise NotFound(f"no active field {field_name!r} on {obj.name!r}")
        if new_name is not None:
            cname = canonical_name(new_name)
            if not cname:
                raise NotFound("field name is empty")
            existing = obj.find_field(cname)
            if existing is not None and existing is not f:
                raise DuplicateName(f"object {obj.name!r} already has an active field {cname!r}")
            f.name = cname
        if ftype is not None:
            if ftype.is_ref and not any(o.name == ftype.target for o in self.objects):
                raise UnknownTypeTarget(f"no object named {ftype.target!r} in the model")
            f.ftype = ftype
        if multiplicity is not None:
            f.multiplicity = multiplicity
        return f

    def add_method(
        self, object_name: str, name: str, provenance: Provenance = Provenance.USER_ADDED
    ) -> Method:
        self._require_mutable()
        obj = self._require_active_object(object_name)
        cname = canonical_method_name(name)
        if not cname:
            raise NotFound("method name is empty")
        if obj.find_method(cname) is not None:
            raise DuplicateName(f"object {obj.name!r} already has an active method {cname!r}")
        m = Method(name=cname, provenance=provenance)
        obj.methods.append(m)
        return m

    def toggle_multiplicity(self, object_name: str, field_name: str) -> Field:
        self._require_mutable()
        obj = self._require_active_object(object_name)
        f = obj.find_field(field_name)
        if f is None:
            raise NotFound(f"no active field {field_name!r} on {obj.name!r}")
        f.multiplicity = f.multiplicity.flipped()
        return f

    def toggle_two_way(self, object_name: str, field_name: str) -> None:
        """Toggle the reverse relationship for an object-typed field.

        First toggle adds a field to the target object, named after this object
        and typed back at it with multiplicity many. Toggling again removes only
        that auto-created field (soft delete), so a third toggle restores it.
        """
        self._require_mutable()
        obj = self._require_active_object(object_name)
        f = obj.find_field(field_name)
        if f is None:
            raise NotFound(f"no active field {field_name!r} on {obj.name!r}")
        if not f.ftype.is_ref:
            raise NotObjectTyped(f"field {f.name!r} is not object-typed")
        target = self.find_object(str(f.ftype.target))
        if target is None:
            raise TargetDeleted(f"target object {f.ftype.target!r} is deleted or missing")
        key = (obj.name, f.name)
        existing = [g for g in target.fields if g.reverse_of == key]
        if existing:
            g = existing[-1]
            if g.deleted:
                active_twin = target.find_field(g.name)
                if active_twin is not None:
                    raise NameCollision(
                        f"cannot restore reverse field {g.name!r}: name is in use"
                    )
                g.deleted = False
            else:
                g.deleted = True
            return
        if target.find_field(obj.name) is not None:
            raise DuplicateName(
                f"object {target.name!r} already has an active field {obj.name!r}"
            )
        self.add_field(
            target.name,
            obj.name,
            FieldType.ref(obj.name),
            multiplicity=Multiplicity.MANY,
            provenance=Provenance.USER_ADDED,
            reverse_of=key,
        )

    # -- soft delete / restore ------------------------------------------------

    def _resolve(self, path: ComponentPath, deleted: bool) -> Any:
        if path.kind == "object":
            return self.find_object(path.object_name, deleted=deleted)
        # parent object must be visible for its parts to be addressable
        obj = self.find_object(path.object_name)
        if obj is None:
            return None
        assert path.name is not None
        if path.kind == "field":
            return obj.find_field(path.name, deleted=deleted)
        return obj.find_method(path.name, deleted=deleted)

    def soft_delete(self, path: ComponentPath) -> None:
        self._require_mutable()
        item = self._resolve(path, deleted=False)
        if item is None:
            raise NotFound(f"no active {path.kind} at {path.object_name!r}/{path.name!r}")
        item.deleted = True

    def restore(self, path: ComponentPath) -> None:
        self._require_mutable()
        item = self._resolve(path, deleted=True)
        if item is None:
            if self._resolve(path, deleted=False) is not None:
                return  # restoring something that is not deleted is a no-op
            raise NotFound(f"no deleted {path.kind} at {path.object_name!r}/{path.name!r}")
        if self._resolve(path, deleted=False) is not None:
            raise NameCollision(
                f"cannot restore {path.kind} {path.name or path.object_name!r}: "
                "an active component reuses the name"
            )
        item.deleted = False

    # -- inspection -----------------------------------------------------------

    def component_count(self) -> int:
        """Active objects plus the active fields and methods they carry."""
        n = 0
        for obj in self.active_objects():
            n += 1 + len(obj.active_fields()) + len(obj.active_methods())
        return n

    def iter_fields(self) -> Iterator[tuple[ObjectDef, Field]]:
        for obj in self.objects:
            for f in obj.fields:
                yield obj, f

    def validate(self) -> list[Violation]:
        """Report every invariant violation; an empty list means a clean model."""
        out: list[Violation] = []
        seen: dict[str, int] = {}
        for obj in self.active_objects():
            seen[obj.name] = seen.get(obj.name, 0) + 1
        for name, n in seen.items():
            if n > 1:
                out.append(
                    Violation("duplicate_object_name", name, f"{n} active objects named {name!r}")
                )
        object_names = {o.name for o in self.objects}
        active_names = {o.name for o in self.active_objects()}
        for obj in self.objects:
            fseen: dict[str, int] = {}
            for f in obj.active_fields():
                fseen[f.name] = fseen.get(f.name, 0) + 1
            for name, n in fseen.items():
                if n > 1:
                    out.append(
                        Violation(
                            "duplicate_field_name",
                            f"{obj.name}.{name}",
                            f"{n} active fields named {name!r} on {obj.name!r}",
                        )
                    )
            mseen: dict[str, int] = {}
            for m in obj.active_methods():
                mseen[m.name] = mseen.get(m.name, 0) + 1
            for name, n in mseen.items():
                if n > 1:
                    out.append(
                        Violation(
                            "duplicate_method_name",
                            f"{obj.name}.{name}",
                            f"{n} active methods named {name!r} on {obj.name!r}",
                        )
                    )
            for f in obj.fields:
                if f.ftype.is_ref:
                    tgt = str(f.ftype.target)
                    if tgt not in object_names:
                        out.append(
                            Violation(
                                "unknown_target",
                                f"{obj.name}.{f.name}",
                                f"field type names {tgt!r}, which is not in the model",
                            )
                        )
                    elif tgt not in active_names and not f.deleted and not obj.deleted:
                        out.append(
                            Violation(
                                "dangling_reference",
                                f"{obj.name}.{f.name}",
                                f"field type names deleted object {tgt!r}",
                            )
                        )
                if f.reverse_of is not None:
                    r_obj, r_field = f.reverse_of
                    owner = next((o for o in self.objects if o.name == r_obj), None)
                    has_pair = owner is not None and any(g.name == r_field for g in owner.fields)
                    if not has_pair:
                        out.append(
                            Violation(
                                "orphan_reverse_link",
                                f"{obj.name}.{f.name}",
                                f"reverse link names missing pair {r_obj!r}/{r_field!r}",
                            )
                        )
        return out

    # -- serialization ----------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "prompt": self.prompt,
            "phase": self.phase.value,
            "objects": [_object_doc(o) for o in self.objects],
        }

    @classmethod
    def from_document(cls, doc: Any) -> "ObjectModel":
        return _decode_document(doc)


def _object_doc(obj: ObjectDef) -> dict:
    return {
        "name": obj.name,
        "deleted": obj.deleted,
        "provenance": obj.provenance.value,
        "fields": [_field_doc(f) for f in obj.fields],
        "methods": [
            {"name": m.name, "deleted": m.deleted, "provenance": m.provenance.value}
            for m in obj.methods
        ],
    }


def _field_doc(f: Field) -> dict:
    if f.ftype.kind == "primitive":
        tdoc: dict = {"kind": "primitive", "primitive": f.ftype.primitive}
    else:
        tdoc = {"kind": "object", "target": f.ftype.target}
    doc = {
        "name": f.name,
        "type": tdoc,
        "multiplicity": f.multiplicity.value,
        "deleted": f.deleted,
        "provenance": f.provenance.value,
    }
    if f.reverse_of is not None:
        doc["reverseOf"] = {"object": f.reverse_of[0], "field": f.reverse_of[1]}
    return doc


def encode_model(model: ObjectModel) -> str:
    """Canonical JSON document for a model; stable byte-for-byte for equal models."""
    return json.dumps(model.to_document(), indent=2, ensure_ascii=False) + "\n"


def export_document(model: ObjectModel, coerce_dangling: bool = False) -> dict:
    """Model document for export. A model whose active fields still reference
    deleted objects does not export cleanly: the caller either fixes the model
    or passes coerce_dangling to turn those references into plain strings."""
    dangling = [v for v in model.validate() if v.code == "dangling_reference"]
    if dangling and not coerce_dangling:
        raise ExportBlocked(dangling)
    doc = model.to_document()
    bad_paths = {v.path for v in dangling}
    for odoc in doc["objects"]:
        for fdoc in odoc["fields"]:
            if f"{odoc['name']}.{fdoc['name']}" in bad_paths and fdoc["type"]["kind"] == "object":
                fdoc["type"] = {"kind": "primitive", "primitive": "string"}
    return doc


def decode_model(text: str) -> ObjectModel:
    """Parse a canonical model document, rejecting malformed input with a
    diagnostic that names the offending position."""
    if not text.strip():
        raise DecodeError("document: empty input")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DecodeError(f"document line {e.lineno} col {e.colno}: {e.msg}") from e
    return _decode_document(doc)


def _need(doc: Any, key: str, types: Any, where: str) -> Any:
    if not isinstance(doc, dict):
        raise DecodeError(f"{where}: expected an object")
    if key not in doc:
        raise DecodeError(f"{where}: missing key {key!r}")
    val = doc[key]
    if not isinstance(val, types):
        raise DecodeError(f"{where}.{key}: wrong type {type(val).__name__}")
    return val


def _enum(cls: Any, raw: str, where: str) -> Any:
    try:
        return cls(raw)
    except ValueError:
        raise DecodeError(f"{where}: unknown value {raw!r}") from None


def _decode_document(doc: Any) -> ObjectModel:
    prompt = _need(doc, "prompt", str, "document")
    phase = _enum(Phase, _need(doc, "phase", str, "document"), "document.phase")
    objects_doc = _need(doc, "objects", list, "document")
    model = ObjectModel(prompt=prompt, phase=phase)
    for i, odoc in enumerate(objects_doc):
        where = f"objects[{i}]"
        obj = ObjectDef(
            name=_need(odoc, "name", str, where),
            deleted=_need(odoc, "deleted", bool, where),
            provenance=_enum(Provenance, _need(odoc, "provenance", str, where), where),
        )
        for j, fdoc in enumerate(_need(odoc, "fields", list, where)):
            fwhere = f"{where}.fields[{j}]"
            obj.fields.append(_decode_field(fdoc, fwhere))
        for j, mdoc in enumerate(_need(odoc, "methods", list, where)):
            mwhere = f"{where}.methods[{j}]"
            obj.methods.append(
                Method(
                    name=_need(mdoc, "name", str, mwhere),
                    deleted=_need(mdoc, "deleted", bool, mwhere),
                    provenance=_enum(
                        Provenance, _need(mdoc, "provenance", str, mwhere), mwhere
                    ),
                )
            )
        model.objects.append(obj)
    return model


def _decode_field(fdoc: Any, where: str) -> Field:
    tdoc = _need(fdoc, "type", dict, where)
    kind = _need(tdoc, "kind", str, f"{where}.type")
    try:
        if kind == "primitive":
            ftype = FieldType.prim(_need(tdoc, "primitive", str, f"{where}.type"))
        elif kind == "object":
            ftype = FieldType(kind="object", target=_need(tdoc, "target", str, f"{where}.type"))
        else:
            raise DecodeError(f"{where}.type.kind: unknown value {kind!r}")
    except InvalidType as e:
        raise DecodeError(f"{where}.type: {e}") from None
    reverse_of = None
    if "reverseOf" in fdoc:
        rdoc = _need(fdoc, "reverseOf", dict, where)
        reverse_of = (
            _need(rdoc, "object", str, f"{where}.reverseOf"),
            _need(rdoc, "field", str, f"{where}.reverseOf"),
        )
    return Field(
        name=_need(fdoc, "name", str, where),
        ftype=ftype,
        multiplicity=_enum(
            Multiplicity, _need(fdoc, "multiplicity", str, where), f"{where}.multiplicity"
        ),
        deleted=_need(fdoc, "deleted", bool, where),
        provenance=_enum(Provenance, _need(fdoc, "provenance", str, where), where),
        reverse_of=reverse_of,
    )
