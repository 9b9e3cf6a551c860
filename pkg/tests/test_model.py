"""Core object-model behavior: edits, soft delete, validation, serialization."""

import copy
import random

import pytest

from draftsmith.model import (
    ComponentPath,
    DecodeError,
    DuplicateName,
    ExportBlocked,
    FieldType,
    Multiplicity,
    NameCollision,
    NotFound,
    NotObjectTyped,
    ObjectModel,
    Phase,
    PhaseError,
    Provenance,
    UnknownTypeTarget,
    canonical_method_name,
    canonical_name,
    decode_model,
    encode_model,
    export_document,
)

from modelgen import random_model, random_op


def restaurant_model() -> ObjectModel:
    """The worked restaurant example: four named objects, customer filled in."""
    m = ObjectModel(
        prompt=(
            "I want a restaurant management app tracking customers, their "
            "reservations, their orders, and menu items."
        ),
        phase=Phase.FULL_MODEL,
    )
    for name in ("customer", "reservation", "order", "menu item"):
        m.add_object(name, Provenance.SYNTHESIZED)
    m.add_field("customer", "name", FieldType.prim("string"))
    m.add_field("customer", "phone number", FieldType.prim("string"))
    m.add_field(
        "customer", "reservation", FieldType.ref("reservation"), Multiplicity.MANY
    )
    m.add_method("customer", "makeReservation")
    m.add_method("customer", "updateContactInfo")
    m.add_field("reservation", "time", FieldType.prim("datetime"))
    m.add_field("reservation", "party size", FieldType.prim("int"))
    m.add_field("order", "item", FieldType.ref("menu item"), Multiplicity.MANY)
    m.add_field("order", "total", FieldType.prim("float"))
    m.add_field("menu item", "name", FieldType.prim("string"))
    m.add_field("menu item", "price", FieldType.prim("float"))
    return m


class TestNaming:
    def test_canonical_name_lowercases_and_collapses(self):
        assert canonical_name("  Menu   Item ") == "menu item"

    def test_method_name_strips_parens_keeps_case(self):
        assert canonical_method_name("buyPet()") == "buyPet"
        assert canonical_method_name("  makeReservation ") == "makeReservation"


class TestAddObject:
    def test_add_normalizes_name(self):
        m = ObjectModel()
        m.add_object("Menu Item")
        assert m.objects[0].name == "menu item"

    def test_duplicate_active_name_rejected(self):
        m = ObjectModel()
        m.add_object("customer")
        with pytest.raises(DuplicateName):
            m.add_object("Customer")

    def test_waiter_joins_restaurant_model(self):
        m = restaurant_model()
        m.add_object("waiter")
        assert m.find_object("waiter") is not None

    def test_add_after_finish_refused(self):
        m = ObjectModel(phase=Phase.FINISHED)
        with pytest.raises(PhaseError):
            m.add_object("customer")


class TestRename:
    def test_rename_propagates_to_types_and_same_named_fields(self):
        m = restaurant_model()
        m.rename_object("reservation", "booking")
        f = m.find_object("customer").find_field("booking")
        assert f is not None
        assert f.ftype.target == "booking"
        assert f.multiplicity is Multiplicity.MANY
        assert m.find_object("customer").find_field("reservation") is None

    def test_rename_without_referrers_changes_only_the_name(self):
        m = restaurant_model()
        m.add_object("waiter")
        before = decode_model(encode_model(m))
        m.rename_object("waiter", "host")
        assert m.find_object("host") is not None
        assert m.find_object("waiter") is None
        # undoing the name by hand recovers the snapshot exactly
        m.find_object("host").name = "waiter"
        assert m == before

    def test_rename_collision_rejected(self):
        m = restaurant_model()
        with pytest.raises(DuplicateName):
            m.rename_object("order", "customer")

    def test_rename_scan_oracle(self):
        """Brute-force scan: after rename, zero fields reference the old name."""
        m = ObjectModel(phase=Phase.FULL_MODEL)
        for name in ("teacher", "student", "course"):
            m.add_object(name)
        m.add_field("student", "advisor", FieldType.ref("teacher"))
        m.add_field("course", "taught by", FieldType.ref("teacher"))
        m.rename_object("teacher", "instructor")
        stale = [
            (o.name, f.name)
            for o, f in m.iter_fields()
            if f.ftype.is_ref and f.ftype.target == "teacher"
        ]
        assert stale == []
        retargeted = [
            (o.name, f.name)
            for o, f in m.iter_fields()
            if f.ftype.is_ref and f.ftype.target == "instructor"
        ]
        assert sorted(retargeted) == [("course", "taught by"), ("student", "advisor")]

    def test_rename_back_is_identity_on_active_view(self):
        m = restaurant_model()
        before = encode_model(m)
        m.rename_object("reservation", "booking")
        m.rename_object("booking", "reservation")
        assert encode_model(m) == before


class TestFieldsAndMethods:
    def test_add_field_and_list_field(self):
        m = restaurant_model()
        f = m.find_object("customer").find_field("phone number")
        assert f.ftype.primitive == "string"
        many = m.find_object("customer").find_field("reservation")
        assert many.multiplicity is Multiplicity.MANY

    def test_unknown_ref_target_rejected(self):
        m = restaurant_model()
        with pytest.raises(UnknownTypeTarget):
            m.add_field("customer", "spirit", FieldType.ref("ghost"))

    def test_duplicate_field_rejected_but_deleted_name_reusable(self):
        m = restaurant_model()
        with pytest.raises(DuplicateName):
            m.add_field("customer", "Name", FieldType.prim("string"))
        m.soft_delete(ComponentPath("field", "customer", "name"))
        m.add_field("customer", "name", FieldType.prim("string"))

    def test_method_add_and_paren_stripping(self):
        m = restaurant_model()
        m.add_method("menu item", "markSeasonal()")
        assert m.find_object("menu item").find_method("markSeasonal") is not None
        with pytest.raises(DuplicateName):
            m.add_method("customer", "makeReservation")

    def test_edit_field_rename_and_retype(self):
        m = restaurant_model()
        m.edit_field("order", "total", new_name="amount", ftype=FieldType.prim("int"))
        f = m.find_object("order").find_field("amount")
        assert f.ftype.primitive == "int"
        with pytest.raises(DuplicateName):
            m.edit_field("order", "amount", new_name="item")


class TestToggles:
    def test_multiplicity_toggle_and_involution(self):
        m = restaurant_model()
        m.toggle_multiplicity("order", "total")
        assert m.find_object("order").find_field("total").multiplicity is Multiplicity.MANY
        m.toggle_multiplicity("order", "total")
        assert m.find_object("order").find_field("total").multiplicity is Multiplicity.ONE

    def test_multiplicity_toggle_on_deleted_field_not_found(self):
        m = restaurant_model()
        m.soft_delete(ComponentPath("field", "order", "total"))
        with pytest.raises(NotFound):
            m.toggle_multiplicity("order", "total")

    def test_two_way_creates_reverse_many_field(self):
        m = ObjectModel(phase=Phase.FULL_MODEL)
        m.add_object("student")
        m.add_object("teacher")
        m.add_field("student", "teacher", FieldType.ref("teacher"))
        m.toggle_two_way("student", "teacher")
        rev = m.find_object("teacher").find_field("student")
        assert rev is not None
        assert rev.ftype.target == "student"
        assert rev.multiplicity is Multiplicity.MANY
        assert rev.reverse_of == ("student", "teacher")

    def test_two_way_toggle_is_involution_on_active_view(self):
        m = ObjectModel(phase=Phase.FULL_MODEL)
        m.add_object("student")
        m.add_object("teacher")
        m.add_field("student", "teacher", FieldType.ref("teacher"))
        before = [f.name for f in m.find_object("teacher").active_fields()]
        m.toggle_two_way("student", "teacher")
        m.toggle_two_way("student", "teacher")
        after = [f.name for f in m.find_object("teacher").active_fields()]
        assert before == after
        # third toggle restores the tombstoned reverse field
        m.toggle_two_way("student", "teacher")
        assert m.find_object("teacher").find_field("student") is not None

    def test_two_way_on_primitive_rejected(self):
        m = restaurant_model()
        with pytest.raises(NotObjectTyped):
            m.toggle_two_way("customer", "name")

    def test_two_way_never_deletes_user_created_reverse_field(self):
        m = ObjectModel(phase=Phase.FULL_MODEL)
        m.add_object("student")
        m.add_object("teacher")
        m.add_field("student", "teacher", FieldType.ref("teacher"))
        # the user added their own back-reference by hand
        m.add_field("teacher", "student", FieldType.ref("student"), Multiplicity.MANY)
        with pytest.raises(DuplicateName):
            m.toggle_two_way("student", "teacher")
        assert m.find_object("teacher").find_field("student").reverse_of is None


class TestDeleteRestore:
    def test_delete_restore_round_trip(self):
        m = restaurant_model()
        m.add_object("waiter")
        before = encode_model(m)
        m.soft_delete(ComponentPath("object", "waiter"))
        assert m.find_object("waiter") is None
        m.restore(ComponentPath("object", "waiter"))
        assert encode_model(m) == before

    def test_delete_keeps_data_and_counts(self):
        m = ObjectModel(phase=Phase.FULL_MODEL)
        for i in range(6):
            m.add_object(f"thing {i}", Provenance.SYNTHESIZED)
        m.soft_delete(ComponentPath("object", "thing 0"))
        m.soft_delete(ComponentPath("object", "thing 3"))
        assert len(m.active_objects()) == 4
        assert len(m.objects) == 6

    def test_delete_referenced_object_flags_dangling(self):
        m = restaurant_model()
        m.soft_delete(ComponentPath("object", "reservation"))
        codes = [v.code for v in m.validate()]
        assert "dangling_reference" in codes

    def test_restore_into_name_collision_rejected(self):
        m = restaurant_model()
        m.soft_delete(ComponentPath("object", "order"))
        m.add_object("order")
        with pytest.raises(NameCollision):
            m.restore(ComponentPath("object", "order"))

    def test_restore_missing_not_found(self):
        m = restaurant_model()
        with pytest.raises(NotFound):
            m.restore(ComponentPath("object", "phantom"))

    def test_component_count_tracks_deletions_exactly(self):
        m = restaurant_model()
        n = m.component_count()
        m.soft_delete(ComponentPath("field", "customer", "name"))
        assert m.component_count() == n - 1
        # deleting an object removes it plus its active parts
        parts = m.find_object("reservation")
        drop = 1 + len(parts.active_fields()) + len(parts.active_methods())
        m.soft_delete(ComponentPath("object", "reservation"))
        assert m.component_count() == n - 1 - drop


class TestValidateAndCount:
    def test_clean_model_validates_empty(self):
        assert restaurant_model().validate() == []

    def test_component_count_basics(self):
        assert ObjectModel().component_count() == 0
        m = ObjectModel()
        m.add_object("a")
        m.add_field("a", "x", FieldType.prim("int"))
        m.add_field("a", "y", FieldType.prim("int"))
        m.add_method("a", "go")
        assert m.component_count() == 4

    def test_component_count_restaurant_hand_count(self):
        # hand enumeration: 4 objects; fields 3 (customer) + 2 + 2 + 2; 2 methods
        assert restaurant_model().component_count() == 4 + 9 + 2

    def test_validate_matches_exhaustive_checker_on_random_models(self):
        rng = random.Random(20260819)
        for _ in range(100):
            m = random_model(rng)
            got = {(v.code, v.path) for v in m.validate()}
            assert got == exhaustive_violations(m)


def exhaustive_violations(m: ObjectModel) -> set:
    """Independent re-scan of every invariant, written the slow obvious way."""
    out = set()
    active = [o for o in m.objects if not o.deleted]
    names = [o.name for o in active]
    for name in set(names):
        if names.count(name) > 1:
            out.add(("duplicate_object_name", name))
    all_names = {o.name for o in m.objects}
    active_names = set(names)
    for o in m.objects:
        fnames = [f.name for f in o.fields if not f.deleted]
        for name in set(fnames):
            if fnames.count(name) > 1:
                out.add(("duplicate_field_name", f"{o.name}.{name}"))
        mnames = [x.name for x in o.methods if not x.deleted]
        for name in set(mnames):
            if mnames.count(name) > 1:
                out.add(("duplicate_method_name", f"{o.name}.{name}"))
        for f in o.fields:
            if f.ftype.is_ref:
                if f.ftype.target not in all_names:
                    out.add(("unknown_target", f"{o.name}.{f.name}"))
                elif f.ftype.target not in active_names and not f.deleted and not o.deleted:
                    out.add(("dangling_reference", f"{o.name}.{f.name}"))
            if f.reverse_of is not None:
                r_obj, r_field = f.reverse_of
                owner = next((x for x in m.objects if x.name == r_obj), None)
                if owner is None or not any(g.name == r_field for g in owner.fields):
                    out.add(("orphan_reverse_link", f"{o.name}.{f.name}"))
    return out


class TestSerialization:
    def test_round_trip_restaurant(self):
        m = restaurant_model()
        m.soft_delete(ComponentPath("field", "order", "total"))
        text = encode_model(m)
        again = decode_model(text)
        assert again == m
        assert encode_model(again) == text

    def test_empty_document_rejected(self):
        with pytest.raises(DecodeError):
            decode_model("")
        with pytest.raises(DecodeError):
            decode_model("   \n")

    def test_malformed_documents_carry_position(self):
        with pytest.raises(DecodeError, match="line"):
            decode_model("{not json")
        with pytest.raises(DecodeError, match="objects\\[0\\]"):
            decode_model(
                '{"prompt": "", "phase": "full_model", "objects": [{"name": "x"}]}'
            )

    def test_round_trip_100_random_models(self):
        rng = random.Random(7)
        for _ in range(100):
            m = random_model(rng)
            assert decode_model(encode_model(m)) == m

    def test_export_blocked_on_dangling_unless_coerced(self):
        m = restaurant_model()
        m.soft_delete(ComponentPath("object", "menu item"))
        with pytest.raises(ExportBlocked):
            export_document(m)
        doc = export_document(m, coerce_dangling=True)
        order = next(o for o in doc["objects"] if o["name"] == "order")
        item = next(f for f in order["fields"] if f["name"] == "item")
        assert item["type"] == {"kind": "primitive", "primitive": "string"}
        # the stored model itself is untouched
        assert m.find_object("order").find_field("item").ftype.is_ref


class TestRandomOpSequences:
    def test_invariants_hold_under_random_edits(self):
        rng = random.Random(99)
        forbidden = {"duplicate_object_name", "duplicate_field_name", "duplicate_method_name"}
        for _ in range(60):
            m = random_model(rng, max_objects=4)
            for _ in range(40):
                random_op(rng, m)
                codes = {v.code for v in m.validate()}
                assert not (codes & forbidden)
                assert decode_model(encode_model(m)) == m

    def test_deep_copy_unaffected_by_edits(self):
        m = restaurant_model()
        snap = copy.deepcopy(m)
        m.add_object("waiter")
        m.soft_delete(ComponentPath("object", "customer"))
        assert snap == restaurant_model()
