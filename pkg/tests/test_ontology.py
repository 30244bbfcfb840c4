import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emvv.diagnostics import DiagnosticError
from emvv.ontology import (
    ConceptLattice,
    CycleError,
    ObjectModel,
    ROOT_CATEGORIES,
    TOP,
    UnknownTypeError,
    derive_lattices,
    is_subtype,
    load_lattices,
    make_ontology,
    max_common_subtypes,
)

from gen import closure, mcs_oracle, random_dag


def test_minimal_ontology_has_only_top():
    onto = load_lattices("concept Universal\n")
    assert onto.concepts.types == {"Universal"}
    assert not onto.relations.relations


def test_reference_ontology_has_four_root_categories(ref):
    for cat in ROOT_CATEGORIES:
        assert ref.concepts.parents(cat) == (TOP,)
    assert {"Process", "Activity", "Resource", "Actor", "Flow", "Location"} <= ref.concepts.types
    for r in ("composed_of", "has_input", "has_output", "uses_resource", "performed_by",
              "precedes", "located_at", "operational_domain"):
        assert r in ref.relations


def test_cycle_is_reported():
    with pytest.raises(DiagnosticError) as exc:
        load_lattices("concept A < B\nconcept B < A\n")
    assert exc.value.code == "cycle"
    with pytest.raises(CycleError):
        ConceptLattice(frozenset({"A", "B"}), frozenset({("A", "B"), ("B", "A")}))


def test_unknown_signature_type():
    with pytest.raises(DiagnosticError) as exc:
        load_lattices("concept A\nrelation r(A, Nope)\n")
    assert exc.value.code == "unknown-type"
    assert exc.value.diagnostic.location.line == 2


def test_syntax_error_has_location():
    with pytest.raises(DiagnosticError) as exc:
        load_lattices("concept A\nconcept ? B\n")
    loc = exc.value.diagnostic.location
    assert (loc.line, loc.column) == (2, 9)


def test_subtype_basics(ref):
    lat = ref.concepts
    assert is_subtype(lat, "Process", "Process")
    assert is_subtype(lat, "Process", TOP)
    assert is_subtype(lat, "Employee", "Actor")
    assert not is_subtype(lat, "Actor", "Employee")
    with pytest.raises(UnknownTypeError):
        is_subtype(lat, "Nope", TOP)


def test_subrelation_arguments_must_narrow():
    with pytest.raises(Exception, match="not a subtype"):
        make_ontology({"A": (), "B": ()}, {"r": (("A",), ()), "s": (("B",), ("r",))})
    with pytest.raises(Exception, match="arity"):
        make_ontology({"A": ()}, {"r": (("A",), ()), "s": (("A", "A"), ("r",))})


def test_max_common_subtypes_examples(ref):
    lat = ref.concepts
    assert max_common_subtypes(lat, "Person", "Person") == {"Person"}
    assert max_common_subtypes(lat, "Person", "Actor") == {"Person"}
    # no shared descendant between disjoint branches
    assert max_common_subtypes(lat, "Department", "Workshop") == set()


@pytest.mark.parametrize("seed", range(60))
def test_subtype_matches_closure_oracle(seed):
    rng = random.Random(seed)
    names, edges = random_dag(rng, rng.randint(1, 9))
    lat = ConceptLattice(frozenset(names), frozenset(edges))
    anc = closure(names, edges)
    for a in anc:
        for b in anc:
            assert lat.is_subtype(a, b) == (b in anc[a])


@pytest.mark.parametrize("seed", range(60))
def test_max_common_subtypes_matches_oracle(seed):
    rng = random.Random(1000 + seed)
    names, edges = random_dag(rng, rng.randint(1, 9))
    lat = ConceptLattice(frozenset(names), frozenset(edges))
    anc = closure(names, edges)
    for a in anc:
        for b in anc:
            got = lat.max_common_subtypes(a, b)
            assert got == mcs_oracle(anc, a, b)
            assert got == lat.max_common_subtypes(b, a)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_partial_order_laws(seed, n):
    rng = random.Random(seed)
    names, edges = random_dag(rng, n)
    lat = ConceptLattice(frozenset(names), frozenset(edges))
    types = sorted(lat.types)
    for a in types:
        assert lat.is_subtype(a, TOP)
        for b in types:
            if lat.is_subtype(a, b) and lat.is_subtype(b, a):
                assert a == b
            for c in types:
                if lat.is_subtype(a, b) and lat.is_subtype(b, c):
                    assert lat.is_subtype(a, c)


def test_derive_empty_object_model():
    onto = derive_lattices(ObjectModel())
    assert onto.concepts.types == {TOP}
    assert not onto.relations.relations


def test_derive_attribute_becomes_relation():
    om = ObjectModel(frozenset({"Activity"}), attributes=(("Activity", "name", "Text"),))
    onto = derive_lattices(om)
    assert onto.concepts.types == {TOP, "Activity", "Text"}
    assert onto.relations.signature["name"] == ("Activity", "Text")


def test_derive_inheritance_and_methods():
    om = ObjectModel(
        frozenset({"Process", "EntityType", "Resource"}),
        inheritance=frozenset({("Process", "EntityType")}),
        associations=(("uses", "Process", "Resource"),),
        methods=(("Process", "start"),),
    )
    onto = derive_lattices(om)
    assert ("Process", "EntityType") in onto.concepts.subtype_edges
    assert onto.relations.signature["uses"] == ("Process", "Resource")
    assert onto.relations.signature["start"] == ("Process", TOP)


def test_derive_collision_is_suffixed():
    om = ObjectModel(
        frozenset({"A", "B"}),
        attributes=(("A", "size", "Int"),),
        associations=(("size", "A", "B"),),
    )
    with pytest.warns(UserWarning, match="renamed"):
        onto = derive_lattices(om)
    assert onto.relations.signature["size"] == ("A", "Int")
    assert onto.relations.signature["size_2"] == ("A", "B")


def test_object_model_rejects_unknown_class():
    with pytest.raises(UnknownTypeError):
        ObjectModel(frozenset({"A"}), inheritance=frozenset({("A", "Ghost")}))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_derived_lattices_are_valid(seed):
    rng = random.Random(seed)
    classes = [f"K{i}" for i in range(rng.randint(0, 5))]
    inh = {(c, p) for i, c in enumerate(classes) for p in classes[:i] if rng.random() < 0.3}
    attrs = tuple((rng.choice(classes), f"a{i}", rng.choice(classes + ["V"])) for i in range(rng.randint(0, 3))) \
        if classes else ()
    om = ObjectModel(frozenset(classes), frozenset(inh), attrs)
    onto = derive_lattices(om)
    for c in classes:
        assert onto.concepts.is_subtype(c, TOP)
    onto.validate()
