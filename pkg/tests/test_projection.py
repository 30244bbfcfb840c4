import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emvv.cgraph import ConceptualGraph
from emvv.ontology import make_ontology
from emvv.projection import (
    LatticeMismatchError,
    Morphism,
    exists_projection,
    find_projections,
    is_projection,
    isomorphic,
    iter_projections,
)

from gen import brute_projections, random_graph, random_pair


def test_empty_pattern_has_one_trivial_projection(load):
    james = load("james.cg").graphs[0]
    ms = find_projections(james.with_parts((), ()), james)
    assert ms == [Morphism({}, {})]


def test_identity_is_found(load):
    james = load("james.cg").graphs[0]
    ident = Morphism({c.id: c.id for c in james.concepts}, {r.id: r.id for r in james.relations})
    assert ident in find_projections(james, james)


def test_generic_onto_individual(load, ref):
    james = load("james.cg").graphs[0]
    assert exists_projection(ConceptualGraph.build(ref, [("Employee", "*")]), james)
    assert exists_projection(ConceptualGraph.build(ref, [("Person", "James")]), james)
    assert not exists_projection(ConceptualGraph.build(ref, [("Employee", "Marie")]), james)


def test_relation_subtyping(ref):
    target = ConceptualGraph.build(ref, [("Activity", "a"), ("Flow", "f")], [("has_input", 0, 1)])
    general = ConceptualGraph.build(ref, [("EntityType", "*"), ("EntityType", "*")], [("link", 0, 1)])
    specific = ConceptualGraph.build(ref, [("EntityType", "*"), ("EntityType", "*")], [("has_output", 0, 1)])
    assert exists_projection(general, target)
    assert not exists_projection(specific, target)


def test_non_injective(ref):
    pattern = ConceptualGraph.build(ref, [("Person", "*"), ("Person", "*")])
    target = ConceptualGraph.build(ref, [("Person", "x")])
    assert find_projections(pattern, target) == [Morphism({0: 0, 1: 0}, {})]


def test_limit_and_fixed(load):
    gh = load("gh.cg").graphs[0]
    pattern = ConceptualGraph.build(gh.ontology, [("Person", "*"), ("Organization", "*")], [("member-of", 0, 1)])
    assert len(find_projections(pattern, gh)) == 5
    assert len(find_projections(pattern, gh, limit=2)) == 2
    z = next(c.id for c in gh.concepts if str(c.marker) == "z")
    assert len(find_projections(pattern, gh, fixed={0: z})) == 1


def test_lattice_mismatch(ref):
    other = make_ontology({"Person": ()})
    with pytest.raises(LatticeMismatchError):
        find_projections(ConceptualGraph.build(other, [("Person", "*")]), ConceptualGraph.build(ref, []))


def test_results_are_deterministic():
    rng = random.Random(7)
    for _ in range(30):
        p, t = random_pair(rng)
        assert find_projections(p, t) == find_projections(p, t)


@pytest.mark.parametrize("seed", range(8))
def test_matches_brute_force_oracle(seed):
    rng = random.Random(seed)
    for _ in range(40):
        p, t = random_pair(rng)
        got = {m.key() for m in find_projections(p, t)}
        assert got == brute_projections(p, t)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_every_result_is_a_valid_projection(seed):
    p, t = random_pair(random.Random(seed))
    ms = find_projections(p, t)
    assert len(set(ms)) == len(ms)
    for m in ms:
        assert is_projection(m, p, t)
    assert exists_projection(p, t) == bool(ms)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_reflexive(seed):
    g = random_graph(random.Random(seed), corefs=True)
    assert exists_projection(g, g)
    assert isomorphic(g, g)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_composition_is_a_projection(seed):
    rng = random.Random(seed)
    k = random_graph(rng)
    from gen import generalize

    h = generalize(rng, k)
    g = generalize(rng, h) if h.concepts else h
    for m1 in find_projections(g, h, limit=3):
        for m2 in find_projections(h, k, limit=3):
            assert is_projection(m1.compose(m2), g, k)


def test_iter_is_lazy(ref):
    pattern = ConceptualGraph.build(ref, [("Person", "*")] * 3)
    target = ConceptualGraph.build(ref, [("Person", n) for n in "abcdefgh"])
    it = iter_projections(pattern, target)
    assert next(it).concept_map == {0: 0, 1: 0, 2: 0}
