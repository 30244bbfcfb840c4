import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emvv.cgraph import Individual, well_formed
from emvv.ingest import (
    BUILTINS,
    EnterpriseModel,
    Entity,
    HandleFunctionRegistry,
    Link,
    MissingCounterpartError,
    ModelError,
    extract_facts,
    model_to_cg,
    parse_model,
    render_model,
)
from emvv.propmodel.facts import HandleFunction, ModelingParameter, ModelingVariable

from gen import random_model


def _graphable(m: EnterpriseModel, onto) -> EnterpriseModel:
    """``m`` without attributes the ontology has no relation for."""
    ents = [Entity(e.id, e.kind, {k: v for k, v in e.attributes.items() if k in onto.relations})
            for e in m.entities.values()]
    return EnterpriseModel.of(ents, m.links, m.series.values())


def test_empty_model(ref):
    m = EnterpriseModel()
    g = model_to_cg(m, ref)
    assert g.is_empty
    store = extract_facts(m)
    assert set(store.facts) == set(BUILTINS)
    assert all(isinstance(f, HandleFunction) for f in store.facts.values())


def test_untransported_cell_counts(load):
    b = load("cell_no_transport.model")
    m, g = b.model, b.model_graph
    assert len(m.of_kind("Activity")) == 2 and len(m.of_kind("Flow")) == 4
    assert (len(m.entities), len(m.links), m.attribute_count()) == (11, 12, 4)
    # 11 entities plus the three distinct domains; 12 links plus 4 attributes
    assert (len(g.concepts), len(g.relations)) == (14, 16)
    assert well_formed(g).ok


def test_transported_cell_has_transport(load):
    m = load("cell_transport.model").model
    assert [e.id for e in m.of_kind("Activity")] == ["drilling", "polishing", "transport"]
    assert m.entities["transport"].attributes["role"] == "Transport"
    assert m.targets("precedes", "drilling") == ["transport"]


def test_handle_functions(load):
    m = load("cell_no_transport.model").model
    reg = HandleFunctionRegistry()
    assert reg.call("precedes", m, ("drilling", "polishing")) is True
    assert reg.call("precedes", m, ("polishing", "drilling")) is False
    assert reg.call("outputs", m, ("drilling",)) == {"drilled_part", "heat"}
    assert reg.call("domain_of", m, ("heat",)) == "Energy"
    res = reg.call("resource_of", m, ("drilling",))
    assert reg.call("colocated", m, (res, res)) is True
    assert reg.call("colocated", m, (res, reg.call("resource_of", m, ("polishing",)))) is False
    with pytest.raises(ModelError):
        reg.call("precedes", m, ("drilling",))
    with pytest.raises(ModelError):
        reg.call("precedes", None, ("a", "b"))


def test_registry_extension():
    reg = HandleFunctionRegistry({"twice": (lambda m, x, t=None: 2 * x, ("n",), "int")})
    assert "twice" in reg and reg.call("twice", EnterpriseModel(), (4,)) == 8
    assert HandleFunction("twice", ("n",), "int") in reg.facts()


def test_model_validation():
    with pytest.raises(ModelError):
        Entity("x", "Gadget")
    with pytest.raises(ModelError) as exc:
        EnterpriseModel.of([Entity("a", "Activity")], [Link("uses_resource", "a", "ghost")])
    assert exc.value.code == "dangling-link"
    with pytest.raises(ModelError) as exc:
        EnterpriseModel.of([Entity("a", "Activity"), Entity("f", "Flow")], [Link("precedes", "a", "f")])
    assert exc.value.code == "kind-violation"
    with pytest.raises(ModelError):
        EnterpriseModel.of([Entity("f", "Flow", {"operational_domain": "Vibes"})])


def test_missing_counterpart(ref):
    m = EnterpriseModel.of([Entity("a", "Activity", {"cost": 3})])
    with pytest.raises(MissingCounterpartError):
        model_to_cg(m, ref)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_translation_counts_and_bijection(seed):
    from emvv.ontology import reference_ontology

    ref = reference_ontology()
    m = _graphable(random_model(random.Random(seed)), ref)
    g = model_to_cg(m, ref)
    values = {(ref.relations.signature[a][1], str(v).lower() if isinstance(v, bool) else str(v))
              for e in m.entities.values() for a, v in e.attributes.items()}
    assert len(g.concepts) == len(m.entities) + len(values)
    assert len(g.relations) == len(m.links) + m.attribute_count()
    assert well_formed(g).ok
    # each entity has exactly one node, of its own kind
    for e in m.entities.values():
        nodes = [c for c in g.concepts if c.marker == Individual(e.id) and c.ctype == e.kind]
        assert len(nodes) == 1
    for link in m.links:
        assert any(r.rtype == link.kind and [str(g.concept(a).marker) for a in r.args] == [link.source, link.target]
                   for r in g.relations)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_extracted_facts(seed):
    m = random_model(random.Random(seed))
    store = extract_facts(m)
    params = store.kind(ModelingParameter)
    assert len(params) == m.attribute_count()
    assert len(store.kind(ModelingVariable)) == len(m.series)
    assert len(store.kind(HandleFunction)) == len(BUILTINS)
    for e in m.entities.values():
        if "operational_domain" in e.attributes:
            assert params[f"domain_of.{e.id}"].value == e.attributes["operational_domain"]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_render_parse_identity(seed):
    m = random_model(random.Random(seed))
    assert parse_model(render_model(m)) == m
