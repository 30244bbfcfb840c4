"""Enterprise process models: validation, graph translation and fact extraction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .cgraph import ConceptNode, ConceptualGraph, Individual, RelationEdge
from .ontology import Ontology
from .propmodel.facts import FactStore, HandleFunction, ModelingParameter, ModelingVariable

ENTITY_KINDS = ("Process", "Activity", "Resource", "Actor", "Flow", "Location")
DOMAINS = ("Material", "Energy", "Information")

LINK_KINDS: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "composed_of": (frozenset({"Process"}), frozenset({"Process", "Activity"})),
    "has_input": (frozenset({"Activity"}), frozenset({"Flow"})),
    "has_output": (frozenset({"Activity"}), frozenset({"Flow"})),
    "uses_resource": (frozenset({"Activity"}), frozenset({"Resource"})),
    "performed_by": (frozenset({"Activity"}), frozenset({"Actor"})),
    "precedes": (frozenset({"Activity"}), frozenset({"Activity"})),
    "located_at": (frozenset({"Resource"}), frozenset({"Location"})),
}

# attribute name -> prefix of the parameter fact extracted for it
FACT_PREFIX = {"operational_domain": "domain_of"}


class ModelError(ValueError):
    def __init__(self, message: str, code: str = "model-error"):
        super().__init__(message)
        self.code = code


class MissingCounterpartError(ModelError):
    def __init__(self, message: str):
        super().__init__(message, "missing-lattice-counterpart")


@dataclass(frozen=True)
class Entity:
    id: str
    kind: str
    attributes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ENTITY_KINDS:
            raise ModelError(f"{self.id}: unknown entity kind {self.kind!r}", "kind-violation")


@dataclass(frozen=True)
class Link:
    kind: str
    source: str
    target: str


@dataclass(frozen=True)
class EnterpriseModel:
    entities: Mapping[str, Entity] = field(default_factory=dict)
    links: frozenset[Link] = frozenset()
    series: Mapping[str, ModelingVariable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "links", frozenset(self.links))
        for e in self.entities.values():
            dom = e.attributes.get("operational_domain")
            if e.kind == "Flow" and dom is not None and dom not in DOMAINS:
                raise ModelError(f"flow {e.id}: operational domain must be one of {DOMAINS}", "kind-violation")
        for link in sorted(self.links, key=lambda l: (l.kind, l.source, l.target)):
            if link.kind not in LINK_KINDS:
                raise ModelError(f"unknown link kind {link.kind!r}", "kind-violation")
            for end in (link.source, link.target):
                if end not in self.entities:
                    raise ModelError(f"{link.kind} link refers to undeclared entity {end!r}", "dangling-link")
            sources, targets = LINK_KINDS[link.kind]
            s, t = self.entities[link.source].kind, self.entities[link.target].kind
            if s not in sources or t not in targets:
                raise ModelError(
                    f"{link.kind} cannot connect {s} {link.source} to {t} {link.target}", "kind-violation")

    @classmethod
    def of(cls, entities: Iterable[Entity] = (), links: Iterable[Link | tuple] = (), series=()):
        return cls(
            {e.id: e for e in entities},
            frozenset(l if isinstance(l, Link) else Link(*l) for l in links),
            {s.name: s for s in series},
        )

    def of_kind(self, kind: str) -> list[Entity]:
        return sorted((e for e in self.entities.values() if e.kind == kind), key=lambda e: e.id)

    def targets(self, kind: str, source: str) -> list[str]:
        return sorted(l.target for l in self.links if l.kind == kind and l.source == source)

    def sources(self, kind: str, target: str) -> list[str]:
        return sorted(l.source for l in self.links if l.kind == kind and l.target == target)

    def attribute_count(self) -> int:
        return sum(len(e.attributes) for e in self.entities.values())


# -- handle functions ------------------------------------------------------

def _ids(x) -> frozenset[str]:
    if isinstance(x, (set, frozenset)):
        return frozenset(x)
    return frozenset({x})


def _reachable(m: EnterpriseModel, start: str) -> set[str]:
    seen: set[str] = set()
    todo = list(m.targets("precedes", start))
    while todo:
        n = todo.pop()
        if n not in seen:
            seen.add(n)
            todo.extend(m.targets("precedes", n))
    return seen


def _locations(m: EnterpriseModel, resources) -> frozenset[str]:
    return frozenset(loc for r in _ids(resources) for loc in m.targets("located_at", r))


def _colocated(m: EnterpriseModel, a, b, t=None) -> bool:
    left, right = _ids(a), _ids(b)
    if not left or not right:
        return False
    return all(
        set(m.targets("located_at", r1)) & set(m.targets("located_at", r2))
        for r1 in left for r2 in right
    )


@dataclass(frozen=True)
class _Builtin:
    fn: Callable
    params: tuple[str, ...]
    result: str


BUILTINS: dict[str, _Builtin] = {
    "inputs": _Builtin(lambda m, a, t=None: frozenset(m.targets("has_input", a)), ("activity",), "set"),
    "outputs": _Builtin(lambda m, a, t=None: frozenset(m.targets("has_output", a)), ("activity",), "set"),
    "domain_of": _Builtin(
        lambda m, f, t=None: m.entities[f].attributes.get("operational_domain") if f in m.entities else None,
        ("flow",), "OperationalDomain"),
    "precedes": _Builtin(lambda m, a, b, t=None: b in _reachable(m, a), ("activity", "activity"), "bool"),
    "resource_of": _Builtin(lambda m, a, t=None: frozenset(m.targets("uses_resource", a)), ("activity",), "set"),
    "colocated": _Builtin(_colocated, ("resource", "resource"), "bool"),
}


class HandleFunctionRegistry:
    """Named accessors over a model, evaluated as ``fn(model, *args, t=t)``."""

    def __init__(self, extra: Mapping[str, tuple[Callable, tuple[str, ...], str]] | None = None):
        self._fns: dict[str, _Builtin] = dict(BUILTINS)
        for name, (fn, params, result) in (extra or {}).items():
            self.register(name, fn, params, result)

    def register(self, name: str, fn: Callable, params: tuple[str, ...] = (), result: str = "") -> None:
        self._fns[name] = _Builtin(fn, tuple(params), result)

    def __contains__(self, name: str) -> bool:
        return name in self._fns

    def __iter__(self):
        return iter(sorted(self._fns))

    def call(self, name: str, model, args: tuple, t=None):
        if model is None:
            raise ModelError(f"handle function {name} needs a model")
        entry = self._fns[name]
        if len(args) != len(entry.params):
            raise ModelError(f"{name} takes {len(entry.params)} argument(s), got {len(args)}")
        return entry.fn(model, *args, t=t)

    def facts(self) -> list[HandleFunction]:
        return [HandleFunction(n, self._fns[n].params, self._fns[n].result) for n in self]


# -- translation -----------------------------------------------------------

def parse_model(text: str, file: str = "<string>") -> EnterpriseModel:
    from .frontio.parser import parse_model as _parse

    return _parse(text, file)


def render_model(m: EnterpriseModel) -> str:
    from .frontio.serialize import serialize

    return serialize(m)


def _value_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def model_to_cg(m: EnterpriseModel, ontology: Ontology, name: str = "model") -> ConceptualGraph:
    """One individual node per entity, one edge per link, one edge per attribute.

    Attribute values become individual nodes typed by the second argument
    of the attribute's relation signature; equal values share a node.
    """
    concepts, relations = ontology
    nodes: list[ConceptNode] = []
    index: dict[str, int] = {}
    for e in sorted(m.entities.values(), key=lambda e: e.id):
        if e.kind not in concepts:
            raise MissingCounterpartError(f"entity kind {e.kind} has no concept type")
        index[e.id] = len(nodes)
        nodes.append(ConceptNode(len(nodes), e.kind, Individual(e.id)))

    edges: list[RelationEdge] = []
    for link in sorted(m.links, key=lambda l: (l.kind, l.source, l.target)):
        if link.kind not in relations:
            raise MissingCounterpartError(f"link kind {link.kind} has no relation type")
        edges.append(RelationEdge(len(edges), link.kind, (index[link.source], index[link.target])))

    values: dict[tuple[str, str], int] = {}
    for e in sorted(m.entities.values(), key=lambda e: e.id):
        for attr in sorted(e.attributes):
            if attr not in relations or relations.arity(attr) != 2:
                raise MissingCounterpartError(f"attribute {attr} of {e.id} has no binary relation type")
            vtype = relations.signature[attr][1]
            key = (vtype, _value_text(e.attributes[attr]))
            if key not in values:
                values[key] = len(nodes)
                nodes.append(ConceptNode(len(nodes), vtype, Individual(key[1])))
            edges.append(RelationEdge(len(edges), attr, (index[e.id], values[key])))
    return ConceptualGraph(ontology, tuple(nodes), tuple(edges), name)


def _type_tag(v) -> str:
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "real"
    return "symbol"


def extract_facts(m: EnterpriseModel, registry: HandleFunctionRegistry | None = None) -> FactStore:
    registry = registry or HandleFunctionRegistry()
    facts: list = []
    for e in sorted(m.entities.values(), key=lambda e: e.id):
        for attr in sorted(e.attributes):
            name = f"{FACT_PREFIX.get(attr, attr)}.{e.id}"
            facts.append(ModelingParameter(name, _type_tag(e.attributes[attr]), e.attributes[attr]))
    facts.extend(m.series[k] for k in sorted(m.series))
    facts.extend(registry.facts())
    return FactStore.of(facts, m, registry)
