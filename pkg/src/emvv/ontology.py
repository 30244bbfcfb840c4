"""Concept and relation type lattices.

A lattice here is a DAG of types under a single top type.  Greatest lower
bounds are not assumed to be unique, so :func:`max_common_subtypes` returns a
set.  There is no bottom type.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from typing import Iterable, Mapping, NamedTuple

TOP = "Universal"
ROOT_CATEGORIES = ("AbstractType", "BehavioralType", "ModelingType", "EntityType")


class OntologyError(ValueError):
    pass


class UnknownTypeError(OntologyError):
    def __init__(self, name: str, what: str = "concept type"):
        super().__init__(f"unknown {what} {name!r}")
        self.name = name


class CycleError(OntologyError):
    def __init__(self, cycle: list[str], what: str = "concept"):
        super().__init__(f"{what} hierarchy has a cycle: " + " < ".join(cycle))
        self.cycle = cycle


class RelationNameCollision(UserWarning):
    pass


def _find_cycle(nodes: Iterable[str], parents: Mapping[str, tuple[str, ...]]):
    white, grey, black = 0, 1, 2
    colour = {n: white for n in nodes}
    stack: list[str] = []

    def visit(n):
        colour[n] = grey
        stack.append(n)
        for p in parents.get(n, ()):
            if colour.get(p, black) == grey:
                return stack[stack.index(p):] + [p]
            if colour.get(p) == white:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        colour[n] = black
        return None

    for n in sorted(colour):
        if colour[n] == white:
            found = visit(n)
            if found:
                return found
    return None


def _parent_map(edges: Iterable[tuple[str, str]]) -> dict[str, tuple[str, ...]]:
    out: dict[str, list[str]] = {}
    for child, parent in edges:
        out.setdefault(child, []).append(parent)
    return {k: tuple(sorted(set(v))) for k, v in out.items()}


def _closure(nodes, parents) -> dict[str, frozenset[str]]:
    memo: dict[str, frozenset[str]] = {}

    def up(n):
        if n not in memo:
            acc = {n}
            for p in parents.get(n, ()):
                acc |= up(p)
            memo[n] = frozenset(acc)
        return memo[n]

    for n in nodes:
        up(n)
    return memo


@dataclass(frozen=True)
class ConceptLattice:
    types: frozenset[str]
    subtype_edges: frozenset[tuple[str, str]] = frozenset()
    top: str = TOP

    def __post_init__(self):
        object.__setattr__(self, "types", frozenset(self.types) | {self.top})
        object.__setattr__(self, "subtype_edges", frozenset(self.subtype_edges))
        for child, parent in self.subtype_edges:
            for t in (child, parent):
                if t not in self.types:
                    raise UnknownTypeError(t)
        cycle = _find_cycle(self.types, self._parents)
        if cycle:
            raise CycleError(cycle)
        if self._parents.get(self.top):
            raise OntologyError(f"top type {self.top!r} cannot have a parent")

    @cached_property
    def _parents(self) -> dict[str, tuple[str, ...]]:
        explicit = _parent_map(self.subtype_edges)
        # types without a declared parent hang directly under top
        return {t: explicit.get(t, () if t == self.top else (self.top,)) for t in self.types}

    @cached_property
    def _ancestors(self) -> dict[str, frozenset[str]]:
        return _closure(self.types, self._parents)

    @cached_property
    def _descendants(self) -> dict[str, frozenset[str]]:
        down: dict[str, set[str]] = {t: set() for t in self.types}
        for t, ups in self._ancestors.items():
            for u in ups:
                down[u].add(t)
        return {t: frozenset(v) for t, v in down.items()}

    def parents(self, t: str) -> tuple[str, ...]:
        self._check(t)
        return self._parents[t]

    def ancestors(self, t: str) -> frozenset[str]:
        self._check(t)
        return self._ancestors[t]

    def descendants(self, t: str) -> frozenset[str]:
        self._check(t)
        return self._descendants[t]

    def _check(self, t: str):
        if t not in self.types:
            raise UnknownTypeError(t)

    def __contains__(self, t: str) -> bool:
        return t in self.types

    def is_subtype(self, a: str, b: str) -> bool:
        self._check(b)
        return b in self.ancestors(a)

    def max_common_subtypes(self, a: str, b: str) -> frozenset[str]:
        common = self.descendants(a) & self.descendants(b)
        return frozenset(
            t for t in common
            if not any(u != t and t in self._descendants[u] for u in common)
        )


@dataclass(frozen=True)
class RelationLattice:
    relations: frozenset[str]
    signature: Mapping[str, tuple[str, ...]]
    subtype_edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "relations", frozenset(self.relations))
        object.__setattr__(self, "signature", {r: tuple(s) for r, s in self.signature.items()})
        object.__setattr__(self, "subtype_edges", frozenset(self.subtype_edges))
        for r in self.relations:
            if r not in self.signature:
                raise OntologyError(f"relation {r!r} has no signature")
        for child, parent in self.subtype_edges:
            for r in (child, parent):
                if r not in self.relations:
                    raise UnknownTypeError(r, "relation type")
        cycle = _find_cycle(self.relations, self._parents)
        if cycle:
            raise CycleError(cycle, "relation")

    @cached_property
    def _parents(self) -> dict[str, tuple[str, ...]]:
        return _parent_map(self.subtype_edges)

    @cached_property
    def _ancestors(self) -> dict[str, frozenset[str]]:
        return _closure(self.relations, self._parents)

    def __contains__(self, r: str) -> bool:
        return r in self.relations

    def arity(self, r: str) -> int:
        if r not in self.relations:
            raise UnknownTypeError(r, "relation type")
        return len(self.signature[r])

    def is_subrelation(self, r: str, s: str) -> bool:
        if r not in self.relations:
            raise UnknownTypeError(r, "relation type")
        if s not in self.relations:
            raise UnknownTypeError(s, "relation type")
        return s in self._ancestors[r]

    def validate_against(self, concepts: ConceptLattice):
        for r in sorted(self.relations):
            for t in self.signature[r]:
                if t not in concepts:
                    raise UnknownTypeError(t, f"concept type in signature of {r}")
        for child, parent in sorted(self.subtype_edges):
            cs, ps = self.signature[child], self.signature[parent]
            if len(cs) != len(ps):
                raise OntologyError(
                    f"relation {child!r} has arity {len(cs)} but its parent {parent!r} has {len(ps)}"
                )
            for i, (a, b) in enumerate(zip(cs, ps)):
                if not concepts.is_subtype(a, b):
                    raise OntologyError(
                        f"argument {i} of {child!r} ({a}) is not a subtype of "
                        f"argument {i} of {parent!r} ({b})"
                    )


class Ontology(NamedTuple):
    """The (concept lattice, relation lattice) pair governing a set of graphs."""

    concepts: ConceptLattice
    relations: RelationLattice

    def validate(self) -> "Ontology":
        self.relations.validate_against(self.concepts)
        return self


def make_ontology(
    concepts: Mapping[str, Iterable[str]],
    relations: Mapping[str, tuple[Iterable[str], Iterable[str]]] = {},
    top: str = TOP,
) -> Ontology:
    """Build an ontology from ``{type: parents}`` and ``{rel: (signature, parents)}``."""
    cl = ConceptLattice(
        frozenset(concepts),
        frozenset((c, p) for c, ps in concepts.items() for p in ps),
        top,
    )
    rl = RelationLattice(
        frozenset(relations),
        {r: tuple(sig) for r, (sig, _) in relations.items()},
        frozenset((r, p) for r, (_, ps) in relations.items() for p in ps),
    )
    return Ontology(cl, rl).validate()


def is_subtype(lat: ConceptLattice, a: str, b: str) -> bool:
    return lat.is_subtype(a, b)


def max_common_subtypes(lat: ConceptLattice, a: str, b: str) -> frozenset[str]:
    return lat.max_common_subtypes(a, b)


def load_lattices(text: str, file: str = "<string>") -> Ontology:
    """Parse an ontology file.  Raises ``DiagnosticError`` on bad input."""
    from .frontio.parser import parse_ontology

    return parse_ontology(text, file)


@lru_cache(maxsize=None)
def reference_ontology() -> Ontology:
    text = resources.files("emvv").joinpath("data/reference.ont").read_text("utf-8")
    return load_lattices(text, "reference.ont")


@dataclass(frozen=True)
class ObjectModel:
    classes: frozenset[str] = frozenset()
    inheritance: frozenset[tuple[str, str]] = frozenset()
    attributes: tuple[tuple[str, str, str], ...] = ()
    associations: tuple[tuple[str, str, str], ...] = ()
    methods: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        known = set(self.classes)
        refs = [c for pair in self.inheritance for c in pair]
        refs += [owner for owner, _, _ in self.attributes]
        refs += [c for _, s, t in self.associations for c in (s, t)]
        refs += [owner for owner, _ in self.methods]
        for c in refs:
            if c not in known:
                raise UnknownTypeError(c, "class")
        cycle = _find_cycle(known, _parent_map(self.inheritance))
        if cycle:
            raise CycleError(cycle, "inheritance")


def derive_lattices(om: ObjectModel, top: str = TOP) -> Ontology:
    """Translate an object model into lattices.

    Classes become concept types and inheritance the concept hierarchy.
    Attributes, associations and methods each become a binary relation.
    Attribute value classes that are not themselves declared classes are
    added as concept types directly under top.  Methods have no target
    class, so their second argument is top.
    """
    types = set(om.classes) | {v for _, _, v in om.attributes} | {top}
    edges = {(c, p) for c, p in om.inheritance}
    concepts = ConceptLattice(frozenset(types), frozenset(edges), top)

    wanted: list[tuple[str, tuple[str, str]]] = []
    wanted += [(name, (owner, value)) for owner, name, value in om.attributes]
    wanted += [(name, (src, dst)) for name, src, dst in om.associations]
    wanted += [(name, (owner, top)) for owner, name in om.methods]

    signature: dict[str, tuple[str, str]] = {}
    for name, sig in wanted:
        if name in signature and signature[name] == sig:
            continue
        final, n = name, 2
        while final in signature:
            final, n = f"{name}_{n}", n + 1
        if final != name:
            warnings.warn(
                f"relation {name!r}{sig} collides with an earlier relation; renamed to {final!r}",
                RelationNameCollision,
                stacklevel=2,
            )
        signature[final] = sig
    relations = RelationLattice(frozenset(signature), signature)
    return Ontology(concepts, relations).validate()
