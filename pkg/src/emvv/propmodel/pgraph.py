"""The property graph: properties placed on target, typology and time axes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..reasoning import Status, Verdict
from .facts import PropertyRef
from .model import Placement, Property, PropertyError
from .verify import Bundle, verify_property


@dataclass(frozen=True)
class Arc:
    cause: frozenset[str]
    effect: frozenset[str]
    kind: str
    property: str


@dataclass(frozen=True)
class PropertyGraph:
    nodes: tuple[frozenset[str], ...] = ()
    arcs: tuple[Arc, ...] = ()
    properties: Mapping[str, Property] = field(default_factory=dict)
    placements: Mapping[str, Placement] = field(default_factory=dict)

    def __post_init__(self):
        for arc in self.arcs:
            if arc.cause not in self.nodes or arc.effect not in self.nodes:
                raise PropertyError(f"arc of {arc.property} points at an unknown fact set")
        if set(self.properties) != set(self.placements):
            raise PropertyError("every property must be placed on all three axes")

    def __len__(self):
        return len(self.properties)

    def strata(self) -> dict[str, list[str]]:
        """Property names per target level."""
        out: dict[str, list[str]] = {}
        for name, pl in sorted(self.placements.items()):
            out.setdefault(pl.target, []).append(name)
        return out


def place(pgraph: PropertyGraph, p: Property, coords: Placement | None = None) -> PropertyGraph:
    if p.name in pgraph.properties:
        raise PropertyError(f"property {p.name} is already placed")
    coords = coords or p.placement or Placement()
    nodes = list(pgraph.nodes)
    for fs in (p.causes, p.effects):
        if fs not in nodes:
            nodes.append(fs)
    return PropertyGraph(
        tuple(nodes),
        pgraph.arcs + (Arc(p.causes, p.effects, str(p.relation.kind), p.name),),
        {**pgraph.properties, p.name: p},
        {**pgraph.placements, p.name: coords},
    )


@dataclass
class PropertyGraphReport:
    entries: list[tuple[str, Placement, Verdict]]

    @property
    def status(self) -> Status:
        if all(v.satisfied for _, _, v in self.entries):
            return Status.SATISFIED
        return Status.VIOLATED

    def grouped(self) -> dict[Placement, list[tuple[str, Verdict]]]:
        out: dict[Placement, list[tuple[str, Verdict]]] = {}
        for name, pl, v in self.entries:
            out.setdefault(pl, []).append((name, v))
        return out


def unresolved_facts(p: Property, bundle: Bundle) -> list[str]:
    store = bundle.store
    registry = store.registry
    known = set(store.facts) | set(p.bindings) | (set(registry) if registry is not None else set())
    return sorted(f for f in p.causes | p.effects if f not in known)


def check_property_graph(pgraph: PropertyGraph, bundle: Bundle) -> PropertyGraphReport:
    """Verify every placed property; trusted properties are taken as axioms."""
    trusted = {n for n, f in bundle.store.facts.items() if isinstance(f, PropertyRef)}
    entries = []
    for name in sorted(pgraph.properties):
        p = pgraph.properties[name]
        missing = unresolved_facts(p, bundle)
        if missing:
            raise PropertyError(f"property {name} refers to unresolvable fact(s) {missing}")
        if name in trusted:
            verdict = Verdict(Status.SATISFIED, (), ("trusted property, not re-proved",))
        else:
            verdict = verify_property(p, bundle)
        entries.append((name, pgraph.placements[name], verdict))
    return PropertyGraphReport(entries)
