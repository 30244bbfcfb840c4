"""Conceptual graphs and the canonical formation rules.

Graphs are immutable.  Concept nodes and relation edges carry integer ids,
unique within one graph; every operation returns a new graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

from .diagnostics import Diagnostic, error, warning
from .ontology import Ontology, UnknownTypeError


@dataclass(frozen=True)
class Individual:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Generic:
    def __str__(self):
        return "*"


@dataclass(frozen=True)
class CorefVar:
    name: str

    def __str__(self):
        return f"*{self.name}"


Marker = Union[Individual, Generic, CorefVar]
GENERIC = Generic()


def parse_marker(text: str) -> Marker:
    """``*`` -> generic, ``*x`` -> coreference variable, anything else -> individual."""
    if text == "*":
        return GENERIC
    if text.startswith("*"):
        return CorefVar(text[1:])
    return Individual(text)


def is_generic(marker: Marker) -> bool:
    return not isinstance(marker, Individual)


@dataclass(frozen=True)
class ConceptNode:
    id: int
    ctype: str
    marker: Marker = GENERIC

    def __str__(self):
        return f"[{self.ctype}: {self.marker}]"


@dataclass(frozen=True)
class RelationEdge:
    id: int
    rtype: str
    args: tuple[int, ...]


class GraphError(ValueError):
    pass


class JoinError(GraphError):
    pass


@dataclass(frozen=True)
class ConceptualGraph:
    ontology: Ontology
    concepts: tuple[ConceptNode, ...] = ()
    relations: tuple[RelationEdge, ...] = ()
    name: str = "G"

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(sorted(self.concepts, key=lambda c: c.id)))
        object.__setattr__(self, "relations", tuple(sorted(self.relations, key=lambda r: r.id)))

    @classmethod
    def build(
        cls,
        ontology: Ontology,
        concepts: Sequence[tuple[str, str]] = (),
        relations: Sequence[tuple] = (),
        name: str = "G",
    ) -> "ConceptualGraph":
        """Shorthand constructor.

        ``concepts`` is a list of ``(type, marker-text)``; node ids are list
        positions.  ``relations`` is a list of ``(rtype, arg, arg, ...)``.
        """
        nodes = [ConceptNode(i, t, parse_marker(m)) for i, (t, m) in enumerate(concepts)]
        edges = [RelationEdge(i, r[0], tuple(r[1:])) for i, r in enumerate(relations)]
        return cls(ontology, tuple(nodes), tuple(edges), name)

    @cached_property
    def _concept_index(self) -> dict[int, ConceptNode]:
        return {c.id: c for c in self.concepts}

    @cached_property
    def _relation_index(self) -> dict[int, RelationEdge]:
        return {r.id: r for r in self.relations}

    def concept(self, cid: int) -> ConceptNode:
        try:
            return self._concept_index[cid]
        except KeyError:
            raise GraphError(f"no concept node {cid} in graph {self.name}") from None

    def relation(self, rid: int) -> RelationEdge:
        try:
            return self._relation_index[rid]
        except KeyError:
            raise GraphError(f"no relation edge {rid} in graph {self.name}") from None

    def has_concept(self, cid: int) -> bool:
        return cid in self._concept_index

    @property
    def is_empty(self) -> bool:
        return not self.concepts and not self.relations

    def next_concept_id(self) -> int:
        return max((c.id for c in self.concepts), default=-1) + 1

    def next_relation_id(self) -> int:
        return max((r.id for r in self.relations), default=-1) + 1

    def coref_vars(self) -> set[str]:
        return {c.marker.name for c in self.concepts if isinstance(c.marker, CorefVar)}

    def with_parts(self, concepts=None, relations=None) -> "ConceptualGraph":
        return ConceptualGraph(
            self.ontology,
            self.concepts if concepts is None else tuple(concepts),
            self.relations if relations is None else tuple(relations),
            self.name,
        )

    def canonical(self) -> "ConceptualGraph":
        """Renumber ids densely in their current order."""
        cmap = {c.id: i for i, c in enumerate(self.concepts)}
        return self.with_parts(
            [replace(c, id=cmap[c.id]) for c in self.concepts],
            [RelationEdge(i, r.rtype, tuple(cmap.get(a, a) for a in r.args))
             for i, r in enumerate(self.relations)],
        )

    def structurally_equal(self, other: "ConceptualGraph") -> bool:
        return self.canonical() == other.canonical()

    def subgraph(self, concept_ids: Iterable[int], relation_ids: Iterable[int]) -> "ConceptualGraph":
        cids, rids = set(concept_ids), set(relation_ids)
        for r in self.relations:
            if r.id in rids:
                cids.update(r.args)
        return self.with_parts(
            [c for c in self.concepts if c.id in cids],
            [r for r in self.relations if r.id in rids],
        )

    def __str__(self):
        from .frontio.serialize import serialize

        return serialize(self)


def _check_same_ontology(*graphs: ConceptualGraph):
    first = graphs[0].ontology
    for g in graphs[1:]:
        if g.ontology is not first and g.ontology != first:
            raise GraphError("graphs are governed by different lattices")


def _fresh_suffix(names: set[str], taken: set[str]) -> int:
    k = 1
    while any(f"{n}_{k}" in taken for n in names):
        k += 1
    return k


def relabel(
    g: ConceptualGraph,
    concept_offset: int,
    relation_offset: int,
    avoid_vars: set[str] = frozenset(),
) -> ConceptualGraph:
    """Shift ids and rename coreference variables that clash with ``avoid_vars``."""
    clash = g.coref_vars() & set(avoid_vars)
    rename: dict[str, str] = {}
    if clash:
        k = _fresh_suffix(clash, set(avoid_vars) | g.coref_vars())
        rename = {v: f"{v}_{k}" for v in clash}

    def marker(m):
        if isinstance(m, CorefVar) and m.name in rename:
            return CorefVar(rename[m.name])
        return m

    return g.with_parts(
        [ConceptNode(c.id + concept_offset, c.ctype, marker(c.marker)) for c in g.concepts],
        [RelationEdge(r.id + relation_offset, r.rtype, tuple(a + concept_offset for a in r.args))
         for r in g.relations],
    )


def disjoint_union(g1: ConceptualGraph, g2: ConceptualGraph) -> tuple[ConceptualGraph, int, int]:
    """Union with ``g2`` moved above ``g1``'s ids.  Returns the offsets used."""
    _check_same_ontology(g1, g2)
    co, ro = g1.next_concept_id(), g1.next_relation_id()
    moved = relabel(g2, co, ro, g1.coref_vars())
    union = g1.with_parts(g1.concepts + moved.concepts, g1.relations + moved.relations)
    return union, co, ro


def copy(g: ConceptualGraph) -> ConceptualGraph:
    """Isomorphic copy whose ids and coreference variables are disjoint from ``g``'s."""
    vars_ = g.coref_vars()
    out = relabel(g, g.next_concept_id(), g.next_relation_id(), vars_)
    return out


def _merged_type(g: ConceptualGraph, types: list[str]) -> str:
    lat = g.ontology.concepts
    current = types[0]
    for t in types[1:]:
        common = lat.max_common_subtypes(current, t)
        if not common:
            raise JoinError(f"types {current} and {t} have no common subtype")
        current = min(common)
    return current


def _merge_groups(g: ConceptualGraph, groups: Iterable[Iterable[int]]) -> ConceptualGraph:
    parent: dict[int, int] = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for group in groups:
        ids = list(group)
        for cid in ids:
            g.concept(cid)
        for other in ids[1:]:
            a, b = find(ids[0]), find(other)
            if a != b:
                parent[max(a, b)] = min(a, b)

    classes: dict[int, list[ConceptNode]] = {}
    for c in g.concepts:
        classes.setdefault(find(c.id), []).append(c)

    var_rename: dict[str, str] = {}
    merged: dict[int, ConceptNode] = {}
    for root, members in classes.items():
        if len(members) == 1:
            merged[root] = members[0]
            continue
        ctype = _merged_type(g, [m.ctype for m in members])
        individuals = {m.marker.name for m in members if isinstance(m.marker, Individual)}
        if len(individuals) > 1:
            raise JoinError(f"conflicting individual markers {sorted(individuals)}")
        corefs = [m.marker.name for m in members if isinstance(m.marker, CorefVar)]
        if individuals:
            marker: Marker = Individual(individuals.pop())
        elif corefs:
            marker = CorefVar(corefs[0])
        else:
            marker = GENERIC
        for v in corefs:
            if isinstance(marker, CorefVar) and v != marker.name:
                var_rename[v] = marker.name
        merged[root] = ConceptNode(root, ctype, marker)

    def fix(c: ConceptNode) -> ConceptNode:
        if isinstance(c.marker, CorefVar) and c.marker.name in var_rename:
            return replace(c, marker=CorefVar(var_rename[c.marker.name]))
        return c

    return g.with_parts(
        [fix(c) for c in merged.values()],
        [replace(r, args=tuple(find(a) for a in r.args)) for r in g.relations],
    )


def restrict(
    g: ConceptualGraph,
    node: int,
    new_type: str | None = None,
    new_marker: Marker | None = None,
) -> ConceptualGraph:
    """Specialise one concept node by type and/or by individual marker."""
    c = g.concept(node)
    lat = g.ontology.concepts
    nodes = {x.id: x for x in g.concepts}
    if new_type is not None:
        if new_type == c.ctype or not lat.is_subtype(new_type, c.ctype):
            raise GraphError(f"{new_type} is not a strict subtype of {c.ctype}")
        nodes[node] = replace(nodes[node], ctype=new_type)
    if new_marker is not None:
        if not isinstance(new_marker, Individual):
            raise GraphError("restriction can only introduce an individual marker")
        if isinstance(c.marker, Individual):
            raise GraphError(f"node {node} already carries individual {c.marker.name}")
        # coreferent nodes denote the same entity and are restricted together
        for x in g.concepts:
            if x.id == node or (isinstance(c.marker, CorefVar) and x.marker == c.marker):
                nodes[x.id] = replace(nodes[x.id], marker=new_marker)
    out = g.with_parts(nodes.values())
    for issue in signature_violations(out):
        raise GraphError(issue.message)
    return out


def simplify(g: ConceptualGraph) -> ConceptualGraph:
    """Drop duplicate relation edges (same type, same ordered arguments)."""
    seen: set[tuple] = set()
    keep = []
    for r in g.relations:
        key = (r.rtype, r.args)
        if key not in seen:
            seen.add(key)
            keep.append(r)
    return g.with_parts(relations=keep)


def join(
    g1: ConceptualGraph,
    g2: ConceptualGraph,
    pairs: Sequence[tuple[int, int]] = (),
) -> ConceptualGraph:
    """Disjoint union of ``g1`` and ``g2`` with each ``(n1, n2)`` pair merged.

    A merged node gets a maximal common subtype of both types (the
    lexicographically smallest when several exist); an individual marker
    wins over a coreference variable, which wins over a generic marker.
    Nodes of ``g1`` keep their ids.
    """
    for a, b in pairs:
        g1.concept(a)
        g2.concept(b)
    union, co, _ = disjoint_union(g1, g2)
    return _merge_groups(union, [(a, b + co) for a, b in pairs])


def normalize_coref(g: ConceptualGraph) -> ConceptualGraph:
    """Merge every set of nodes sharing a coreference variable into one node."""
    by_var: dict[str, list[int]] = {}
    for c in g.concepts:
        if isinstance(c.marker, CorefVar):
            by_var.setdefault(c.marker.name, []).append(c.id)
    groups = [ids for ids in by_var.values() if len(ids) > 1]
    if not groups:
        return g
    return _merge_groups(g, groups)


def signature_violations(g: ConceptualGraph) -> list[Diagnostic]:
    lat, rel = g.ontology
    out = []
    for r in g.relations:
        if r.rtype not in rel:
            continue
        sig = rel.signature[r.rtype]
        if len(sig) != len(r.args):
            continue
        for i, (a, t) in enumerate(zip(r.args, sig)):
            if not g.has_concept(a):
                continue
            ct = g.concept(a).ctype
            if ct in lat and not lat.is_subtype(ct, t):
                out.append(error(
                    "signature-violation",
                    f"argument {i} of ({r.rtype}) edge {r.id} is {ct}, expected a subtype of {t}",
                ))
    return out


@dataclass
class WellFormedReport:
    errors: list[Diagnostic] = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __iter__(self):
        yield from self.errors
        yield from self.warnings

    def __len__(self):
        return len(self.errors) + len(self.warnings)


def components(g: ConceptualGraph) -> list[set[int]]:
    parent = {c.id: c.id for c in g.concepts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in g.relations:
        args = [a for a in r.args if a in parent]
        for a in args[1:]:
            ra, rb = find(args[0]), find(a)
            if ra != rb:
                parent[rb] = ra
    comps: dict[int, set[int]] = {}
    for cid in parent:
        comps.setdefault(find(cid), set()).add(cid)
    return sorted(comps.values(), key=min)


def well_formed(g: ConceptualGraph) -> WellFormedReport:
    lat, rel = g.ontology
    report = WellFormedReport()
    ids = [c.id for c in g.concepts]
    if len(ids) != len(set(ids)):
        report.errors.append(error("duplicate-id", f"duplicate concept ids in {g.name}"))
    rids = [r.id for r in g.relations]
    if len(rids) != len(set(rids)):
        report.errors.append(error("duplicate-id", f"duplicate relation ids in {g.name}"))
    for c in g.concepts:
        if c.ctype not in lat:
            report.errors.append(error("unknown-type", f"node {c.id} has unknown concept type {c.ctype}"))
    for r in g.relations:
        if r.rtype not in rel:
            report.errors.append(error("unknown-relation", f"edge {r.id} has unknown relation type {r.rtype}"))
            continue
        for a in r.args:
            if not g.has_concept(a):
                report.errors.append(error("dangling-edge", f"edge {r.id} ({r.rtype}) references missing node {a}"))
        n = rel.arity(r.rtype)
        if n != len(r.args):
            report.errors.append(error(
                "arity-mismatch",
                f"edge {r.id} ({r.rtype}) has {len(r.args)} arguments, relation arity is {n}",
            ))
    report.errors.extend(signature_violations(g))
    if len(components(g)) > 1:
        report.warnings.append(warning("disconnected-graph", f"graph {g.name} is not connected"))
    return report
