"""Projection: graph morphisms from a pattern graph into a target graph.

A projection maps every pattern concept to a target concept whose type is
equal or more specific, and every pattern edge to a target edge of equal or
more specific relation type over the images of its arguments.  Individual
markers must map to the same individual; generic and coreference markers
map to anything.  Projections are not required to be injective.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .cgraph import ConceptualGraph, GraphError, Individual, is_generic


class LatticeMismatchError(GraphError):
    pass


@dataclass(frozen=True)
class Morphism:
    concept_map: Mapping[int, int]
    relation_map: Mapping[int, int]

    def key(self):
        return (tuple(sorted(self.concept_map.items())), tuple(sorted(self.relation_map.items())))

    def __hash__(self):
        return hash(self.key())

    def __getitem__(self, cid: int) -> int:
        return self.concept_map[cid]

    def compose(self, other: "Morphism") -> "Morphism":
        """``other`` after ``self``: pattern -> self.target -> other.target."""
        return Morphism(
            {k: other.concept_map[v] for k, v in self.concept_map.items()},
            {k: other.relation_map[v] for k, v in self.relation_map.items()},
        )

    def summary(self, pattern: ConceptualGraph | None = None, target: ConceptualGraph | None = None) -> str:
        parts = []
        for k, v in sorted(self.concept_map.items()):
            left = str(pattern.concept(k)) if pattern is not None else str(k)
            right = str(target.concept(v)) if target is not None else str(v)
            parts.append(f"{left}->{right}")
        return ",".join(parts)


def _check_lattices(pattern: ConceptualGraph, target: ConceptualGraph):
    if pattern.ontology is not target.ontology and pattern.ontology != target.ontology:
        raise LatticeMismatchError("pattern and target are governed by different lattices")


def concept_compatible(pattern: ConceptualGraph, pc: int, target: ConceptualGraph, tc: int) -> bool:
    p, t = pattern.concept(pc), target.concept(tc)
    lat = pattern.ontology.concepts
    if p.ctype not in lat or t.ctype not in lat or not lat.is_subtype(t.ctype, p.ctype):
        return False
    if isinstance(p.marker, Individual):
        return t.marker == p.marker
    return True


def relation_type_compatible(ontology, pattern_rtype: str, target_rtype: str) -> bool:
    rel = ontology.relations
    if pattern_rtype not in rel or target_rtype not in rel:
        return False
    return rel.is_subrelation(target_rtype, pattern_rtype)


def morphism_violations(m: Morphism, pattern: ConceptualGraph, target: ConceptualGraph) -> list[str]:
    """Every way ``m`` fails the type, marker and structure conditions."""
    out = []
    cmap, rmap = m.concept_map, m.relation_map
    if set(cmap) != {c.id for c in pattern.concepts}:
        out.append("concept map does not cover the pattern exactly")
    if set(rmap) != {r.id for r in pattern.relations}:
        out.append("relation map does not cover the pattern exactly")
    for pc, tc in cmap.items():
        if not pattern.has_concept(pc) or not target.has_concept(tc):
            out.append(f"concept {pc}->{tc} refers to a missing node")
        elif not concept_compatible(pattern, pc, target, tc):
            out.append(f"concept {pc}->{tc} violates the type or marker condition")
    for pr, tr in rmap.items():
        try:
            p, t = pattern.relation(pr), target.relation(tr)
        except GraphError:
            out.append(f"relation {pr}->{tr} refers to a missing edge")
            continue
        if not relation_type_compatible(pattern.ontology, p.rtype, t.rtype):
            out.append(f"relation {pr}->{tr} violates the type condition")
        if len(p.args) != len(t.args) or any(cmap.get(a) != b for a, b in zip(p.args, t.args)):
            out.append(f"relation {pr}->{tr} violates the structure condition")
    return out


def is_projection(m: Morphism, pattern: ConceptualGraph, target: ConceptualGraph) -> bool:
    return not morphism_violations(m, pattern, target)


class _Search:
    def __init__(self, pattern, target, fixed):
        self.pattern = pattern
        self.target = target
        onto = pattern.ontology
        self.by_args: dict[tuple[int, ...], list] = {}
        for e in target.relations:
            self.by_args.setdefault(e.args, []).append(e)
        self.rcompat = {}
        for r in pattern.relations:
            self.rcompat[r.id] = {
                e.id for e in target.relations
                if len(e.args) == len(r.args) and relation_type_compatible(onto, r.rtype, e.rtype)
            }
        self.incident: dict[int, list] = {c.id: [] for c in pattern.concepts}
        for r in pattern.relations:
            for a in set(r.args):
                if a not in self.incident:
                    raise GraphError(f"pattern edge {r.id} references missing node {a}")
                self.incident[a].append(r)

        self.candidates: dict[int, list[int]] = {}
        for c in pattern.concepts:
            allowed = [t.id for t in target.concepts if concept_compatible(pattern, c.id, target, t.id)]
            if fixed and c.id in fixed:
                allowed = [t for t in allowed if t == fixed[c.id]]
            allowed = [t for t in allowed if self._unary_ok(c.id, t)]
            self.candidates[c.id] = allowed
        # most-constrained first; ties by id
        self.order = sorted(self.candidates, key=lambda cid: (len(self.candidates[cid]), cid))

    def _unary_ok(self, pc: int, tc: int) -> bool:
        for r in self.incident[pc]:
            positions = [i for i, a in enumerate(r.args) if a == pc]
            if not any(
                all(e.args[i] == tc for i in positions)
                for e in self.target.relations
                if e.id in self.rcompat[r.id]
            ):
                return False
        return True

    def _edge_images(self, r, cmap) -> list[int]:
        args = tuple(cmap[a] for a in r.args)
        return [e.id for e in self.by_args.get(args, ()) if e.id in self.rcompat[r.id]]

    def run(self) -> Iterator[Morphism]:
        pattern = self.pattern
        if any(not self.candidates[c] for c in self.order):
            return
        cmap: dict[int, int] = {}
        assigned_edges_at: dict[int, list] = {}
        done: set[int] = set()
        for cid in self.order:
            done.add(cid)
            assigned_edges_at[cid] = [
                r for r in self.incident[cid] if all(a in done for a in r.args)
            ]

        def extend(depth: int) -> Iterator[dict[int, int]]:
            if depth == len(self.order):
                yield dict(cmap)
                return
            cid = self.order[depth]
            for tc in self.candidates[cid]:
                cmap[cid] = tc
                if all(self._edge_images(r, cmap) for r in assigned_edges_at[cid]):
                    yield from extend(depth + 1)
                del cmap[cid]

        edges = sorted(pattern.relations, key=lambda r: r.id)
        for full in extend(0):
            choices = [sorted(self._edge_images(r, full)) for r in edges]
            for combo in itertools.product(*choices):
                yield Morphism(full, {r.id: e for r, e in zip(edges, combo)})


def iter_projections(
    pattern: ConceptualGraph,
    target: ConceptualGraph,
    fixed: Mapping[int, int] | None = None,
) -> Iterator[Morphism]:
    """Lazily enumerate projections in deterministic order.

    ``fixed`` pins some pattern concepts to given target concepts.
    Results are ordered lexicographically by the search's visit order of
    pattern nodes, then by target node id, then by relation images.
    """
    _check_lattices(pattern, target)
    return _Search(pattern, target, fixed).run()


def find_projections(
    pattern: ConceptualGraph,
    target: ConceptualGraph,
    limit: int | None = None,
    fixed: Mapping[int, int] | None = None,
) -> list[Morphism]:
    it = iter_projections(pattern, target, fixed)
    if limit is not None:
        it = itertools.islice(it, limit)
    return list(it)


def exists_projection(
    pattern: ConceptualGraph,
    target: ConceptualGraph,
    fixed: Mapping[int, int] | None = None,
) -> bool:
    return next(iter_projections(pattern, target, fixed), None) is not None


def _shape(g: ConceptualGraph):
    def mk(c):
        return (c.ctype, "" if is_generic(c.marker) else c.marker.name)

    return (
        sorted(mk(c) for c in g.concepts),
        sorted((r.rtype, len(r.args)) for r in g.relations),
    )


def isomorphic(g1: ConceptualGraph, g2: ConceptualGraph) -> bool:
    """Equality up to node/edge ids and renaming of generic markers.

    A cheap multiset signature rejects most non-isomorphic pairs; the
    remaining cases search for a projection that is a bijection preserving
    exact types.
    """
    if len(g1.concepts) != len(g2.concepts) or len(g1.relations) != len(g2.relations):
        return False
    if _shape(g1) != _shape(g2):
        return False
    for m in iter_projections(g1, g2):
        if len(set(m.concept_map.values())) != len(g1.concepts):
            continue
        if len(set(m.relation_map.values())) != len(g1.relations):
            continue
        if any(g1.concept(a).ctype != g2.concept(b).ctype for a, b in m.concept_map.items()):
            continue
        if any(g1.concept(a).marker != g2.concept(b).marker
               for a, b in m.concept_map.items() if not is_generic(g1.concept(a).marker)):
            continue
        if any(g1.relation(a).rtype != g2.relation(b).rtype for a, b in m.relation_map.items()):
            continue
        if any(is_generic(g1.concept(a).marker) != is_generic(g2.concept(b).marker)
               for a, b in m.concept_map.items()):
            continue
        return True
    return False
