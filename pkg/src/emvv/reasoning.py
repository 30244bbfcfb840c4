"""Graph rules, saturation, positive/negative constraints and refutation proofs."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .cgraph import (
    ConceptualGraph,
    CorefVar,
    GraphError,
    Individual,
    _check_same_ontology,
    _merge_groups,
    disjoint_union,
    join,
)
from .projection import (
    Morphism,
    exists_projection,
    find_projections,
    is_projection,
    iter_projections,
    morphism_violations,
)

log = logging.getLogger(__name__)


class Status(str, enum.Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"

    def __str__(self):
        return self.value


class Outcome(str, enum.Enum):
    CONTRADICTION = "ContradictionEstablished"
    NO_CONTRADICTION = "NoContradiction"
    BOUND_REACHED = "BoundReached"

    def __str__(self):
        return self.value


def shared_var_frontier(g1: ConceptualGraph, g2: ConceptualGraph) -> list[tuple[int, int]]:
    """Pairs of nodes of ``g1`` and ``g2`` carrying the same coreference variable."""
    pairs = []
    for a in g1.concepts:
        if not isinstance(a.marker, CorefVar):
            continue
        for b in g2.concepts:
            if b.marker == a.marker:
                pairs.append((a.id, b.id))
    return pairs


def _check_frontier(left: ConceptualGraph, right: ConceptualGraph, frontier, what: str):
    lat = left.ontology.concepts
    for a, b in frontier:
        if not left.has_concept(a) or not right.has_concept(b):
            raise GraphError(f"{what}: frontier pair ({a}, {b}) references a missing node")
        ta, tb = left.concept(a).ctype, right.concept(b).ctype
        if what.startswith("rule") and not (lat.is_subtype(ta, tb) or lat.is_subtype(tb, ta)):
            raise GraphError(f"{what}: frontier types {ta} and {tb} are incomparable")


@dataclass(frozen=True)
class GraphRule:
    name: str
    hypothesis: ConceptualGraph
    conclusion: ConceptualGraph
    frontier: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frontier", tuple(tuple(p) for p in self.frontier))
        _check_same_ontology(self.hypothesis, self.conclusion)
        _check_frontier(self.hypothesis, self.conclusion, self.frontier, f"rule {self.name}")

    @classmethod
    def from_graphs(cls, name: str, hypothesis: ConceptualGraph, conclusion: ConceptualGraph) -> "GraphRule":
        return cls(name, hypothesis, conclusion, tuple(shared_var_frontier(hypothesis, conclusion)))

    def canonical(self) -> "GraphRule":
        hmap = {c.id: i for i, c in enumerate(self.hypothesis.concepts)}
        cmap = {c.id: i for i, c in enumerate(self.conclusion.concepts)}
        return GraphRule(
            self.name,
            self.hypothesis.canonical(),
            self.conclusion.canonical(),
            tuple(sorted((hmap[a], cmap[b]) for a, b in self.frontier)),
        )


@dataclass(frozen=True)
class Alternative:
    """One mandatory graph of a constraint, glued to the condition by ``frontier``."""

    graph: ConceptualGraph
    frontier: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frontier", tuple(tuple(p) for p in self.frontier))


def _whole(condition: ConceptualGraph, alt: Alternative) -> ConceptualGraph:
    # condition node ids survive the join unchanged
    return join(condition, alt.graph, alt.frontier)


def _canonical_alt(condition: ConceptualGraph, alt: Alternative) -> Alternative:
    cmap = {c.id: i for i, c in enumerate(condition.concepts)}
    amap = {c.id: i for i, c in enumerate(alt.graph.concepts)}
    return Alternative(alt.graph.canonical(), tuple(sorted((cmap[a], amap[b]) for a, b in alt.frontier)))


@dataclass(frozen=True)
class PositiveConstraint:
    name: str
    condition: ConceptualGraph
    alternatives: tuple[Alternative, ...]

    def __post_init__(self):
        alts = tuple(a if isinstance(a, Alternative) else Alternative(a) for a in self.alternatives)
        if not alts:
            raise GraphError(f"positive constraint {self.name} needs at least one alternative")
        object.__setattr__(self, "alternatives", alts)
        for a in alts:
            _check_same_ontology(self.condition, a.graph)
            _check_frontier(self.condition, a.graph, a.frontier, f"constraint {self.name}")

    @classmethod
    def from_graphs(cls, name, condition, alternatives: Iterable[ConceptualGraph]):
        return cls(name, condition, tuple(
            Alternative(g, tuple(shared_var_frontier(condition, g))) for g in alternatives
        ))

    def wholes(self) -> list[ConceptualGraph]:
        return [_whole(self.condition, a) for a in self.alternatives]

    def canonical(self) -> "PositiveConstraint":
        return PositiveConstraint(
            self.name, self.condition.canonical(),
            tuple(_canonical_alt(self.condition, a) for a in self.alternatives),
        )


@dataclass(frozen=True)
class NegativeConstraint:
    name: str
    condition: ConceptualGraph
    mandatory: ConceptualGraph
    frontier: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frontier", tuple(tuple(p) for p in self.frontier))
        _check_same_ontology(self.condition, self.mandatory)
        _check_frontier(self.condition, self.mandatory, self.frontier, f"constraint {self.name}")

    @classmethod
    def from_graphs(cls, name, condition, mandatory):
        return cls(name, condition, mandatory, tuple(shared_var_frontier(condition, mandatory)))

    def whole(self) -> ConceptualGraph:
        return _whole(self.condition, Alternative(self.mandatory, self.frontier))

    def canonical(self) -> "NegativeConstraint":
        alt = _canonical_alt(self.condition, Alternative(self.mandatory, self.frontier))
        return NegativeConstraint(self.name, self.condition.canonical(), alt.graph, alt.frontier)


Constraint = Union[PositiveConstraint, NegativeConstraint]


@dataclass(frozen=True)
class Verdict:
    status: Status
    witnesses: tuple = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        object.__setattr__(self, "notes", tuple(self.notes))
        if self.status is Status.VIOLATED and not self.witnesses:
            raise ValueError("a violated verdict needs at least one witness")

    @property
    def satisfied(self) -> bool:
        return self.status is Status.SATISFIED


SATISFIED = Verdict(Status.SATISFIED)


@dataclass(frozen=True)
class RuleApplication:
    """One rule firing: where it matched and what it added."""

    rule: str
    morphism: Morphism
    added_concepts: tuple[int, ...]
    added_relations: tuple[int, ...]
    iteration: int
    graph: ConceptualGraph = field(repr=False, compare=False)

    @property
    def fragment(self) -> ConceptualGraph:
        return self.graph.subgraph(self.added_concepts, self.added_relations)

    def describe(self, hypothesis: ConceptualGraph | None = None) -> str:
        from .frontio.serialize import serialize_body

        binding = self.morphism.summary(hypothesis, self.graph)
        return f"{self.rule} at {{{binding}}} added {{ {serialize_body(self.fragment)} }}"


@dataclass
class SaturationReport:
    iterations: int
    added: list[RuleApplication]
    reached_fixpoint: bool


@dataclass
class ProofResult:
    outcome: Outcome
    trace: list[RuleApplication]
    violated_constraint: str | None = None
    verdict: Verdict | None = None
    final_graph: ConceptualGraph | None = None
    # constraints are checked on the start graph and after every rule firing
    strategy: str = "check-after-each-application"

    def __post_init__(self):
        if self.outcome is Outcome.CONTRADICTION and self.violated_constraint is None:
            raise ValueError("a contradiction must name the violated constraint")


def _apply(rule: GraphRule, g: ConceptualGraph, m: Morphism, iteration: int = 0):
    union, co, ro = disjoint_union(g, rule.conclusion)
    groups = [(m.concept_map[h], c + co) for h, c in rule.frontier]
    # a concluded individual is the same entity as an existing node with that name
    lat = g.ontology.concepts
    frontier_c = {c for _, c in rule.frontier}
    # type each existing node will end up with, so merges never become unsatisfiable
    acc = {m.concept_map[h]: g.concept(m.concept_map[h]).ctype for h, _ in rule.frontier}
    for c in rule.conclusion.concepts:
        if c.id in frontier_c or not isinstance(c.marker, Individual):
            continue
        for x in g.concepts:
            if x.marker != c.marker:
                continue
            if not (lat.is_subtype(x.ctype, c.ctype) or lat.is_subtype(c.ctype, x.ctype)):
                continue
            common = lat.max_common_subtypes(acc.get(x.id, x.ctype), c.ctype)
            if common:
                acc[x.id] = min(common)
                groups.append((x.id, c.id + co))
                break
    merged = _merge_groups(union, groups)
    frontier_new = {c + co for _, c in rule.frontier}
    added_c = tuple(c.id for c in merged.concepts if c.id >= co and c.id not in frontier_new)
    added_r = tuple(r.id for r in merged.relations if r.id >= ro)
    return merged, RuleApplication(rule.name, m, added_c, added_r, iteration, merged)


def apply_rule_at(rule: GraphRule, g: ConceptualGraph, m: Morphism) -> ConceptualGraph:
    """Add a fresh copy of the rule's conclusion, gluing frontier nodes onto ``m``'s images."""
    problems = morphism_violations(m, rule.hypothesis, g)
    if problems:
        raise GraphError(f"invalid morphism for rule {rule.name}: {problems[0]}")
    return _apply(rule, g, m)[0]


def _redundant(rule: GraphRule, g: ConceptualGraph, m: Morphism) -> bool:
    fixed = {}
    for h, c in rule.frontier:
        target = m.concept_map[h]
        if fixed.get(c, target) != target:
            return False
        fixed[c] = target
    return exists_projection(rule.conclusion, g, fixed)


def _one_pass(g, rules, iteration, on_step=None):
    """Fire every rule at every projection into the pass's start graph."""
    added: list[RuleApplication] = []
    for rule in rules:
        for m in find_projections(rule.hypothesis, g):
            if not is_projection(m, rule.hypothesis, g):
                continue
            if _redundant(rule, g, m):
                continue
            g, step = _apply(rule, g, m, iteration)
            added.append(step)
            log.debug("pass %d: %s", iteration, step.rule)
            if on_step is not None and on_step(g, step):
                return g, added, True
    return g, added, False


def saturate(
    g: ConceptualGraph,
    rules: Sequence[GraphRule],
    max_iterations: int = 100,
) -> tuple[ConceptualGraph, SaturationReport]:
    """Forward-chain ``rules`` until nothing new can be added or the bound is hit.

    An application is skipped when its conclusion, glued at the matched
    frontier, already projects into the current graph.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    added: list[RuleApplication] = []
    for i in range(1, max_iterations + 1):
        g, new, _ = _one_pass(g, rules, i)
        added.extend(new)
        if not new:
            return g, SaturationReport(i, added, True)
    return g, SaturationReport(max_iterations, added, False)


def check_positive(g: ConceptualGraph, pc: PositiveConstraint) -> Verdict:
    """Every condition projection must extend to some whole alternative."""
    wholes = pc.wholes()
    failed = []
    for m in iter_projections(pc.condition, g):
        if not any(exists_projection(w, g, fixed=m.concept_map) for w in wholes):
            failed.append(m)
    if failed:
        return Verdict(Status.VIOLATED, failed,
                       (f"{len(failed)} occurrence(s) of the condition of {pc.name} cannot be extended",))
    return SATISFIED


def check_negative(g: ConceptualGraph, nc: NegativeConstraint) -> Verdict:
    """No condition projection may extend to the whole constraint."""
    whole = nc.whole()
    found = []
    for m in iter_projections(nc.condition, g):
        ext = find_projections(whole, g, limit=1, fixed=m.concept_map)
        if ext:
            found.append(ext[0])
    if found:
        return Verdict(Status.VIOLATED, found,
                       (f"forbidden pattern of {nc.name} occurs {len(found)} time(s)",))
    return SATISFIED


def check_constraint(g: ConceptualGraph, c: Constraint) -> Verdict:
    if isinstance(c, PositiveConstraint):
        return check_positive(g, c)
    return check_negative(g, c)


@dataclass
class VerificationReport:
    entries: list[tuple[str, Verdict]]

    @property
    def status(self) -> Status:
        if all(v.satisfied for _, v in self.entries):
            return Status.SATISFIED
        return Status.VIOLATED

    @property
    def satisfied(self) -> bool:
        return self.status is Status.SATISFIED


def verify_all(g: ConceptualGraph, constraints: Iterable[Constraint]) -> VerificationReport:
    return VerificationReport([(c.name, check_constraint(g, c)) for c in constraints])


def _first_violation(g, negs):
    for nc in negs:
        v = check_negative(g, nc)
        if not v.satisfied:
            return nc, v
    return None


def prove_refutation(
    g: ConceptualGraph,
    rules: Sequence[GraphRule],
    negs: Sequence[NegativeConstraint],
    bound: int = 100,
) -> ProofResult:
    """Reductio: derive consequences of ``g`` until a negative constraint breaks."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    hit = _first_violation(g, negs)
    if hit:
        return ProofResult(Outcome.CONTRADICTION, [], hit[0].name, hit[1], g)

    trace: list[RuleApplication] = []
    found: list = []

    def on_step(current, step):
        trace.append(step)
        violation = _first_violation(current, negs)
        if violation:
            found.append(violation)
            return True
        return False

    for i in range(1, bound + 1):
        g, new, stopped = _one_pass(g, rules, i, on_step)
        if stopped:
            nc, verdict = found[0]
            return ProofResult(Outcome.CONTRADICTION, trace, nc.name, verdict, g)
        if not new:
            return ProofResult(Outcome.NO_CONTRADICTION, trace, final_graph=g)
    return ProofResult(Outcome.BOUND_REACHED, trace, final_graph=g)
