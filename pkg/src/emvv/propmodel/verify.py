"""Deciding properties: compilation to graph constraints and per-kind checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..cgraph import ConceptualGraph, normalize_coref, relabel
from ..projection import exists_projection, find_projections
from ..reasoning import (
    GraphRule,
    NegativeConstraint,
    PositiveConstraint,
    SATISFIED,
    Status,
    Verdict,
    check_constraint,
    saturate,
)
from .expr import And, Name, Not, Or, eval_expr, explain
from .facts import FactError, FactStore, ModelingVariable
from .model import Kind, Property, PropertyError, Sense


class UnbindableFactError(PropertyError):
    pass


class UnsupportedKindError(PropertyError):
    pass


@dataclass(frozen=True)
class Witness:
    """A non-graph witness: a time point, a value trace step, or a missing pattern."""

    kind: str
    detail: str
    time: float | None = None

    def __str__(self):
        at = f"@t={self.time:g}" if self.time is not None else ""
        return f"{self.kind}{at}:{self.detail}"


@dataclass
class Bundle:
    graph: ConceptualGraph
    store: FactStore = field(default_factory=FactStore)
    rules: Sequence[GraphRule] = ()
    bound: int = 100


def conjoin(graphs: Sequence[ConceptualGraph], template: ConceptualGraph | None = None) -> ConceptualGraph:
    """Union of patterns in which equal coreference variables denote one node."""
    if not graphs:
        if template is None:
            raise PropertyError("cannot build an empty pattern without an ontology")
        return template.with_parts((), ())
    out = graphs[0]
    for g in graphs[1:]:
        moved = relabel(g, out.next_concept_id(), out.next_relation_id())
        out = out.with_parts(out.concepts + moved.concepts, out.relations + moved.relations)
    return normalize_coref(out)


def _pattern(name: str, binding: Mapping[str, ConceptualGraph]) -> ConceptualGraph:
    try:
        return binding[name]
    except KeyError:
        raise UnbindableFactError(f"fact {name!r} has no graph-pattern binding") from None


def _disjuncts(expr, effects, binding) -> tuple[list[list[str]], bool]:
    """Effect expression as a list of conjunctions of fact names, plus a negation flag."""
    def conj(e) -> list[str]:
        if isinstance(e, Name):
            return [e.id]
        if isinstance(e, And) and all(isinstance(i, Name) for i in e.items):
            return [i.id for i in e.items]
        raise UnbindableFactError("graph effects must be a disjunction of conjunctions of bound facts")

    if expr is None:
        return [sorted(effects)], False
    if isinstance(expr, Not):
        return [conj(expr.item)], True
    if isinstance(expr, Or):
        return [conj(i) for i in expr.items], False
    return [conj(expr)], False


def compile_to_constraints(
    p: Property,
    binding: Mapping[str, ConceptualGraph] | None = None,
    *,
    allow_unbound_causes: bool = False,
) -> list[PositiveConstraint | NegativeConstraint]:
    """Implication -> one positive constraint; equivalence -> both directions.

    The condition is the conjunction of the cause patterns (empty when there
    are no causes).  A disjunctive effect expression yields one alternative
    per disjunct.  An effect of the form ``not f`` yields a negative
    constraint forbidding ``f``'s pattern.
    """
    binding = dict(p.bindings if binding is None else binding)
    if p.relation.kind not in (Kind.IMPLICATION, Kind.EQUIVALENCE):
        raise UnsupportedKindError(f"{p.relation.kind} properties do not compile to constraints")
    if not binding:
        raise UnbindableFactError(f"property {p.name} has no graph-pattern bindings")
    template = next(iter(binding.values()))

    bound_causes = sorted(c for c in p.causes if c in binding)
    unbound = sorted(set(p.causes) - set(binding))
    if unbound and not allow_unbound_causes:
        raise UnbindableFactError(f"cause fact(s) {unbound} have no graph-pattern binding")
    condition = conjoin([_pattern(c, binding) for c in bound_causes], template)

    disjuncts, negated = _disjuncts(p.relation.theta_e, p.effects, binding)
    alternatives = [conjoin([_pattern(f, binding) for f in d], template) for d in disjuncts]

    if negated:
        if p.relation.kind is Kind.EQUIVALENCE:
            raise UnsupportedKindError("an equivalence cannot have a negated effect")
        return [NegativeConstraint.from_graphs(p.name, condition, alternatives[0])]

    forward = PositiveConstraint.from_graphs(p.name, condition, alternatives)
    if p.relation.kind is Kind.IMPLICATION:
        return [forward]
    if len(alternatives) == 1:
        return [
            PositiveConstraint.from_graphs(f"{p.name}.forward", condition, alternatives),
            PositiveConstraint.from_graphs(f"{p.name}.backward", alternatives[0], [condition]),
        ]
    # (B or C) => A splits into B => A and C => A
    out = [PositiveConstraint.from_graphs(f"{p.name}.forward", condition, alternatives)]
    for i, alt in enumerate(alternatives, 1):
        out.append(PositiveConstraint.from_graphs(f"{p.name}.backward{i}", alt, [condition]))
    return out


def _gate(p: Property, store: FactStore) -> tuple[bool, list[str]]:
    env = {name: True for name in p.bindings}
    holds = eval_expr(p.relation.theta_c, store, None, env)
    if not isinstance(holds, bool):
        raise PropertyError(f"cause condition of {p.name} is not boolean")
    return holds, explain(p.relation.theta_c, store, None, env)


def _logical(p: Property, bundle: Bundle) -> Verdict:
    store = bundle.store
    bound_effects = [e for e in p.effects if e in p.bindings]
    has_unbound_causes = any(c not in p.bindings for c in p.causes)
    notes: list[str] = []
    if has_unbound_causes or not bound_effects:
        holds, calls = _gate(p, store)
        notes += calls
        if not bound_effects:
            effect = eval_expr(p.relation.theta_e, store)
            if p.relation.kind is Kind.IMPLICATION:
                ok = effect or not holds
            else:
                ok = holds == effect
            notes += explain(p.relation.theta_e, store)
            if ok:
                return Verdict(Status.SATISFIED, (), tuple(notes))
            return Verdict(Status.VIOLATED, (Witness("value", "; ".join(notes) or "effect is false"),), tuple(notes))
        if not holds:
            return Verdict(Status.SATISFIED, (), tuple(notes + ["cause condition is false; holds vacuously"]))

    constraints = compile_to_constraints(p, allow_unbound_causes=True)
    graph, _ = saturate(bundle.graph, bundle.rules, bundle.bound) if bundle.rules else (bundle.graph, None)
    witnesses: list = []
    for c in constraints:
        v = check_constraint(graph, c)
        witnesses.extend(v.witnesses)
        notes.extend(v.notes)
    if witnesses:
        return Verdict(Status.VIOLATED, witnesses, tuple(notes))
    return Verdict(Status.SATISFIED, (), tuple(notes))


def _temporal(p: Property, store: FactStore) -> Verdict:
    times = store.horizon()
    if not times:
        raise PropertyError(f"temporal property {p.name} needs time-indexed facts")
    theta_c, theta_e = p.relation.theta_c, p.relation.theta_e
    effect_at = {t: eval_expr(theta_e, store, t) for t in times}
    witnesses = []
    for i, t in enumerate(times):
        if not eval_expr(theta_c, store, t):
            continue
        if not any(effect_at[u] for u in times[i:]):
            witnesses.append(Witness(
                "temporal", f"cause holds but no effect at or after it within [{times[0]:g}, {times[-1]:g}]"
                " (insufficient horizon)", t))
    if witnesses:
        return Verdict(Status.VIOLATED, witnesses)
    return SATISFIED


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _influence(p: Property, store: FactStore) -> Verdict:
    def variable(name):
        fact = store[name]
        if not isinstance(fact, ModelingVariable):
            raise PropertyError(f"influence property {p.name}: {name} is not a modeling variable")
        return fact

    causes = [variable(c) for c in sorted(p.causes)]
    effects = [variable(e) for e in sorted(p.effects)]
    if not causes:
        raise PropertyError(f"influence property {p.name} needs at least one cause")
    times = store.horizon()
    flip = 1 if p.relation.sense is Sense.BENEFICIAL else -1
    witnesses = []
    for t0, t1 in zip(times, times[1:]):
        if p.relation.theta_c is not None and not eval_expr(p.relation.theta_c, store, t0):
            continue
        for c in causes:
            try:
                dc = _sign(c.at(t1) - c.at(t0))
            except FactError:
                continue
            if dc == 0:
                continue
            for e in effects:
                de = _sign(e.at(t1) - e.at(t0))
                if de != flip * dc:
                    witnesses.append(Witness(
                        "influence", f"{c.name} {'rises' if dc > 0 else 'falls'} but {e.name} "
                        f"{'rises' if de > 0 else 'falls' if de < 0 else 'is unchanged'}", t1))
    if witnesses:
        return Verdict(Status.VIOLATED, witnesses)
    return SATISFIED


def _emergence(p: Property, bundle: Bundle) -> Verdict:
    disjuncts, negated = _disjuncts(p.relation.theta_e, p.effects, p.bindings)
    if negated:
        raise UnsupportedKindError("an emergent effect cannot be negated")
    template = bundle.graph
    patterns = [conjoin([_pattern(f, p.bindings) for f in d], template) for d in disjuncts]
    before = [m for pat in patterns for m in find_projections(pat, bundle.graph, limit=1)]
    if before:
        return Verdict(Status.VIOLATED, before, ("effect is already present in the initial model",))
    after, report = saturate(bundle.graph, bundle.rules, bundle.bound)
    found = [m for pat in patterns for m in find_projections(pat, after, limit=1)]
    if not found:
        note = "effect does not emerge" + ("" if report.reached_fixpoint else " within the saturation bound")
        return Verdict(Status.VIOLATED, (Witness("emergence", note),), (note,))
    return Verdict(Status.SATISFIED, tuple(found), (f"emerges after {report.iterations} pass(es)",))


def verify_property(p: Property, bundle: Bundle) -> Verdict:
    kind = p.relation.kind
    if kind in (Kind.IMPLICATION, Kind.EQUIVALENCE):
        return _logical(p, bundle)
    if kind is Kind.TEMPORAL:
        return _temporal(p, bundle.store)
    if kind is Kind.INFLUENCE:
        return _influence(p, bundle.store)
    return _emergence(p, bundle)
