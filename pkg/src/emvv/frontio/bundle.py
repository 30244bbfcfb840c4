"""Loading a set of files as one cross-validated bundle."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

from ..cgraph import ConceptualGraph
from ..diagnostics import Diagnostic, Location, error, has_errors, sort_diagnostics
from ..ingest import EnterpriseModel, HandleFunctionRegistry, MissingCounterpartError, extract_facts, model_to_cg
from ..ontology import Ontology
from ..propmodel.facts import FactError, FactStore
from ..propmodel.model import GenericProperty, Granularity, Property
from ..propmodel.pgraph import unresolved_facts
from ..propmodel.verify import Bundle
from ..reasoning import GraphRule
from .parser import elaborate
from .syntax import parse_syntax


@dataclass
class ParsedBundle:
    ontology: Ontology | None = None
    graphs: list[ConceptualGraph] = field(default_factory=list)
    rules: list[GraphRule] = field(default_factory=list)
    constraints: list = field(default_factory=list)
    properties: list[Property] = field(default_factory=list)
    generics: list[GenericProperty] = field(default_factory=list)
    granularities: list[Granularity] = field(default_factory=list)
    store: FactStore = field(default_factory=FactStore)
    model: EnterpriseModel | None = None
    model_graph: ConceptualGraph | None = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not has_errors(self.diagnostics)

    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.is_error]

    def target_graph(self) -> ConceptualGraph | None:
        """The graph under verification: the model's graph, else the first declared graph."""
        if self.model_graph is not None:
            return self.model_graph
        return self.graphs[0] if self.graphs else None

    def verification_bundle(self, bound: int = 100) -> Bundle:
        return Bundle(self.target_graph(), self.store, tuple(self.rules), bound)


def parse_bundle(
    paths: Iterable[str | os.PathLike],
    ontology: Ontology | None = None,
    registry: HandleFunctionRegistry | None = None,
) -> ParsedBundle:
    """Parse and cross-validate ``paths``.

    Only I/O failures raise; every syntax or semantic problem becomes a
    diagnostic and whatever could be built is returned.
    """
    sources = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            sources.append(parse_syntax(fh.read(), str(path)))
    doc = elaborate(sources, ontology)
    out = ParsedBundle(
        doc.ontology, doc.graphs, doc.rules, doc.constraints, doc.properties, doc.generics,
        doc.granularities, model=doc.model,
    )
    diags = list(doc.diagnostics)
    registry = registry or HandleFunctionRegistry()

    try:
        base = FactStore.of(doc.facts)
        if doc.model is not None:
            out.store = base.merged(extract_facts(doc.model, registry))
        else:
            out.store = FactStore.of(list(base.facts.values()) + registry.facts(), None, registry)
    except FactError as exc:
        diags.append(error("duplicate-fact", str(exc)))
        out.store = FactStore.of(registry.facts(), doc.model, registry)

    if doc.model is not None and doc.ontology is not None:
        try:
            out.model_graph = model_to_cg(doc.model, doc.ontology)
        except MissingCounterpartError as exc:
            diags.append(error(exc.code, str(exc)))

    seen: dict[str, Property] = {}
    for p in doc.properties:
        if p.name in seen:
            diags.append(error("duplicate-property", f"property {p.name} is declared twice",
                               doc.locations.get(p.name, Location())))
        seen[p.name] = p
        missing = unresolved_facts(p, Bundle(None, out.store))
        if missing:
            diags.append(error("unresolved-fact",
                               f"property {p.name} refers to unknown fact(s) {', '.join(missing)}",
                               doc.locations.get(p.name, Location())))
    out.diagnostics = sort_diagnostics(diags)
    return out

