"""Conceptual-graph verification of enterprise process models."""
from .cgraph import ConceptNode, ConceptualGraph, CorefVar, Generic, Individual, RelationEdge
from .fol import Formula, phi_translate, render
from .frontio import ParsedBundle, parse_bundle, serialize, structurally_equal
from .ingest import EnterpriseModel, extract_facts, model_to_cg
from .ontology import Ontology, make_ontology, reference_ontology
from .projection import Morphism, exists_projection, find_projections
from .propmodel import Property, verify_property
from .reasoning import (
    GraphRule,
    NegativeConstraint,
    PositiveConstraint,
    prove_refutation,
    saturate,
    verify_all,
)

__version__ = "0.1.0"
