"""Properties, causal relations, granularity and generic (reference-matrix) properties."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..cgraph import ConceptualGraph
from .expr import Expr, names


class PropertyError(ValueError):
    pass


class Kind(str, enum.Enum):
    IMPLICATION = "implication"
    EQUIVALENCE = "equivalence"
    TEMPORAL = "temporal"
    INFLUENCE = "influence"
    EMERGENCE = "emergence"

    def __str__(self):
        return self.value


class Sense(str, enum.Enum):
    BENEFICIAL = "+"
    HARMFUL = "-"


PERSPECTIVES = ("stability", "reliability", "integrity")


class Typology(str, enum.Enum):
    SYSTEM = "system"
    LANGUAGE = "language"
    AXIOMATIC = "axiomatic"


@dataclass(frozen=True)
class CausalRelation:
    kind: Kind
    theta_c: Expr | None = None
    theta_e: Expr | None = None
    sense: Sense | None = None
    # left uninterpreted
    annotation: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind is Kind.INFLUENCE:
            if self.sense is None:
                raise PropertyError("an influence relation needs a sense (+ or -)")
            object.__setattr__(self, "sense", Sense(self.sense))
        elif self.sense is not None:
            raise PropertyError(f"only influence relations carry a sense, not {self.kind}")


@dataclass(frozen=True)
class Degree:
    degree: str
    type_tag: str = ""


@dataclass(frozen=True)
class GranularityLevel:
    name: str
    temporal: str | None = None


@dataclass(frozen=True)
class Granularity:
    name: str
    degrees: tuple[GranularityLevel, ...]

    def __post_init__(self):
        ids = [d.name for d in self.degrees]
        if len(ids) != len(set(ids)):
            raise PropertyError(f"granularity {self.name} repeats a degree")

    def __contains__(self, degree: str) -> bool:
        return any(d.name == degree for d in self.degrees)

    def rank(self, degree: str) -> int:
        for i, d in enumerate(self.degrees):
            if d.name == degree:
                return i
        raise PropertyError(f"degree {degree!r} is not part of granularity {self.name}")


TARGETS = ("upper_referent", "referent", "lower")
OBJECTS = ("system", "model")
ASPECTS = ("structural", "behavioral", "functional")
TIMES = ("past", "present", "future")


@dataclass(frozen=True)
class Placement:
    """Coordinates of a property on the target, typology and time axes."""

    target: str = "referent"
    system: str = "system"
    aspect: str = "functional"
    time: str = "present"

    def __post_init__(self):
        for value, allowed in ((self.target, TARGETS), (self.system, OBJECTS),
                               (self.aspect, ASPECTS), (self.time, TIMES)):
            if value not in allowed:
                raise PropertyError(f"{value!r} is not one of {', '.join(allowed)}")

    def __str__(self):
        return f"{self.target} {self.system}.{self.aspect} {self.time}"


@dataclass(frozen=True)
class Property:
    """A named causal link from a cause fact set to a non-empty effect fact set.

    ``bindings`` maps fact names onto graph patterns so the graph reasoner
    can decide the property.
    """

    name: str
    causes: frozenset[str]
    effects: frozenset[str]
    relation: CausalRelation
    degree: Degree = Degree("")
    bindings: Mapping[str, ConceptualGraph] = field(default_factory=dict)
    placement: Placement | None = None

    def __post_init__(self):
        object.__setattr__(self, "causes", frozenset(self.causes))
        object.__setattr__(self, "effects", frozenset(self.effects))
        if not self.effects:
            raise PropertyError(f"property {self.name} has no effect")
        both = self.causes & self.effects
        if both:
            raise PropertyError(f"property {self.name} lists {sorted(both)} as both cause and effect")

    def canonical(self) -> "Property":
        return Property(
            self.name, self.causes, self.effects, self.relation, self.degree,
            {k: g.canonical() for k, g in self.bindings.items()}, self.placement,
        )


def facts_of(expr: Expr | None, known) -> frozenset[str]:
    """Names in ``expr`` that ``known`` recognises as facts."""
    if expr is None:
        return frozenset()
    return frozenset(n for n in names(expr) if n in known or "." in n)


_PLACEHOLDER = re.compile(r"\$([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class GenericProperty:
    """A reference-matrix template; ``body`` is property source text with ``$name`` holes."""

    name: str
    perspectives: frozenset[str]
    typology: Typology
    params: tuple[tuple[str, str], ...]
    body: str

    def __post_init__(self):
        object.__setattr__(self, "perspectives", frozenset(self.perspectives))
        object.__setattr__(self, "typology", Typology(self.typology))
        object.__setattr__(self, "body", self.body.strip())
        bad = set(self.perspectives) - set(PERSPECTIVES)
        if bad:
            raise PropertyError(f"unknown perspective(s) {sorted(bad)}")
        declared = [p for p, _ in self.params]
        if len(declared) != len(set(declared)):
            raise PropertyError(f"template {self.name} declares a placeholder twice")
        used = set(_PLACEHOLDER.findall(self.body))
        missing = used - set(declared)
        if missing:
            raise PropertyError(f"template {self.name} uses undeclared placeholder(s) {sorted(missing)}")

    def placeholders(self) -> dict[str, str]:
        return dict(self.params)


def instantiate(
    gp: GenericProperty,
    bindings: Mapping[str, Any],
    ontology=None,
    model=None,
    name: str | None = None,
) -> Property:
    """Fill every placeholder and parse the result into a concrete property.

    When ``model`` is given, each bound value that names a model entity
    must have a kind below the placeholder's concept type.
    """
    from ..diagnostics import DiagnosticError
    from ..frontio.parser import parse_properties

    wanted = gp.placeholders()
    missing = sorted(set(wanted) - set(bindings))
    if missing:
        raise PropertyError(f"missing binding(s) for {', '.join('$' + m for m in missing)}")
    extra = sorted(set(bindings) - set(wanted))
    if extra:
        raise PropertyError(f"template {gp.name} has no placeholder(s) {extra}")
    for key, value in bindings.items():
        text = str(value)
        if not re.fullmatch(r"[^\W\d][\w\-]*", text):
            raise PropertyError(f"${key} must be bound to an identifier, got {text!r}")
        if model is not None and ontology is not None:
            entity = model.entities.get(text)
            if entity is None:
                raise PropertyError(f"${key}: no model entity named {text!r}")
            if not ontology.concepts.is_subtype(entity.kind, wanted[key]):
                raise PropertyError(f"${key}: {text} is a {entity.kind}, expected {wanted[key]}")
    text = _PLACEHOLDER.sub(lambda m: str(bindings[m.group(1)]), gp.body)
    try:
        props = parse_properties(text, ontology=ontology, file=f"<{gp.name}>")
    except DiagnosticError as exc:
        raise PropertyError(f"instance of {gp.name} is invalid: {exc.diagnostic.message}") from exc
    if len(props) != 1:
        raise PropertyError(f"template {gp.name} must contain exactly one property")
    prop = props[0]
    if name is not None:
        prop = Property(name, prop.causes, prop.effects, prop.relation, prop.degree,
                        prop.bindings, prop.placement)
    return prop
