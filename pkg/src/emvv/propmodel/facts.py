"""Facts: modeling variables, modeling parameters, handle functions, trusted properties."""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Union


class FactError(ValueError):
    pass


class UnknownFactError(FactError):
    def __init__(self, name: str):
        super().__init__(f"unknown fact {name!r}")
        self.name = name


class MissingTimeError(FactError):
    pass


@dataclass(frozen=True)
class EnumDomain:
    values: frozenset

    def __contains__(self, v) -> bool:
        return v in self.values


@dataclass(frozen=True)
class RangeDomain:
    low: float
    high: float

    def __contains__(self, v) -> bool:
        return isinstance(v, (int, float)) and not isinstance(v, bool) and self.low <= v <= self.high


@dataclass(frozen=True)
class AnyDomain:
    def __contains__(self, v) -> bool:
        return True


Domain = Union[EnumDomain, RangeDomain, AnyDomain]

TYPE_CHECKS: dict[str, Callable[[Any], bool]] = {
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "real": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "bool": lambda v: isinstance(v, bool),
    "text": lambda v: isinstance(v, str),
}


def conforms(type_tag: str, value) -> bool:
    """Primitive tags are checked; structured tags accept symbols and text."""
    check = TYPE_CHECKS.get(type_tag)
    if check is None:
        return isinstance(value, str)
    return check(value)


@dataclass(frozen=True)
class ModelingVariable:
    name: str
    type_tag: str
    series: tuple[tuple[float, Any], ...]
    domain: Domain = AnyDomain()

    def __post_init__(self):
        series = tuple(sorted((tuple(p) for p in self.series), key=lambda p: p[0]))
        object.__setattr__(self, "series", series)
        times = [t for t, _ in series]
        if len(times) != len(set(times)):
            raise FactError(f"variable {self.name} has duplicate time points")
        for t, v in series:
            if not conforms(self.type_tag, v):
                raise FactError(f"variable {self.name}: value {v!r} at t={t} is not {self.type_tag}")
            if v not in self.domain:
                raise FactError(f"variable {self.name}: value {v!r} at t={t} lies outside its domain")

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.series]

    def at(self, t: float):
        """Value holding at ``t`` (last sample not after ``t``)."""
        times = self.times
        i = bisect.bisect_right(times, t) - 1
        if i < 0:
            raise MissingTimeError(f"variable {self.name} has no value at or before t={t}")
        return self.series[i][1]


@dataclass(frozen=True)
class ModelingParameter:
    name: str
    type_tag: str
    value: Any

    def __post_init__(self):
        if not conforms(self.type_tag, self.value):
            raise FactError(f"parameter {self.name}: {self.value!r} is not {self.type_tag}")


@dataclass(frozen=True)
class HandleFunction:
    name: str
    params: tuple[str, ...]
    result_type: str


@dataclass(frozen=True)
class PropertyRef:
    """A property the user trusts; it evaluates to true without proof."""

    name: str


Fact = Union[ModelingVariable, ModelingParameter, HandleFunction, PropertyRef]

FACT_KINDS = {
    ModelingVariable: "MV",
    ModelingParameter: "MP",
    HandleFunction: "HF",
    PropertyRef: "P",
}


@dataclass(frozen=True)
class FactStore:
    """An immutable snapshot of facts, plus what handle functions evaluate over."""

    facts: Mapping[str, Fact] = field(default_factory=dict)
    model: Any = field(default=None, compare=False)
    registry: Any = field(default=None, compare=False)

    @classmethod
    def of(cls, facts: Iterable[Fact], model=None, registry=None) -> "FactStore":
        table: dict[str, Fact] = {}
        for f in facts:
            if f.name in table and table[f.name] != f:
                raise FactError(f"fact {f.name!r} declared twice")
            table[f.name] = f
        return cls(table, model, registry)

    def __contains__(self, name: str) -> bool:
        return name in self.facts

    def __getitem__(self, name: str) -> Fact:
        try:
            return self.facts[name]
        except KeyError:
            raise UnknownFactError(name) from None

    def __len__(self):
        return len(self.facts)

    def kind(self, kind: type) -> dict[str, Fact]:
        return {n: f for n, f in self.facts.items() if isinstance(f, kind)}

    def partition(self) -> dict[str, set[str]]:
        """The four disjoint fact sets, keyed ``MV``, ``MP``, ``HF`` and ``P``."""
        out: dict[str, set[str]] = {k: set() for k in FACT_KINDS.values()}
        for n, f in self.facts.items():
            out[FACT_KINDS[type(f)]].add(n)
        return out

    def horizon(self) -> list[float]:
        """All time points mentioned by any modeling variable, ascending."""
        return sorted({t for f in self.facts.values() if isinstance(f, ModelingVariable) for t in f.times})

    def merged(self, other: "FactStore") -> "FactStore":
        return FactStore.of(
            list(self.facts.values()) + list(other.facts.values()),
            self.model if self.model is not None else other.model,
            self.registry if self.registry is not None else other.registry,
        )
