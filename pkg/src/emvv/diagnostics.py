from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True, order=True)
class Location:
    file: str = "<string>"
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    """A located message with a stable ``code``.

    Rendered as ``file:line:col: severity[code]: message``.
    """

    severity: str
    code: str
    message: str
    location: Location = Location()

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def sort_key(self):
        return (self.location, self.severity, self.code, self.message)

    def render(self) -> str:
        return f"{self.location}: {self.severity}[{self.code}]: {self.message}"

    __str__ = render


def error(code: str, message: str, location: Location = Location()) -> Diagnostic:
    return Diagnostic(ERROR, code, message, location)


def warning(code: str, message: str, location: Location = Location()) -> Diagnostic:
    return Diagnostic(WARNING, code, message, location)


def sort_diagnostics(diags: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diags)


class DiagnosticError(Exception):
    """Raised by the strict (single-artifact) entry points."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic

    @property
    def code(self) -> str:
        return self.diagnostic.code

    @property
    def location(self) -> Location:
        return self.diagnostic.location
