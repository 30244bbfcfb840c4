"""The tokenizer shared by every text format."""
from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import DiagnosticError, Location, error

IDENT = "IDENT"
VAR = "VAR"
STAR = "STAR"
STRING = "STRING"
NUMBER = "NUMBER"
PLACEHOLDER = "PLACEHOLDER"
PUNCT = "PUNCT"
EOF = "EOF"

_PUNCT2 = ("->", "!=", "<=", ">=", "..")
_PUNCT1 = "[](){}:;,=<>@+-."
_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    value: object
    line: int
    column: int
    offset: int
    end: int

    def is_(self, kind: str, text: str | None = None) -> bool:
        return self.kind == kind and (text is None or self.text == text)

    def __str__(self):
        return "end of input" if self.kind == EOF else repr(self.text)


def _ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class Lexer:
    def __init__(self, text: str, file: str = "<string>"):
        self.text = text
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1

    def _loc(self, line=None, col=None) -> Location:
        return Location(self.file, line or self.line, col or self.col)

    def _fail(self, message: str, line=None, col=None):
        raise DiagnosticError(error("syntax-error", message, self._loc(line, col)))

    def _peek(self, k: int = 0) -> str:
        i = self.pos + k
        return self.text[i] if i < len(self.text) else ""

    def _advance(self, n: int = 1) -> str:
        out = self.text[self.pos:self.pos + n]
        for ch in out:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return out

    def _ident_tail(self) -> None:
        while True:
            ch = self._peek()
            if _ident_char(ch):
                self._advance()
            elif ch in "-." and _ident_char(self._peek(1)):
                # member-of, domain_of.F; but not x-> or 1..2
                self._advance()
            else:
                return

    def _number(self) -> tuple[str, object]:
        start = self.pos
        if self._peek() == "-":
            self._advance()
        while self._peek().isdigit():
            self._advance()
        is_float = False
        if self._peek() == "." and self._peek(1).isdigit():
            is_float = True
            self._advance()
            while self._peek().isdigit():
                self._advance()
        if self._peek() in "eE" and (self._peek(1).isdigit() or self._peek(1) in "+-" and self._peek(2).isdigit()):
            is_float = True
            self._advance(2)
            while self._peek().isdigit():
                self._advance()
        text = self.text[start:self.pos]
        return text, float(text) if is_float else int(text)

    def _string(self) -> str:
        quote = self._advance()
        line, col = self.line, self.col - 1
        out = []
        while True:
            ch = self._peek()
            if ch == "" or ch == "\n":
                self._fail("unterminated string", line, col)
            self._advance()
            if ch == quote:
                return "".join(out)
            if ch == "\\":
                esc = self._peek()
                if esc not in _ESCAPES:
                    self._fail(f"unknown escape \\{esc}")
                self._advance()
                out.append(_ESCAPES[esc])
            else:
                out.append(ch)

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while True:
            ch = self._peek()
            if ch == "":
                out.append(Token(EOF, "", None, self.line, self.col, self.pos, self.pos))
                return out
            if ch.isspace():
                self._advance()
                continue
            if ch == "#":
                while self._peek() not in ("", "\n"):
                    self._advance()
                continue
            line, col, start = self.line, self.col, self.pos
            if _ident_start(ch):
                self._advance()
                self._ident_tail()
                text = self.text[start:self.pos]
                out.append(Token(IDENT, text, text, line, col, start, self.pos))
            elif ch.isdigit() or ch == "-" and self._peek(1).isdigit():
                text, value = self._number()
                out.append(Token(NUMBER, text, value, line, col, start, self.pos))
            elif ch in "'\"":
                value = self._string()
                out.append(Token(STRING, self.text[start:self.pos], value, line, col, start, self.pos))
            elif ch == "*":
                self._advance()
                if _ident_start(self._peek()):
                    self._ident_tail_from_start()
                    text = self.text[start:self.pos]
                    out.append(Token(VAR, text, text[1:], line, col, start, self.pos))
                else:
                    out.append(Token(STAR, "*", None, line, col, start, self.pos))
            elif ch == "$":
                self._advance()
                if not _ident_start(self._peek()):
                    self._fail("expected a placeholder name after '$'", line, col)
                self._ident_tail_from_start()
                text = self.text[start:self.pos]
                out.append(Token(PLACEHOLDER, text, text[1:], line, col, start, self.pos))
            else:
                two = self.text[self.pos:self.pos + 2]
                if two in _PUNCT2:
                    self._advance(2)
                    out.append(Token(PUNCT, two, two, line, col, start, self.pos))
                elif ch in _PUNCT1:
                    self._advance()
                    out.append(Token(PUNCT, ch, ch, line, col, start, self.pos))
                else:
                    self._fail(f"unexpected character {ch!r}", line, col)

    def _ident_tail_from_start(self) -> None:
        self._advance()
        self._ident_tail()


def tokenize(text: str, file: str = "<string>") -> list[Token]:
    """Tokenize ``text``; raises ``DiagnosticError`` (code ``syntax-error``) on bad input."""
    return Lexer(text, file).tokens()
