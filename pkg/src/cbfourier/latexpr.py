"""Text format for coset-ring sets in Z^d.

Grammar (one statement per line, ``#`` starts a comment)::

    file      := line*
    line      := "dim" INT | "split" INT | NAME ":=" coset [ "minus" "{" coset (";" coset)* "}" ]
    coset     := vector [ "+" "span" "{" [ vector (";" vector)* ] "}" ]
    vector    := INT | "(" INT ("," INT)* ")"

Example::

    dim 2
    split 1
    evens := (0, 0) + span{(2, 2)}
    odds  := (1, 2) + span{(2, 2)}
    punctured := (0, 0) + span{(1, 0); (0, 1)} minus { (0, 0) + span{(5, 0); (0, 5)} ; (1, 1) }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DimensionMismatch, ParseError
from .lattice import LatticeCoset, coset
from .piecewise import CosetRingSet, Piece

_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][\w.]*)|(?P<op>:=|[(),;{}+]))")


@dataclass
class LatticeExpression:
    dim: int | None = None
    split: int | None = None
    names: list[str] = field(default_factory=list)
    pieces: list[tuple[LatticeCoset, tuple[LatticeCoset, ...]]] = field(default_factory=list)

    def ring_set(self) -> CosetRingSet:
        dim = self.dim if self.dim is not None else (self.pieces[0][0].dim if self.pieces else 0)
        return CosetRingSet(tuple(Piece(b, h) for b, h in self.pieces), dim)

    def cosets(self) -> list[LatticeCoset]:
        return [b for b, _ in self.pieces]


class _Line:
    def __init__(self, text: str, lineno: int, source: str | None):
        self.text, self.lineno, self.source = text, lineno, source
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m:
                self.fail(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + 1)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def fail(self, msg, col=None):
        raise ParseError(msg, self.lineno, col, self.source)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text) + 1)

    def take(self, kind=None, value=None):
        k, v, c = self.peek()
        if k is None or (kind and k != kind) or (value and v != value):
            want = value or kind
            self.fail(f"expected {want!r}, found {v if v is not None else 'end of line'!r}", c)
        self.i += 1
        return v

    def at(self, value):
        return self.peek()[1] == value

    def vector(self):
        if self.peek()[0] == "int":
            return (int(self.take("int")),)
        self.take(value="(")
        out = [int(self.take("int"))]
        while self.at(","):
            self.take(value=",")
            out.append(int(self.take("int")))
        self.take(value=")")
        return tuple(out)

    def coset(self, dim):
        col = self.peek()[2]
        off = self.vector()
        gens = []
        if self.at("+"):
            self.take(value="+")
            self.take("name", "span")
            self.take(value="{")
            if not self.at("}"):
                gens.append(self.vector())
                while self.at(";"):
                    self.take(value=";")
                    gens.append(self.vector())
            self.take(value="}")
        for v in (off, *gens):
            if dim is not None and len(v) != dim:
                self.fail(f"vector of length {len(v)} in a dimension-{dim} file", col)
        return coset(off, gens)

    def done(self):
        k, v, c = self.peek()
        if k is not None:
            self.fail(f"trailing input {v!r}", c)


def parse_lattice_expression(text: str, source: str | None = None) -> LatticeExpression:
    expr = LatticeExpression()
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        ln = _Line(body, lineno, source)
        head = ln.take("name")
        if head in ("dim", "split") and ln.peek()[0] == "int":
            val = int(ln.take("int"))
            ln.done()
            if val <= 0:
                ln.fail(f"{head} must be positive")
            setattr(expr, head, val)
            continue
        ln.take(value=":=")
        base = ln.coset(expr.dim)
        if expr.dim is None:
            expr.dim = base.dim
        holes = []
        if ln.peek()[1] == "minus":
            ln.take("name", "minus")
            ln.take(value="{")
            holes.append(ln.coset(expr.dim))
            while ln.at(";"):
                ln.take(value=";")
                holes.append(ln.coset(expr.dim))
            ln.take(value="}")
        ln.done()
        try:
            Piece(base, tuple(holes))
        except (ValueError, DimensionMismatch) as exc:
            ln.fail(str(exc))
        expr.names.append(head)
        expr.pieces.append((base, tuple(holes)))
    if not expr.pieces:
        raise ParseError("no pieces defined", None, None, source)
    return expr


def load_lattice_expression(path) -> LatticeExpression:
    with open(path, encoding="utf-8") as fh:
        return parse_lattice_expression(fh.read(), str(path))


def format_coset(c: LatticeCoset) -> str:
    def vec(v):
        return f"({', '.join(map(str, v))})"
    if not c.lattice.basis:
        return vec(c.offset)
    return f"{vec(c.offset)} + span{{{'; '.join(vec(v) for v in c.lattice.basis)}}}"
