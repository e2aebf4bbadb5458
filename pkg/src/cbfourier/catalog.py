"""Group catalog files.

A catalog is UTF-8 text made of blocks::

    group S3
    order 6
    names e (1 2) ...        # optional, whitespace separated
    table
    0 1 2 3 4 5
    ...
    end

Blank lines and ``#`` comments are ignored.  Every table is validated with
:func:`cbfourier.groups.build_group`.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import NotAGroup, ParseError
from .groups import (
    FiniteGroup,
    alternating_group,
    build_group,
    cyclic_group,
    dihedral_group,
    direct_product,
    quaternion_group,
    symmetric_group,
    trivial_group,
)

BUILTIN_NAMES = ("trivial", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "S3", "Z8", "Z4xZ2",
                 "Z2^3", "D4", "Q8", "Z12", "A4")


def construct_builtin() -> list[FiniteGroup]:
    """The shipped groups built from their constructors (used to generate the data file)."""
    Z2 = cyclic_group(2)
    return [
        trivial_group(), Z2, cyclic_group(3), cyclic_group(4),
        direct_product(Z2, Z2, "Z2xZ2"), cyclic_group(5), cyclic_group(6),
        symmetric_group(3), cyclic_group(8), direct_product(cyclic_group(4), Z2, "Z4xZ2"),
        direct_product(direct_product(Z2, Z2), Z2, "Z2^3"), dihedral_group(4),
        quaternion_group(), cyclic_group(12), alternating_group(4, "A4"),
    ]


def format_catalog(groups: list[FiniteGroup]) -> str:
    lines = []
    for G in groups:
        lines.append(f"group {G.name}")
        lines.append(f"order {G.order}")
        if G.element_names is not None and all(" " not in s for s in G.element_names):
            lines.append("names " + " ".join(G.element_names))
        lines.append("table")
        lines += [" ".join(str(int(x)) for x in row) for row in G.table]
        lines.append("end")
        lines.append("")
    return "\n".join(lines)


def parse_catalog(text: str, source: str | None = None) -> list[FiniteGroup]:
    groups = []
    state = None
    name = order = names = None
    rows: list[list[int]] = []
    start = 0

    def fail(msg, ln, col=None):
        raise ParseError(msg, ln, col, source)

    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if state is None:
            if head != "group" or not rest:
                fail("expected 'group NAME'", ln, 1)
            name, order, names, rows, start = rest, None, None, [], ln
            state = "header"
        elif state == "header":
            if head == "order":
                try:
                    order = int(rest)
                except ValueError:
                    fail(f"bad order {rest!r}", ln, raw.find(rest) + 1)
                if order <= 0:
                    fail("order must be positive", ln)
            elif head == "names":
                names = rest.split()
            elif head == "table":
                if order is None:
                    fail("'order' must come before 'table'", ln)
                state = "table"
            else:
                fail(f"unexpected {head!r} in header", ln, 1)
        else:
            if head == "end":
                if len(rows) != order:
                    fail(f"group {name!r}: {len(rows)} table rows for order {order}", ln)
                try:
                    groups.append(build_group(rows, name, names))
                except NotAGroup as exc:
                    raise NotAGroup(exc.axiom, exc.witness, name) from None
                state = None
                continue
            row = []
            col = 0
            for tok in line.split():
                col = raw.find(tok, col) + 1
                try:
                    row.append(int(tok))
                except ValueError:
                    fail(f"non-integer table entry {tok!r}", ln, col)
            if len(row) != order:
                fail(f"table row has {len(row)} entries, expected {order}", ln)
            rows.append(row)
            if len(rows) > order:
                fail("too many table rows", ln)
    if state is not None:
        fail(f"group {name!r} is missing 'end'", start)
    return groups


def load_catalog(path=None) -> list[FiniteGroup]:
    """Groups from ``path``, or the built-in catalog when ``path`` is None."""
    if path is None:
        text = resources.files("cbfourier").joinpath("data/catalog.txt").read_text("utf-8")
        return parse_catalog(text, "builtin catalog")
    p = Path(path)
    return parse_catalog(p.read_text("utf-8"), str(p))


def catalog_by_name(groups=None) -> dict[str, FiniteGroup]:
    return {G.name: G for G in (groups if groups is not None else load_catalog())}
