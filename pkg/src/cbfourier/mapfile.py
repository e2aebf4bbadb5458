"""Map files: a partial map ``alpha: Y -> G`` with ``Y`` inside ``H``, or a raw matrix.

Example::

    # the sign map on S3
    S3 -> Z2          # source H, target G (catalog names)
    domain: 0 1 2 3 4 5
    0 -> 0
    1 -> 1
    ...

``domain:`` takes element indices or names, or ``all`` / ``none``.  Every
domain point needs exactly one ``h -> g`` line.  Instead of pairs a file may
give ``matrix:`` followed by ``|H|`` rows of ``|G|`` numbers; the rows are
the coefficients of ``(Phi u)(h) = sum_s M[h, s] u(s)`` on ``A(G) -> A(H)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .catalog import catalog_by_name
from .cb import LinearFunctionMap
from .errors import ParseError
from .groups import FiniteGroup, PartialMap
from .lab import build_phi_alpha


@dataclass(frozen=True)
class MapSpec:
    source: FiniteGroup  # H
    target: FiniteGroup  # G
    partial: PartialMap | None
    phi: LinearFunctionMap


def _element(G: FiniteGroup, tok: str, ln: int, col: int, source) -> int:
    if tok.lstrip("-").isdigit():
        v = int(tok)
    elif G.element_names is not None and tok in G.element_names:
        v = list(G.element_names).index(tok)
    else:
        raise ParseError(f"unknown element {tok!r} of {G.name}", ln, col, source)
    if not 0 <= v < G.order:
        raise ParseError(f"element {v} out of range for {G.name}", ln, col, source)
    return v


def parse_map(text: str, groups=None, source: str | None = None) -> MapSpec:
    cat = catalog_by_name(groups)
    H = G = None
    domain = None
    pairs: dict[int, int] = {}
    rows: list[list[float]] | None = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        col = raw.find(line) + 1
        if H is None:
            a, arrow, b = line.partition("->")
            a, b = a.strip(), b.strip()
            if not arrow or not a or not b:
                raise ParseError("expected header 'H -> G'", ln, col, source)
            for nm in (a, b):
                if nm not in cat:
                    raise ParseError(f"unknown group {nm!r}", ln, raw.find(nm) + 1, source)
            H, G = cat[a], cat[b]
            continue
        if rows is not None:
            try:
                row = [float(x) for x in line.split()]
            except ValueError:
                raise ParseError("non-numeric matrix entry", ln, col, source) from None
            if len(row) != G.order:
                raise ParseError(f"matrix row needs {G.order} entries", ln, col, source)
            rows.append(row)
            continue
        if line.startswith("domain:"):
            if domain is not None:
                raise ParseError("duplicate domain line", ln, col, source)
            toks = line[len("domain:"):].split()
            if toks == ["all"]:
                domain = set(range(H.order))
            elif toks == ["none"] or not toks:
                domain = set()
            else:
                domain = {_element(H, t, ln, raw.find(t) + 1, source) for t in toks}
            continue
        if line == "matrix:":
            rows = []
            continue
        a, arrow, b = line.partition("->")
        if not arrow:
            raise ParseError(f"cannot read {line!r}", ln, col, source)
        h = _element(H, a.strip(), ln, col, source)
        g = _element(G, b.strip(), ln, raw.find(b.strip(), col) + 1, source)
        if h in pairs:
            raise ParseError(f"element {h} mapped twice", ln, col, source)
        pairs[h] = g
    if H is None:
        raise ParseError("empty map file", 1, 1, source)
    if rows is not None:
        if pairs or domain is not None:
            raise ParseError("a matrix file cannot also list a domain or pairs", 1, 1, source)
        if len(rows) != H.order:
            raise ParseError(f"matrix needs {H.order} rows, got {len(rows)}", len(text.splitlines()), 1, source)
        return MapSpec(H, G, None, LinearFunctionMap(G, H, np.array(rows)))
    if domain is None:
        raise ParseError("missing 'domain:' line", 1, 1, source)
    if set(pairs) != domain:
        raise ParseError(f"pairs cover {sorted(pairs)} but domain is {sorted(domain)}", 1, 1, source)
    pm = PartialMap.from_dict(H, G, pairs)
    return MapSpec(H, G, pm, build_phi_alpha(pm))


def load_map(path, groups=None) -> MapSpec:
    p = Path(path)
    return parse_map(p.read_text("utf-8"), groups, str(p))


def format_map(pm: PartialMap) -> str:
    lines = [f"{pm.source.name} -> {pm.target.name}",
             "domain: " + (" ".join(map(str, pm.domain.members)) or "none")]
    lines += [f"{h} -> {g}" for h, g in sorted(pm.as_dict().items())]
    return "\n".join(lines) + "\n"
