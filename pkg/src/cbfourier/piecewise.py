"""Coset-ring sets and piecewise affine maps on Z^d.

A :class:`CosetRingSet` is a finite union of pieces ``base minus holes``.
:func:`graph_decompose` takes such a set in ``Z^d x Z^e`` and, if it is the
graph of a function, recovers that function as disjoint affine pieces whose
domains are the first-coordinate projections of the input pieces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import AmbiguousPieces, DimensionMismatch, NotAGraph
from .lattice import (
    IntLattice,
    LatticeCoset,
    canonicalize,
    coset,
    coset_intersect,
    coset_subset,
    integer_kernel,
    is_covered,
    lattice_intersection,
    solve_integer,
)


@dataclass(frozen=True)
class Piece:
    base: LatticeCoset
    holes: tuple[LatticeCoset, ...] = ()

    def __post_init__(self):
        holes = tuple(self.holes)
        for h in holes:
            if h.dim != self.base.dim:
                raise DimensionMismatch("hole and base dimensions differ")
            if not coset_subset(h, self.base):
                raise ValueError(f"hole {h} is not contained in base {self.base}")
        object.__setattr__(self, "holes", holes)

    @property
    def dim(self) -> int:
        return self.base.dim

    def contains(self, x: Sequence[int]) -> bool:
        return self.base.contains(x) and not any(h.contains(x) for h in self.holes)

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        m = self.base.contains_many(X)
        for h in self.holes:
            m &= ~h.contains_many(X)
        return m

    def is_empty(self) -> bool:
        return is_covered(self.base, self.holes)[0]

    def sample(self):
        """A point of the piece, or None if it is empty."""
        covered, x = is_covered(self.base, self.holes)
        return None if covered else x


def make_piece(base: LatticeCoset, holes: Sequence[LatticeCoset] = ()) -> Piece | None:
    """Piece ``base minus holes`` with holes clipped to the base; None if a hole swallows it."""
    clipped = []
    for h in holes:
        m = coset_intersect(base, h)
        if m is None:
            continue
        if m == base:
            return None
        if m not in clipped:
            clipped.append(m)
    return Piece(base, tuple(clipped))


@dataclass(frozen=True)
class CosetRingSet:
    pieces: tuple[Piece, ...]
    dim: int

    def __post_init__(self):
        for p in self.pieces:
            if p.dim != self.dim:
                raise DimensionMismatch("piece dimension differs from the set dimension")

    def contains(self, x: Sequence[int]) -> bool:
        return ring_contains(self, x)

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        m = np.zeros(len(X), dtype=bool)
        for p in self.pieces:
            m |= p.contains_many(X)
        return m


def ring_contains(S: CosetRingSet, x: Sequence[int]) -> bool:
    if len(x) != S.dim:
        raise DimensionMismatch(f"point of length {len(x)} tested against a set in Z^{S.dim}")
    return any(p.contains(x) for p in S.pieces)


@dataclass(frozen=True)
class LatticeAffineMap:
    """An affine map on a lattice coset, ``offset + B y  ->  image0 + W y``.

    ``B`` is the canonical basis of the domain lattice and ``W`` (``e x r``)
    holds the images of its columns.  The linear part need not extend to an
    integer matrix on all of Z^d (``2n -> n`` on ``2Z`` is allowed);
    :meth:`rational_matrix` gives the rational extension that is zero on the
    orthogonal complement of the domain lattice.
    """

    domain: LatticeCoset
    image0: tuple[int, ...]
    images: tuple[tuple[int, ...], ...]

    @property
    def codim(self) -> int:
        return len(self.image0)

    @classmethod
    def from_matrix(cls, domain: LatticeCoset, matrix, offset) -> "LatticeAffineMap":
        A = [[int(v) for v in row] for row in matrix]
        b = [int(v) for v in offset]

        def apply(x):
            return tuple(sum(r[i] * x[i] for i in range(len(x))) + bb for r, bb in zip(A, b))

        lin = [tuple(sum(r[i] * v[i] for i in range(len(v))) for r in A) for v in domain.lattice.basis]
        return cls(domain, apply(domain.offset), tuple(lin))

    def __call__(self, x: Sequence[int]):
        y = self.domain.coords(x)
        if y is None:
            raise ValueError(f"{tuple(x)} is outside the domain {self.domain}")
        return self._at(y)

    def _at(self, y):
        return tuple(
            self.image0[i] + sum(w[i] * c for w, c in zip(self.images, y)) for i in range(self.codim)
        )

    def linear(self, v: Sequence[int]):
        """Image of a domain-lattice vector under the linear part."""
        y = self.domain.lattice.coords(v)
        if y is None:
            raise ValueError(f"{tuple(v)} is not in the domain lattice")
        return tuple(sum(w[i] * c for w, c in zip(self.images, y)) for i in range(self.codim))

    def evaluate_many(self, X: np.ndarray):
        X = np.asarray(X, dtype=np.int64)
        ok, Y = self.domain.lattice.coords_many(X - np.array(self.domain.offset, dtype=np.int64))
        W = np.array(self.images, dtype=np.int64).reshape(len(self.images), self.codim)
        vals = np.array(self.image0, dtype=np.int64) + (Y @ W if len(self.images) else 0)
        return ok, vals

    def restrict(self, sub: LatticeCoset) -> "LatticeAffineMap":
        if not coset_subset(sub, self.domain):
            raise ValueError("restriction target is not inside the domain")
        return LatticeAffineMap(sub, self(sub.offset), tuple(self.linear(v) for v in sub.lattice.basis))

    def graph(self, region: LatticeCoset | None = None) -> LatticeCoset:
        """The graph over ``region`` (default: the whole domain) as a coset of Z^(d+e)."""
        c = self.domain if region is None else region
        off = tuple(c.offset) + self(c.offset)
        gens = [tuple(v) + self.linear(v) for v in c.lattice.basis]
        return coset(off, gens)

    def rational_matrix(self):
        """``(A, b)`` with Fraction entries so that ``x -> A x + b`` on the domain."""
        B = [[Fraction(v[i]) for v in self.domain.lattice.basis] for i in range(self.domain.dim)]
        r = self.domain.lattice.rank
        d = self.domain.dim
        # A = W (B^T B)^-1 B^T
        BtB = [[sum(B[k][i] * B[k][j] for k in range(d)) for j in range(r)] for i in range(r)]
        inv = _inverse(BtB)
        P = [[sum(inv[i][k] * B[j][k] for k in range(r)) for j in range(d)] for i in range(r)]
        A = [[sum(Fraction(self.images[k][row]) * P[k][j] for k in range(r)) for j in range(d)]
             for row in range(self.codim)]
        b = [Fraction(self.image0[row]) - sum(A[row][j] * self.domain.offset[j] for j in range(d))
             for row in range(self.codim)]
        return A, b


def _inverse(M):
    n = len(M)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class LatticePiecewiseAffine:
    pieces: tuple[tuple[Piece, LatticeAffineMap], ...]
    dim: int
    codim: int

    def __post_init__(self):
        for region, amap in self.pieces:
            if not coset_subset(region.base, amap.domain):
                raise ValueError("piece region must lie in its map's domain")

    def check_disjoint(self) -> None:
        for i, (p, _) in enumerate(self.pieces):
            for q, _ in self.pieces[i + 1:]:
                meet = coset_intersect(p.base, q.base)
                if meet is None:
                    continue
                covered, x = is_covered(meet, p.holes + q.holes)
                if not covered:
                    raise AmbiguousPieces(f"pieces overlap at {x}")

    def domain(self) -> CosetRingSet:
        return CosetRingSet(tuple(p for p, _ in self.pieces), self.dim)

    def graph(self) -> CosetRingSet:
        out = []
        for region, amap in self.pieces:
            base = amap.graph(region.base)
            holes = tuple(amap.graph(h) for h in region.holes)
            out.append(Piece(base, holes))
        return CosetRingSet(tuple(out), self.dim + self.codim)

    def evaluate_many(self, X: np.ndarray):
        """Vectorised evaluation; returns ``(defined_mask, values)``."""
        X = np.asarray(X, dtype=np.int64)
        defined = np.zeros(len(X), dtype=bool)
        vals = np.zeros((len(X), self.codim), dtype=np.int64)
        for region, amap in self.pieces:
            m = region.contains_many(X)
            if np.any(m & defined):
                raise AmbiguousPieces("a point lies in two pieces")
            _, v = amap.evaluate_many(X)
            vals[m] = v[m]
            defined |= m
        return defined, vals


def evaluate_piecewise(pa: LatticePiecewiseAffine, x: Sequence[int]):
    if len(x) != pa.dim:
        raise DimensionMismatch(f"point of length {len(x)} for a map on Z^{pa.dim}")
    hits = [amap for region, amap in pa.pieces if region.contains(x)]
    if len(hits) > 1:
        raise AmbiguousPieces(f"{tuple(x)} lies in {len(hits)} pieces")
    return hits[0](x) if hits else None


def _project(c: LatticeCoset, d: int) -> LatticeCoset:
    return coset(c.offset[:d], [v[:d] for v in c.lattice.basis])


def _vertical_vector(L: IntLattice, d: int):
    """A nonzero vector of ``L`` with vanishing first ``d`` coordinates, or None."""
    e = L.dim - d
    vertical = canonicalize([tuple(int(i == d + j) for i in range(L.dim)) for j in range(e)], L.dim)
    meet = lattice_intersection(L, vertical)
    return meet.basis[0] if meet.rank else None


def _second_point(piece: Piece, x, t):
    """Another point of ``piece`` on the line ``x + Z t`` (exists when ``x`` is in the piece)."""
    line = coset(x, [t])
    period = 1
    singles = 0
    for h in piece.holes:
        m = coset_intersect(line, h)
        if m is None:
            continue
        if m.lattice.rank:
            k = next(abs(a) // abs(b) for a, b in zip(m.lattice.basis[0], t) if b)
            period = period * k // np.gcd(period, k)
        else:
            singles += 1
    for j in range(1, singles + 2):
        y = tuple(a + j * period * b for a, b in zip(x, t))
        if piece.contains(y):
            return y
    raise AssertionError("line through a piece point must meet the piece again")


def _graph_piece(piece: Piece, d: int):
    """Affine map and projected region of one graph piece (None if the piece is empty)."""
    x = piece.sample()
    if x is None:
        return None
    t = _vertical_vector(piece.base.lattice, d)
    if t is not None:
        y = _second_point(piece, x, t)
        raise NotAGraph("a piece contains a vertical direction",
                        (tuple(x[:d]), tuple(x[d:]), tuple(y[d:])))
    L = piece.base
    K = _project(L, d)
    first = [v[:d] for v in L.lattice.basis]

    def value(p):
        z = solve_integer(first, d, [a - b for a, b in zip(p, L.offset[:d])])
        return tuple(L.offset[d + i] + sum(v[d + i] * c for v, c in zip(L.lattice.basis, z))
                     for i in range(L.dim - d))

    def linear(v):
        z = solve_integer(first, d, list(v))
        return tuple(sum(w[d + i] * c for w, c in zip(L.lattice.basis, z)) for i in range(L.dim - d))

    amap = LatticeAffineMap(K, value(K.offset), tuple(linear(v) for v in K.lattice.basis))
    holes = [_project(h, d) for h in piece.holes]
    region = make_piece(K, holes)
    return region, amap


def _agreement(a: LatticeAffineMap, b: LatticeAffineMap, on: LatticeCoset) -> LatticeCoset | None:
    """The sub-coset of ``on`` where two affine maps agree (None if nowhere)."""
    e = a.codim
    delta0 = [p - q for p, q in zip(a(on.offset), b(on.offset))]
    cols = [tuple(p - q for p, q in zip(a.linear(v), b.linear(v))) for v in on.lattice.basis]
    if not cols:
        return on if not any(delta0) else None
    y0 = solve_integer(cols, e, [-x for x in delta0])
    if y0 is None:
        return None
    kernel = integer_kernel(cols, e)
    return coset(on.point(y0), [on.lattice.point(z) for z in kernel])


def _minus(p: Piece, q: Piece) -> list[Piece]:
    """``p \\ q`` as disjoint pieces."""
    out = []
    meet = coset_intersect(p.base, q.base)
    if meet is None:
        return [p]
    rest = make_piece(p.base, list(p.holes) + [meet])
    if rest is not None and not rest.is_empty():
        out.append(rest)
    used: list[LatticeCoset] = []
    for h in q.holes:
        inside = coset_intersect(meet, h)
        if inside is not None:
            part = make_piece(inside, list(p.holes) + used)
            if part is not None and not part.is_empty():
                out.append(part)
            used.append(inside)
    return out


def graph_decompose(S: CosetRingSet, split_dim: int) -> LatticePiecewiseAffine:
    """Recover ``alpha: Y -> Z^e`` from its graph ``S`` in ``Z^d x Z^e``.

    Each nonempty input piece ``L \\ U M_j`` must have a base with no
    vertical direction; it then is the graph of an affine map on the
    projection ``K`` and contributes the domain ``K \\ U pi(M_j)``.
    Overlapping pieces must agree where both are defined; the output pieces
    are made disjoint by subtracting earlier regions.
    """
    d = split_dim
    if not 0 < d < S.dim:
        raise DimensionMismatch(f"split dimension {d} outside 1..{S.dim - 1}")
    raw = []
    for piece in S.pieces:
        got = _graph_piece(piece, d)
        if got is not None and got[0] is not None:
            raw.append(got)
    for i, (pi, ai) in enumerate(raw):
        for pj, aj in raw[i + 1:]:
            meet = coset_intersect(pi.base, pj.base)
            if meet is None:
                continue
            agree = _agreement(ai, aj, meet)
            if agree == meet:
                continue
            blockers = list(pi.holes) + list(pj.holes) + ([agree] if agree is not None else [])
            covered, x = is_covered(meet, blockers)
            if not covered:
                raise NotAGraph("two pieces disagree on a common point", (x, ai(x), aj(x)))
    pieces = []
    done: list[Piece] = []
    for region, amap in raw:
        parts = [region]
        for prev in done:
            parts = [r for part in parts for r in _minus(part, prev)]
        for part in parts:
            pieces.append((part, amap))
        done.append(region)
    return LatticePiecewiseAffine(tuple(pieces), d, S.dim - d)
