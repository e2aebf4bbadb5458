"""Integer lattices and their cosets in Z^d.

Lattices are stored in a column Hermite normal form: basis columns are in
echelon form (column ``j`` is zero above its pivot row ``p_j``, pivots
strictly increase), pivots are positive and the entries left of a pivot in
its row are reduced into ``[0, pivot)``.  That form is unique per lattice, so
lattice and coset equality are structural.

All arithmetic is on Python ints.  The vectorised ``*_many`` helpers use
int64 numpy arrays and are meant for rasterising boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, NotASublattice

INFINITE = math.inf

Vector = tuple[int, ...]


def _echelon(columns: Sequence[Sequence[int]], dim: int, track: bool = False):
    """Column-reduce ``columns`` to canonical echelon form.

    Returns ``(basis, pivots, U)`` where ``basis`` holds the nonzero reduced
    columns, ``pivots`` their pivot rows, and (when ``track``) ``U`` is the
    unimodular matrix, as a list of columns, with ``A U = [basis | 0]``.
    """
    cols = [list(map(int, c)) for c in columns]
    k = len(cols)
    U = [[int(i == j) for i in range(k)] for j in range(k)] if track else None

    def axpy(dst, src, q):
        # column dst -= q * column src
        if q:
            cd, cs = cols[dst], cols[src]
            for i in range(dim):
                cd[i] -= q * cs[i]
            if track:
                ud, us = U[dst], U[src]
                for i in range(k):
                    ud[i] -= q * us[i]

    def swap(a, b):
        cols[a], cols[b] = cols[b], cols[a]
        if track:
            U[a], U[b] = U[b], U[a]

    def negate(a):
        cols[a] = [-x for x in cols[a]]
        if track:
            U[a] = [-x for x in U[a]]

    r = 0
    pivots: list[int] = []
    for row in range(dim):
        if r == k:
            break
        while True:
            nz = [c for c in range(r, k) if cols[c][row] != 0]
            if not nz:
                break
            best = min(nz, key=lambda c: abs(cols[c][row]))
            swap(r, best)
            if len(nz) == 1:
                break
            for c in range(r + 1, k):
                x = cols[c][row]
                if x:
                    axpy(c, r, x // cols[r][row])
        if r < k and cols[r][row] != 0:
            if cols[r][row] < 0:
                negate(r)
            p = cols[r][row]
            for c in range(r):
                axpy(c, r, cols[c][row] // p)
            pivots.append(row)
            r += 1
    basis = [tuple(cols[c]) for c in range(r)]
    return basis, pivots, U


def solve_integer(columns: Sequence[Sequence[int]], dim: int, rhs: Sequence[int]):
    """One integer solution ``z`` of ``A z = rhs`` (A given by columns), or None."""
    basis, pivots, U = _echelon(columns, dim, track=True)
    y = _echelon_solve(basis, pivots, rhs)
    if y is None:
        return None
    k = len(columns)
    z = [0] * k
    for j, yj in enumerate(y):
        if yj:
            for i in range(k):
                z[i] += U[j][i] * yj
    return tuple(z)


def integer_kernel(columns: Sequence[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """A basis of the integer kernel of the matrix with the given columns."""
    basis, _, U = _echelon(columns, dim, track=True)
    return [tuple(U[j]) for j in range(len(basis), len(columns))]


def _echelon_solve(basis, pivots, rhs):
    y = []
    for j, p in enumerate(pivots):
        num = rhs[p] - sum(basis[k][p] * y[k] for k in range(j))
        q, rem = divmod(num, basis[j][p])
        if rem:
            return None
        y.append(q)
    for i in range(len(rhs)):
        if sum(basis[k][i] * y[k] for k in range(len(y))) != rhs[i]:
            return None
    return y


@dataclass(frozen=True)
class IntLattice:
    """A subgroup of Z^d, kept in canonical form (build with :func:`canonicalize`)."""

    dim: int
    basis: tuple[Vector, ...]
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def matrix(self) -> np.ndarray:
        """The basis as a ``dim x rank`` int64 array (columns are generators)."""
        return np.array(self.basis, dtype=np.int64).reshape(self.rank, self.dim).T

    def coords(self, v: Sequence[int]):
        """Integer coordinates of ``v`` in the canonical basis, or None if ``v`` is outside."""
        if len(v) != self.dim:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{self.dim}")
        y = _echelon_solve(self.basis, self.pivots, [int(x) for x in v])
        return None if y is None else tuple(y)

    def contains(self, v: Sequence[int]) -> bool:
        return self.coords(v) is not None

    def point(self, y: Sequence[int]) -> Vector:
        return tuple(sum(b[i] * c for b, c in zip(self.basis, y)) for i in range(self.dim))

    def reduce(self, v: Sequence[int]) -> Vector:
        """Canonical representative of ``v`` modulo the lattice."""
        x = [int(a) for a in v]
        for col, p in zip(self.basis, self.pivots):
            q = x[p] // col[p]
            if q:
                for i in range(self.dim):
                    x[i] -= q * col[i]
        return tuple(x)

    def is_sublattice_of(self, other: "IntLattice") -> bool:
        return all(other.contains(b) for b in self.basis)

    def coords_many(self, V: np.ndarray):
        """Vectorised ``coords``: returns ``(mask, Y)`` for an ``N x dim`` int array."""
        V = np.asarray(V, dtype=np.int64)
        n = V.shape[0]
        Y = np.zeros((n, self.rank), dtype=np.int64)
        ok = np.ones(n, dtype=bool)
        for j, p in enumerate(self.pivots):
            num = V[:, p].copy()
            for k in range(j):
                if self.basis[k][p]:
                    num -= self.basis[k][p] * Y[:, k]
            piv = self.basis[j][p]
            ok &= (num % piv) == 0
            Y[:, j] = num // piv
        resid = V - Y @ self.matrix.T if self.rank else V
        ok &= np.all(resid == 0, axis=1)
        return ok, Y

    def __repr__(self):
        return f"IntLattice(dim={self.dim}, basis={list(self.basis)})"


def canonicalize(basis: Iterable[Sequence[int]] | np.ndarray, dim: int | None = None) -> IntLattice:
    """Canonical lattice spanned by the given generators.

    ``basis`` is a sequence of generator vectors or a ``dim x k`` array whose
    columns are the generators.  Dependent generators are fine.
    """
    if isinstance(basis, np.ndarray):
        if basis.ndim != 2:
            raise DimensionMismatch("basis array must be 2-d (columns are generators)")
        dim = basis.shape[0] if dim is None else dim
        cols = [tuple(int(x) for x in basis[:, j]) for j in range(basis.shape[1])]
    else:
        cols = [tuple(int(x) for x in c) for c in basis]
        if dim is None:
            if not cols:
                raise DimensionMismatch("dimension needed for an empty basis")
            dim = len(cols[0])
    for c in cols:
        if len(c) != dim:
            raise DimensionMismatch(f"generator {c} not in Z^{dim}")
    b, piv, _ = _echelon(cols, dim)
    return IntLattice(dim, tuple(b), tuple(piv))


def full_lattice(dim: int) -> IntLattice:
    return canonicalize([tuple(int(i == j) for i in range(dim)) for j in range(dim)], dim)


def zero_lattice(dim: int) -> IntLattice:
    return IntLattice(dim, (), ())


def lattice_intersection(a: IntLattice, b: IntLattice) -> IntLattice:
    if a.dim != b.dim:
        raise DimensionMismatch("lattices live in different dimensions")
    cols = list(a.basis) + [tuple(-x for x in v) for v in b.basis]
    gens = []
    for z in integer_kernel(cols, a.dim):
        gens.append(a.point(z[: a.rank]))
    return canonicalize(gens, a.dim)


def lattice_sum(a: IntLattice, b: IntLattice) -> IntLattice:
    return canonicalize(list(a.basis) + list(b.basis), a.dim)


def _det(rows: list[list[int]]) -> int:
    n = len(rows)
    m = [[Fraction(x) for x in r] for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return int(det)


def subgroup_index(sub: IntLattice, sup: IntLattice):
    """``[sup : sub]`` as an int, or ``INFINITE`` when the rank drops."""
    if sub.dim != sup.dim:
        raise DimensionMismatch("lattices live in different dimensions")
    coords = []
    for v in sub.basis:
        y = sup.coords(v)
        if y is None:
            raise NotASublattice(f"generator {v} is not in {sup}")
        coords.append(list(y))
    if sub.rank < sup.rank:
        return INFINITE
    if sup.rank == 0:
        return 1
    # columns of ``coords`` express sub's basis in sup's basis
    return abs(_det([list(r) for r in zip(*coords)]))


@dataclass(frozen=True)
class LatticeCoset:
    offset: Vector
    lattice: IntLattice

    def __post_init__(self):
        if len(self.offset) != self.lattice.dim:
            raise DimensionMismatch("offset and lattice dimensions differ")
        object.__setattr__(self, "offset", self.lattice.reduce(self.offset))

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def contains(self, x: Sequence[int]) -> bool:
        return coset_contains(self, x)

    def coords(self, x: Sequence[int]):
        return self.lattice.coords([int(a) - b for a, b in zip(x, self.offset)])

    def point(self, y: Sequence[int]) -> Vector:
        p = self.lattice.point(y)
        return tuple(a + b for a, b in zip(self.offset, p))

    def contains_many(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        return self.lattice.coords_many(X - np.array(self.offset, dtype=np.int64))[0]

    def __repr__(self):
        return f"{self.offset}+span{list(self.lattice.basis)}"


def coset(offset: Sequence[int], basis: Iterable[Sequence[int]] = ()) -> LatticeCoset:
    offset = tuple(int(x) for x in offset)
    return LatticeCoset(offset, canonicalize(list(basis), len(offset)))


def coset_contains(c: LatticeCoset, x: Sequence[int]) -> bool:
    if len(x) != c.dim:
        raise DimensionMismatch(f"point of length {len(x)} tested against a coset in Z^{c.dim}")
    return c.coords(x) is not None


def coset_intersect(a: LatticeCoset, b: LatticeCoset) -> LatticeCoset | None:
    """The intersection of two cosets, or None when it is empty."""
    if a.dim != b.dim:
        raise DimensionMismatch("cosets live in different dimensions")
    La, Lb = a.lattice, b.lattice
    cols = list(La.basis) + [tuple(-x for x in v) for v in Lb.basis]
    rhs = [y - x for x, y in zip(a.offset, b.offset)]
    if not cols:
        return a if all(r == 0 for r in rhs) else None
    z = solve_integer(cols, a.dim, rhs)
    if z is None:
        return None
    point = a.point(z[: La.rank])
    return LatticeCoset(point, lattice_intersection(La, Lb))


def coset_subset(a: LatticeCoset, b: LatticeCoset) -> bool:
    return b.contains(a.offset) and a.lattice.is_sublattice_of(b.lattice)


COVERED = "COVERED"


def _colex_box(side: int, dim: int) -> np.ndarray:
    """Points of ``[0, side)^dim`` ordered with the last coordinate slowest."""
    if dim == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((side,) * dim).reshape(dim, -1)
    return np.ascontiguousarray(grid[::-1].T)


def _residues(L: IntLattice) -> np.ndarray:
    """Canonical representatives of Z^d / L for a full-rank canonical L."""
    sides = [L.basis[j][p] for j, p in enumerate(L.pivots)]
    if not sides:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices(sides).reshape(len(sides), -1)
    pts = np.zeros((grid.shape[1], L.dim), dtype=np.int64)
    for j, p in enumerate(L.pivots):
        pts[:, p] = grid[j]
    return pts


def covering_witness(cosets: Sequence[LatticeCoset], dim: int | None = None):
    """Return ``COVERED`` if the cosets cover Z^d, else an uncovered point.

    Finite-index cosets are handled by a residue scan modulo the intersection
    of their lattices.  The remaining rank-deficient cosets lie in finitely
    many hyperplanes; a box of side ``k + 1`` (``k`` of them) contains more
    points than ``k`` hyperplanes can hit, so doubling the box side from 2 up
    to that cap always terminates with a witness.
    """
    cosets = list(cosets)
    if dim is None:
        if not cosets:
            raise DimensionMismatch("dimension needed for an empty family")
        dim = cosets[0].dim
    for c in cosets:
        if c.dim != dim:
            raise DimensionMismatch("cosets live in different dimensions")
    finite = [c for c in cosets if c.lattice.rank == dim]
    thin = [c for c in cosets if c.lattice.rank < dim]
    common = full_lattice(dim)
    for c in finite:
        common = lattice_intersection(common, c.lattice)
    reps = _residues(common)
    free = np.ones(len(reps), dtype=bool)
    for c in finite:
        free &= ~c.contains_many(reps)
    if not free.any():
        return COVERED
    r = tuple(int(x) for x in reps[np.argmax(free)])
    base = LatticeCoset(r, common)
    # express each thin coset inside ``base`` in base-lattice coordinates
    local = []
    for c in thin:
        meet = coset_intersect(base, c)
        if meet is None:
            continue
        y0 = base.coords(meet.offset)
        gens = [common.coords(v) for v in meet.lattice.basis]
        local.append(coset(y0, gens))
    cap = max(len(local) + 1, 2)
    side = 2
    while True:
        side = min(side, cap)
        box = _colex_box(side, dim)
        hit = np.zeros(len(box), dtype=bool)
        for c in local:
            hit |= c.contains_many(box)
        if not hit.all():
            y = box[np.argmin(hit)]
            return base.point(tuple(int(v) for v in y))
        if side >= cap:
            raise AssertionError("hyperplane counting bound violated; lattice arithmetic bug")
        side *= 2


def is_covered(base: LatticeCoset, holes: Sequence[LatticeCoset]):
    """Whether ``holes`` cover ``base``; returns ``(True, None)`` or ``(False, point)``."""
    local = []
    for h in holes:
        meet = coset_intersect(base, h)
        if meet is None:
            continue
        y0 = base.coords(meet.offset)
        gens = [base.lattice.coords(v) for v in meet.lattice.basis]
        local.append(coset(y0, gens) if base.lattice.rank else coset((), ()))
    if base.lattice.rank == 0:
        return (True, None) if local else (False, base.offset)
    res = covering_witness(local, base.lattice.rank)
    if res == COVERED:
        return True, None
    return False, base.point(res)
