"""Random test data shared by unit and acceptance tests."""

import itertools

import numpy as np

from cbfourier.lattice import coset
from cbfourier.piecewise import CosetRingSet, LatticeAffineMap, Piece


def box(dim, r):
    return np.array(list(itertools.product(range(-r, r + 1), repeat=dim)), dtype=np.int64)


def random_lattice_basis(rng, dim, max_index=8):
    """Upper triangular basis of a full-rank sublattice of index at most ``max_index``."""
    while True:
        diag = rng.integers(1, max_index + 1, size=dim)
        if np.prod(diag) <= max_index:
            break
    B = np.diag(diag)
    for i in range(dim):
        for j in range(i + 1, dim):
            B[i, j] = rng.integers(0, diag[i])
    return [tuple(int(x) for x in B[:, j]) for j in range(dim)]


def residues(basis, dim, bound=8):
    """Coset representatives of the lattice spanned by ``basis`` (brute force over a box)."""
    reps = []
    for x in itertools.product(range(bound), repeat=dim):
        if not any(coset(r, basis).contains(x) for r in reps):
            reps.append(x)
    return reps


def random_piecewise(rng, dim, codim=1, max_index=8, hole_prob=0.3):
    """A random piecewise affine map; returns ``(graph set, truth)``.

    ``truth(X)`` gives ``(defined_mask, values)`` computed directly from the
    integer matrices, without any lattice coordinates.
    """
    basis = random_lattice_basis(rng, dim, max_index)
    reps = residues(basis, dim)
    pieces, rules = [], []
    for r in reps:
        A = rng.integers(-3, 4, size=(codim, dim))
        b = rng.integers(-5, 6, size=codim)
        dom = coset(r, basis)
        amap = LatticeAffineMap.from_matrix(dom, A, b)
        holes = ()
        hole_rule = None
        if rng.random() < hole_prob:
            k = int(rng.integers(0, dim))
            sub = list(basis)
            sub[k] = tuple(2 * v for v in sub[k])
            hole = coset(r, sub)
            holes = (amap.graph(hole),)
            hole_rule = hole
        pieces.append(Piece(amap.graph(dom), holes))
        rules.append((dom, hole_rule, A, b))
    S = CosetRingSet(tuple(pieces), dim + codim)

    def truth(X):
        X = np.asarray(X, dtype=np.int64)
        defined = np.zeros(len(X), dtype=bool)
        vals = np.zeros((len(X), codim), dtype=np.int64)
        for dom, hole, A, b in rules:
            m = dom.contains_many(X)
            if hole is not None:
                m &= ~hole.contains_many(X)
            defined |= m
            vals[m] = X[m] @ A.T + b
        return defined, vals

    return S, truth


def random_thin_family(rng, dim=2, size=None):
    """Cosets of rank below ``dim`` (lines and points in the plane)."""
    size = size or int(rng.integers(1, 9))
    out = []
    for _ in range(size):
        off = tuple(int(v) for v in rng.integers(-6, 7, size=dim))
        rank = int(rng.integers(0, dim))
        gens = []
        for _ in range(rank):
            v = rng.integers(-3, 4, size=dim)
            if not v.any():
                v[0] = 1
            gens.append(tuple(int(x) for x in v))
        out.append(coset(off, gens))
    return out
