"""Finite groups given by Cayley tables, cosets and affine maps.

Elements are plain integer indices ``0..order-1``; ``table[i, j]`` is the
index of the product ``g_i g_j``.  Everything here is exact and exhaustive,
which is fine at the sizes we care about (order at most a few dozen).
"""

from __future__ import annotations

import itertools
from functools import cached_property
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NotAGroup, OrderTooLarge

DEFAULT_SUBGROUP_BOUND = 24


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    order: int
    table: np.ndarray
    identity: int
    inverses: np.ndarray
    name: str = ""
    element_names: tuple[str, ...] | None = None

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverses[a])

    def prod(self, *elems: int) -> int:
        out = self.identity
        for e in elems:
            out = int(self.table[out, e])
        return out

    @property
    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = int(self.table[x, a])
            k += 1
        return k

    def element_orders(self) -> list[int]:
        return [self.element_order(a) for a in range(self.order)]

    def label(self, a: int) -> str:
        if self.element_names is not None:
            return self.element_names[a]
        return str(a)

    def __eq__(self, other):
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.order, self.table.tobytes()))

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


def build_group(table, name: str = "", element_names: Sequence[str] | None = None) -> FiniteGroup:
    """Validate a Cayley table and return the group it defines.

    Raises :class:`NotAGroup` naming the first failed axiom with a witness.
    """
    try:
        t = np.array(table, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise NotAGroup("table is not a rectangular integer array", name=name) from exc
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise NotAGroup("table is not a nonempty square array", t.shape, name=name)
    n = t.shape[0]
    bad = np.argwhere((t < 0) | (t >= n))
    if bad.size:
        i, j = map(int, bad[0])
        raise NotAGroup("entries in range", (i, j), name=name)
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(t[i]), full):
            raise NotAGroup("Latin square (row)", i, name=name)
        if not np.array_equal(np.sort(t[:, i]), full):
            raise NotAGroup("Latin square (column)", i, name=name)
    ids = [e for e in range(n) if np.array_equal(t[e], full) and np.array_equal(t[:, e], full)]
    if not ids:
        raise NotAGroup("identity", None, name=name)
    e = ids[0]
    # (ab)c == a(bc) for every triple, checked in one shot
    lhs = t[t[:, :, None], full[None, None, :]]
    rhs = t[full[:, None, None], t[None, :, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        a, b, c = map(int, bad[0])
        raise NotAGroup("associativity", (a, b, c), name=name)
    inverses = np.argmax(t == e, axis=1)
    for a in range(n):
        if t[a, inverses[a]] != e or t[inverses[a], a] != e:
            raise NotAGroup("inverses", a, name=name)
    if element_names is not None:
        element_names = tuple(str(s) for s in element_names)
        if len(element_names) != n:
            raise NotAGroup("element name count", len(element_names), name=name)
    return FiniteGroup(n, _frozen(t), int(e), _frozen(inverses), name, element_names)


def cyclic_group(n: int, name: str | None = None) -> FiniteGroup:
    idx = np.arange(n)
    return build_group((idx[:, None] + idx[None, :]) % n, name or f"Z{n}")


def trivial_group() -> FiniteGroup:
    return build_group([[0]], "trivial")


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """Componentwise product group; the pair ``(g, h)`` has index ``g * |H| + h``."""
    m = H.order
    gi = np.repeat(np.arange(G.order), m)
    hi = np.tile(np.arange(m), G.order)
    table = G.table[gi[:, None], gi[None, :]] * m + H.table[hi[:, None], hi[None, :]]
    names = None
    if G.element_names is not None or H.element_names is not None:
        names = [f"({G.label(a)},{H.label(b)})" for a, b in zip(gi, hi)]
    return build_group(table, name or f"{G.name}x{H.name}", names)


def product_index(G: FiniteGroup, H: FiniteGroup, g: int, h: int) -> int:
    return g * H.order + h


def permutation_group(perms: Iterable[Sequence[int]], name: str = "",
                      names: Sequence[str] | None = None) -> FiniteGroup:
    """Group of permutations (tuples), composed as ``(p q)(x) = p(q(x))``."""
    perms = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(len(q)))] for q in perms] for p in perms]
    return build_group(table, name, names)


def symmetric_group(k: int, name: str | None = None) -> FiniteGroup:
    return permutation_group(sorted(itertools.permutations(range(k))), name or f"S{k}")


def alternating_group(k: int, name: str | None = None) -> FiniteGroup:
    def even(p):
        inversions = sum(1 for i in range(k) for j in range(i + 1, k) if p[i] > p[j])
        return inversions % 2 == 0

    return permutation_group(
        sorted(p for p in itertools.permutations(range(k)) if even(p)), name or f"A{k}"
    )


def dihedral_group(n: int, name: str | None = None) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; ``r^k`` is index k, ``s r^k`` is n + k."""
    def mul(a, b):
        fa, ka = divmod(a, n)
        fb, kb = divmod(b, n)
        # r^k s = s r^-k
        k = (ka + kb) % n if fb == 0 else (-ka + kb) % n
        return ((fa + fb) % 2) * n + k

    table = [[mul(a, b) for b in range(2 * n)] for a in range(2 * n)]
    names = [f"r{k}" for k in range(n)] + [f"sr{k}" for k in range(n)]
    return build_group(table, name or f"D{n}", names)


def quaternion_group(name: str = "Q8") -> FiniteGroup:
    labels = ["1", "i", "j", "k", "-1", "-i", "-j", "-k"]
    # unit quaternions as (sign, axis) with axis 0..3 = 1,i,j,k
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mul(a, b):
        sa, xa = (1 if a < 4 else -1), a % 4
        sb, xb = (1 if b < 4 else -1), b % 4
        s, x = mult[(xa, xb)]
        s *= sa * sb
        return x if s == 1 else x + 4

    return build_group([[mul(a, b) for b in range(8)] for a in range(8)], name, labels)


@dataclass(frozen=True)
class ElementSet:
    parent: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(m) for m in self.members)))
        for m in members:
            if not 0 <= m < self.parent.order:
                raise ValueError(f"element {m} out of range for order {self.parent.order}")
        object.__setattr__(self, "members", members)

    def __contains__(self, a) -> bool:
        return a in self._lookup

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def indicator(self) -> np.ndarray:
        v = np.zeros(self.parent.order)
        v[list(self.members)] = 1.0
        return v

    def translate(self, s: int) -> "ElementSet":
        return ElementSet(self.parent, tuple(self.parent.mul(s, c) for c in self.members))


def element_set(G: FiniteGroup, members: Iterable[int]) -> ElementSet:
    return ElementSet(G, tuple(members))


@dataclass(frozen=True)
class CosetTest:
    is_coset: bool
    subgroup: ElementSet | None = None
    witness: tuple[int, int, int] | None = None

    def __bool__(self):
        return self.is_coset


def is_coset(C: ElementSet) -> CosetTest:
    """Decide whether ``C`` is a coset via closure under ``r s^-1 t``.

    On success the subgroup ``C^-1 C`` is returned and ``C = s C^-1 C`` is
    checked for every ``s`` in ``C``.  The empty set is not a coset.
    """
    G = C.parent
    mem = np.array(C.members, dtype=np.int64)
    if mem.size == 0:
        return CosetTest(False)
    inside = np.zeros(G.order, dtype=bool)
    inside[mem] = True
    rs = G.table[mem[:, None], G.inverses[mem][None, :]]          # r s^-1
    rst = G.table[rs[:, :, None], mem[None, None, :]]             # r s^-1 t
    bad = np.argwhere(~inside[rst])
    if bad.size:
        i, j, k = map(int, bad[0])
        return CosetTest(False, witness=(int(mem[i]), int(mem[j]), int(mem[k])))
    sub = ElementSet(G, tuple(np.unique(G.table[G.inverses[mem][:, None], mem[None, :]])))
    for s in C.members:
        if sub.translate(s).members != C.members:
            raise AssertionError(f"coset identity C = sC^-1C failed at s={s}")
    return CosetTest(True, sub)


def is_subgroup(C: ElementSet) -> bool:
    return C.parent.identity in C and is_coset(C).is_coset


def subgroup_closure(G: FiniteGroup, generators: Iterable[int]) -> ElementSet:
    members = {G.identity}
    frontier = list(members)
    gens = list(dict.fromkeys(int(g) for g in generators))
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = G.mul(a, g)
                if b not in members:
                    members.add(b)
                    new.append(b)
        frontier = new
    return ElementSet(G, tuple(members))


def enumerate_subgroups(G: FiniteGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> list[ElementSet]:
    """All subgroups, sorted by (size, members)."""
    if G.order > bound:
        raise OrderTooLarge(f"order {G.order} exceeds subgroup enumeration bound {bound}")
    found = {(G.identity,)}
    frontier = [(G.identity,)]
    while frontier:
        new = []
        for members in frontier:
            have = set(members)
            for g in range(G.order):
                if g in have:
                    continue
                sub = subgroup_closure(G, members + (g,)).members
                if sub not in found:
                    found.add(sub)
                    new.append(sub)
        frontier = new
    return [ElementSet(G, m) for m in sorted(found, key=lambda m: (len(m), m))]


def enumerate_cosets(G: FiniteGroup, bound: int = DEFAULT_SUBGROUP_BOUND) -> list[ElementSet]:
    cosets = set()
    for K in enumerate_subgroups(G, bound):
        for s in range(G.order):
            cosets.add(K.translate(s).members)
    return [ElementSet(G, m) for m in sorted(cosets, key=lambda m: (len(m), m))]


@dataclass(frozen=True)
class PartialMap:
    """A map ``alpha: Y -> G`` defined on a subset ``Y`` of ``H``."""

    source: FiniteGroup
    target: FiniteGroup
    domain: ElementSet
    images: tuple[int, ...]

    def __post_init__(self):
        if self.domain.parent != self.source:
            raise ValueError("domain must be a subset of the source group")
        images = tuple(int(x) for x in self.images)
        if len(images) != len(self.domain):
            raise ValueError("images must be given for exactly the domain members")
        for x in images:
            if not 0 <= x < self.target.order:
                raise ValueError(f"image {x} out of range for target order {self.target.order}")
        object.__setattr__(self, "images", images)

    @classmethod
    def from_dict(cls, source: FiniteGroup, target: FiniteGroup, mapping: dict) -> "PartialMap":
        dom = ElementSet(source, tuple(mapping))
        return cls(source, target, dom, tuple(mapping[h] for h in dom.members))

    @classmethod
    def from_array(cls, source: FiniteGroup, target: FiniteGroup, arr) -> "PartialMap":
        """Build from a length-|H| sequence with -1 marking points outside the domain."""
        return cls.from_dict(source, target, {h: int(a) for h, a in enumerate(arr) if a >= 0})

    @cached_property
    def mapping(self) -> dict[int, int]:
        return dict(zip(self.domain.members, self.images))

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)

    def as_array(self) -> np.ndarray:
        out = np.full(self.source.order, -1, dtype=np.int64)
        out[list(self.domain.members)] = self.images
        return out

    def __call__(self, h: int) -> int:
        return self.mapping[h]

    def image_set(self) -> ElementSet:
        return ElementSet(self.target, self.images)


@dataclass(frozen=True)
class AffineWitness:
    """``t -> alpha(s)^-1 alpha(s t)`` on ``s^-1 Y``, a homomorphism of subgroups."""

    anchor_source: int
    anchor_target: int
    homomorphism: dict[int, int] = field(hash=False)


@dataclass(frozen=True)
class AffineTest:
    is_affine: bool
    witness: AffineWitness | None = None
    failure: tuple | None = None

    def __bool__(self):
        return self.is_affine


def is_affine(pm: PartialMap) -> AffineTest:
    H, G = pm.source, pm.target
    ct = is_coset(pm.domain)
    if not ct:
        return AffineTest(False, failure=("domain not a coset", ct.witness))
    amap = pm.as_dict()
    dom = pm.domain.members
    for r, s, t in itertools.product(dom, repeat=3):
        lhs = amap[H.prod(r, H.inv(s), t)]
        rhs = G.prod(amap[r], G.inv(amap[s]), amap[t])
        if lhs != rhs:
            return AffineTest(False, failure=("affine identity", (r, s, t)))
    s = dom[0]
    a_inv = G.inv(amap[s])
    hom = {H.mul(H.inv(s), y): G.mul(a_inv, amap[y]) for y in dom}
    assert _is_hom_dict(H, G, hom), "anchored map of an affine map must be a homomorphism"
    return AffineTest(True, AffineWitness(s, amap[s], hom))


def _is_hom_dict(H: FiniteGroup, G: FiniteGroup, hom: dict[int, int]) -> bool:
    keys = list(hom)
    if not is_subgroup(ElementSet(H, keys)):
        return False
    return all(hom[H.mul(a, b)] == G.mul(hom[a], hom[b]) for a in keys for b in keys)


def is_group_homomorphism(pm: PartialMap) -> bool:
    """True iff the domain is a subgroup and the map is multiplicative on it."""
    return _is_hom_dict(pm.source, pm.target, pm.as_dict())


def automorphisms(G: FiniteGroup) -> list[np.ndarray]:
    """All automorphisms as permutation arrays, identity first."""
    gens: list[int] = []
    span = subgroup_closure(G, gens)
    for g in range(G.order):
        if len(span) == G.order:
            break
        if g not in span:
            gens.append(g)
            span = subgroup_closure(G, gens)
    orders = G.element_orders()
    # every element as a word in the generators, found by BFS
    words = {G.identity: ()}
    frontier = [G.identity]
    while frontier:
        new = []
        for a in frontier:
            for k, g in enumerate(gens):
                b = G.mul(a, g)
                if b not in words:
                    words[b] = words[a] + (k,)
                    new.append(b)
        frontier = new
    candidates = [[x for x in range(G.order) if orders[x] == orders[g]] for g in gens]
    out = []
    for imgs in itertools.product(*candidates):
        perm = np.empty(G.order, dtype=np.int64)
        for a, w in words.items():
            perm[a] = G.prod(*(imgs[k] for k in w))
        if len(set(perm.tolist())) != G.order:
            continue
        if np.array_equal(perm[G.table], G.table[perm[:, None], perm[None, :]]):
            out.append(perm)
    out.sort(key=lambda p: (not np.array_equal(p, np.arange(G.order)), p.tolist()))
    return out


def is_isomorphic_by_invariants(G: FiniteGroup, H: FiniteGroup) -> bool:
    """Cheap invariant comparison (order statistics and abelianness); not a full test."""
    return (G.order == H.order and G.is_abelian() == H.is_abelian()
            and sorted(G.element_orders()) == sorted(H.element_orders()))


def is_isomorphism(G: FiniteGroup, H: FiniteGroup, perm) -> bool:
    """Whether ``perm`` (index ``a`` of G -> ``perm[a]`` of H) is a group isomorphism."""
    perm = np.asarray(perm)
    if G.order != H.order or sorted(perm.tolist()) != list(range(H.order)):
        return False
    return bool(np.array_equal(perm[G.table], H.table[perm[:, None], perm[None, :]]))
