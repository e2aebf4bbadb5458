"""Experiments on homomorphisms between Fourier algebras of finite groups.

Everything here takes a :class:`~cbfourier.groups.PartialMap` ``alpha: Y -> G``
(``Y`` a subset of ``H``) or a :class:`~cbfourier.cb.LinearFunctionMap`
``Phi: C^G -> C^H`` and reports the invariants that the classification
theory ties together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cb import (
    CB_GAP_TOL,
    CbBound,
    LinearFunctionMap,
    adjoint,
    function_map_cb,
    is_completely_contractive,
    is_completely_positive,
)
from .errors import NotAHomomorphism, NotContractive, NotIsomorphism
from .groups import (
    ElementSet,
    FiniteGroup,
    PartialMap,
    direct_product,
    enumerate_cosets,
    is_affine,
    is_coset,
    is_group_homomorphism,
    is_isomorphism,
    is_subgroup,
)
from .reprs import (
    FunctionOnGroup,
    IrrepSet,
    a_norm,
    a_norm_many,
    compute_irreps,
    indicator,
    is_positive_definite,
    product_irreps,
    regular_representations,
)

SAEKI_BOUND = (1 + np.sqrt(2)) / 2


def build_phi_alpha(pm: PartialMap) -> LinearFunctionMap:
    """``(Phi u)(h) = u(alpha(h))`` on the domain and ``0`` off it."""
    M = np.zeros((pm.source.order, pm.target.order))
    for h, g in pm.mapping.items():
        M[h, g] = 1
    return LinearFunctionMap(pm.target, pm.source, M)


def extract_alpha(phi: LinearFunctionMap, tol: float = 1e-9) -> PartialMap:
    """Recover ``alpha`` from an algebra homomorphism.

    Row ``h`` of the matrix is the functional ``u -> (Phi u)(h)``; it is
    multiplicative on the delta basis iff it is zero or a single entry equal
    to one.  Otherwise a witness ``(h, s, t)`` is raised.
    """
    M = phi.matrix
    mapping = {}
    for h in range(M.shape[0]):
        row = M[h]
        nz = np.flatnonzero(np.abs(row) > tol)
        for s in nz:
            if abs(row[s] - 1) > tol:  # delta_s^2 = delta_s forces the entry to be 0 or 1
                raise NotAHomomorphism((h, int(s), int(s)))
        if len(nz) > 1:  # delta_s delta_t = 0 but the product of values is 1
            raise NotAHomomorphism((h, int(nz[0]), int(nz[1])))
        if len(nz) == 1:
            mapping[h] = int(nz[0])
    return PartialMap.from_dict(phi.target, phi.source, mapping)


def affine_decomposition(pm: PartialMap) -> list[ElementSet]:
    """Greedy split of the domain into cosets on which ``alpha`` is affine.

    Cosets are tried from largest to smallest; singletons always qualify, so
    this terminates.  Minimality is not guaranteed.
    """
    H = pm.source
    remaining = set(pm.domain.members)
    pieces = []
    cosets = sorted(enumerate_cosets(H), key=lambda c: (-len(c), c.members))
    while remaining:
        for C in cosets:
            if set(C.members) <= remaining:
                sub = PartialMap.from_dict(H, pm.target, {h: pm(h) for h in C.members})
                if is_affine(sub):
                    pieces.append(C)
                    remaining -= set(C.members)
                    break
    return pieces


def decomposition_bound(pieces: Sequence[ElementSet], irreps: IrrepSet | None = None) -> float:
    """``n * sum_i ||1_{Y_i}||`` for a decomposition into ``n`` pieces."""
    if not pieces:
        return 0.0
    H = pieces[0].parent
    irreps = irreps or compute_irreps(H)
    norms = a_norm_many(np.array([p.indicator() for p in pieces]), irreps)
    return float(len(pieces) * norms.sum())


@dataclass
class ClassificationReport:
    is_algebra_homomorphism: bool
    alpha: PartialMap | None
    domain: ElementSet
    is_piecewise_affine: bool
    is_affine: bool
    is_subgroup_homomorphism: bool
    cb: CbBound
    completely_contractive: bool | None
    completely_positive: bool
    consistent: bool
    pieces: list[ElementSet] = field(default_factory=list)
    singleton_bound: float = 0.0
    decomposition_bound: float = 0.0
    bounds_hold: bool = True

    def to_dict(self) -> dict:
        return {
            "is_algebra_homomorphism": self.is_algebra_homomorphism,
            "alpha": None if self.alpha is None else {str(h): g for h, g in self.alpha.mapping.items()},
            "domain": list(self.domain.members),
            "is_piecewise_affine": self.is_piecewise_affine,
            "is_affine": self.is_affine,
            "is_subgroup_homomorphism": self.is_subgroup_homomorphism,
            "cb": {"lower": self.cb.lower, "upper": self.cb.upper, "level": self.cb.level,
                   "method": self.cb.method},
            "completely_contractive": self.completely_contractive,
            "completely_positive": self.completely_positive,
            "consistent": self.consistent,
            "pieces": [list(p.members) for p in self.pieces],
            "singleton_bound": self.singleton_bound,
            "decomposition_bound": self.decomposition_bound,
            "bounds_hold": self.bounds_hold,
        }


def theorem_consistent(empty: bool, affine: bool, hom: bool, cc, cp: bool, upper: float,
                       tol: float = CB_GAP_TOL) -> bool:
    """The cc/affine and cp/homomorphism equivalences, with the zero map handled apart.

    The zero map has an empty domain, which is not a coset; it is accepted
    when its cb norm vanishes and it is completely positive.
    """
    if empty:
        return upper <= tol and cp
    return cc is not None and cc == affine and cp == hom


def classify(phi: LinearFunctionMap, seed: int = 0, solver_tol: float = 1e-9,
             tol: float = CB_GAP_TOL, cp_tol: float = 1e-9) -> ClassificationReport:
    pm = extract_alpha(phi)
    H = pm.source
    aff = bool(is_affine(pm)) if len(pm.domain) else False
    hom = is_group_homomorphism(pm) if len(pm.domain) else False
    cb = function_map_cb(phi, seed=seed, solver_tol=solver_tol, strict=False)
    cc = is_completely_contractive(cb, tol)
    cp = is_completely_positive(adjoint(phi).fourier_map(), cp_tol)
    consistent = theorem_consistent(len(pm.domain) == 0, aff, hom, cc, cp, cb.upper, tol)
    ih = compute_irreps(H)
    pieces = affine_decomposition(pm)
    singles = [ElementSet(H, (h,)) for h in pm.domain.members]
    sb = decomposition_bound(singles, ih)
    db = decomposition_bound(pieces, ih)
    holds = cb.upper <= sb + tol and cb.upper <= db + tol
    return ClassificationReport(True, pm, pm.domain, True, aff, hom, cb, cc, cp,
                                consistent and holds, pieces, sb, db, holds)


@dataclass(frozen=True)
class IdempotentReport:
    support: ElementSet
    norm: float
    is_coset: bool
    is_subgroup: bool
    is_positive_definite: bool
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def idempotent_report(S: ElementSet, irreps: IrrepSet | None = None, tol: float = 1e-6) -> IdempotentReport:
    G = S.parent
    irreps = irreps or compute_irreps(G)
    u = indicator(S)
    norm = a_norm(u, irreps).a_norm
    coset = bool(is_coset(S)) if len(S) else False
    sub = is_subgroup(S) if len(S) else False
    pd = is_positive_definite(u)
    bad = []
    if (norm <= 1 + tol) != coset:
        bad.append("norm one iff coset")
    if pd != sub:
        bad.append("positive definite iff subgroup")
    if G.is_abelian() and len(S) and not coset and norm < SAEKI_BOUND - tol:
        bad.append("abelian gap")
    return IdempotentReport(S, norm, coset, sub, pd, tuple(bad))


@dataclass(frozen=True)
class IdempotentScan:
    group: FiniteGroup
    reports: tuple[IdempotentReport, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def violations(self) -> list[IdempotentReport]:
        return [r for r in self.reports if not r.ok]

    def min_noncoset_norm(self) -> float | None:
        vals = [r.norm for r in self.reports if not r.is_coset]
        return min(vals) if vals else None

    def summary(self) -> dict:
        rs = self.reports
        return {
            "group": self.group.name,
            "order": self.group.order,
            "abelian": self.group.is_abelian(),
            "subsets": len(rs),
            "cosets": sum(r.is_coset for r in rs),
            "norm_one": sum(abs(r.norm - 1) <= 1e-6 for r in rs),
            "subgroups": sum(r.is_subgroup for r in rs),
            "positive_definite": sum(r.is_positive_definite for r in rs),
            "min_noncoset_norm": self.min_noncoset_norm(),
            "violations": [{"support": list(r.support.members), "failed": list(r.violations)}
                           for r in self.violations],
        }


def idempotent_scan(G: FiniteGroup, tol: float = 1e-6, pd_tol: float = 1e-9) -> IdempotentScan:
    """:func:`idempotent_report` for every nonempty subset, with the norms batched."""
    n = G.order
    masks = np.arange(1, 2**n)
    U = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
    norms = a_norm_many(U, compute_irreps(G))
    gram_idx = G.table[G.inverses[:, None], np.arange(n)[None, :]]
    gram = U[:, gram_idx]
    hermitian = np.abs(gram - gram.transpose(0, 2, 1)).max(axis=(1, 2)) <= pd_tol
    min_eig = np.linalg.eigvalsh(gram).min(axis=1)
    abelian = G.is_abelian()
    out = []
    for k, m in enumerate(masks):
        S = ElementSet(G, tuple(int(i) for i in range(n) if m >> i & 1))
        coset = bool(is_coset(S))
        sub = coset and G.identity in S
        pd = bool(hermitian[k] and min_eig[k] >= -pd_tol)
        norm = float(norms[k])
        bad = []
        if (norm <= 1 + tol) != coset:
            bad.append("norm one iff coset")
        if pd != sub:
            bad.append("positive definite iff subgroup")
        if abelian and not coset and norm < SAEKI_BOUND - tol:
            bad.append("abelian gap")
        out.append(IdempotentReport(S, norm, coset, sub, pd, tuple(bad)))
    return IdempotentScan(G, tuple(out))


@dataclass(frozen=True)
class DiagonalReport:
    group: FiniteGroup
    product: FiniteGroup
    w: FunctionOnGroup
    is_diagonal_indicator: bool
    is_positive_definite: bool
    norm: float

    @property
    def ok(self) -> bool:
        return self.is_diagonal_indicator and self.is_positive_definite and abs(self.norm - 1) <= 1e-9


def approximate_diagonal(G: FiniteGroup) -> DiagonalReport:
    """``w(s, t) = <lam(s) rho(t) delta_e, delta_e>`` on ``G x G``."""
    lam, rho = regular_representations(G)
    n = G.order
    GG = direct_product(G, G)
    e = G.identity
    vals = np.zeros(n * n)
    for s in range(n):
        for t in range(n):
            vals[s * n + t] = (lam[s] @ rho[t])[e, e]
    w = FunctionOnGroup(GG, vals)
    diag = np.zeros(n * n)
    diag[[s * n + s for s in range(n)]] = 1
    ig = compute_irreps(G)
    norm = float(a_norm_many(w.values[None, :], product_irreps(ig, ig, GG))[0])
    return DiagonalReport(G, GG, w, bool(np.array_equal(vals, diag)), is_positive_definite(w), norm)


def _rank(rows: list[list[Fraction]]) -> int:
    A = [r[:] for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(len(A)):
            if i != rank and A[i][c] != 0:
                f = A[i][c] / A[rank][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class RangeReport:
    zero_set: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    dimension: int
    equals_column_space: bool

    def basis(self, order: int) -> list[np.ndarray]:
        out = []
        for c in self.classes:
            v = np.zeros(order)
            v[list(c)] = 1
            out.append(v)
        return out


def range_characterization(phi: LinearFunctionMap) -> RangeReport:
    """The functions vanishing where ``Phi^*(lam(h)) = 0`` and constant where images agree.

    Checked against the column space of the matrix with exact rational ranks.
    """
    extract_alpha(phi)  # validates multiplicativity
    gens = adjoint(phi).generator_images
    Hn = phi.target.order
    flat = [tuple(np.round(g.reshape(-1), 12)) for g in gens]
    zero = tuple(h for h in range(Hn) if not np.any(gens[h]))
    classes: dict = {}
    for h in range(Hn):
        if h not in zero:
            classes.setdefault(flat[h], []).append(h)
    cls = tuple(tuple(v) for v in classes.values())
    B = [[Fraction(int(h in c)) for c in cls] for h in range(Hn)]
    M = [[Fraction(int(round(x.real))) for x in row] for row in phi.matrix]
    if not cls:
        equal = _rank(M) == 0 if M and M[0] else True
    else:
        rb, rm = _rank(B), _rank(M)
        both = _rank([b + m for b, m in zip(B, M)])
        equal = rb == rm == both
    return RangeReport(zero, cls, len(cls), equal)


@dataclass(frozen=True)
class WalterResult:
    s0: int
    beta: tuple[int, ...]
    completely_positive: bool
    cb: CbBound
    identity: int = 0

    @property
    def anchor_ok(self) -> bool:
        """Complete positivity forces the anchor to be the identity."""
        return (not self.completely_positive) or self.s0 == self.identity


def walter_classify(phi: LinearFunctionMap, tol: float = CB_GAP_TOL, seed: int = 0,
                    cb: CbBound | None = None) -> WalterResult:
    """Write a completely contractive isomorphism as ``Phi u(h) = u(s0 beta(h))``."""
    G, H = phi.source, phi.target
    if G.order != H.order:
        raise NotIsomorphism("groups have different orders")
    cb = cb or function_map_cb(phi, seed=seed, strict=False)
    if cb.upper > 1 + tol:
        raise NotContractive(f"cb norm sandwich [{cb.lower:.6g}, {cb.upper:.6g}] exceeds 1")
    pm = extract_alpha(phi)
    if len(pm.domain) != H.order or len(set(pm.images)) != G.order:
        raise NotIsomorphism("alpha is not a bijection of the groups")
    s0 = pm(H.identity)
    beta = tuple(G.mul(G.inv(s0), pm(h)) for h in range(H.order))
    if not is_isomorphism(H, G, beta):
        raise NotIsomorphism("s0^-1 alpha is not a group isomorphism")
    cp = is_completely_positive(adjoint(phi).fourier_map())
    return WalterResult(s0, beta, cp, cb, G.identity)


@dataclass(frozen=True)
class InversionReport:
    group: FiniteGroup
    cb: CbBound
    abelian: bool

    @property
    def ok(self) -> bool:
        return (not self.abelian) or self.cb.upper <= 1 + 1e-6


def inversion_map(G: FiniteGroup) -> LinearFunctionMap:
    """``u -> (s -> u(s^-1))``."""
    return LinearFunctionMap(G, G, np.eye(G.order)[G.inverses])


def inversion_map_report(G: FiniteGroup, seed: int = 0) -> InversionReport:
    cb = function_map_cb(inversion_map(G), seed=seed, strict=False)
    return InversionReport(G, cb, G.is_abelian())
