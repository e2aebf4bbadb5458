"""Completely bounded norms, Choi matrices and complete positivity.

A linear map between matrix algebras ``M_m -> M_n`` is stored as a
superoperator ``S`` of shape ``(n*n, m*m)`` acting on row-major
vectorisations: ``vec(phi(X)) = S @ X.reshape(-1)``.  A map may be declared
to live on a block-diagonal subalgebra ``M_d1 + M_d2 + ...`` of its domain
(``domain_blocks``) and to land in a block-diagonal subalgebra of its
codomain (``codomain_blocks``); both are how group von Neumann algebras show
up after a Fourier transform.

cb norms come back as a :class:`CbBound` sandwich.  The upper end is a
repaired primal point of a semidefinite program, the lower end the larger of
a repaired dual point and an alternating maximisation over contractions at
amplification level ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergence, OrderTooLarge, SolverFailure
from .groups import FiniteGroup
from .reprs import FunctionOnGroup, IrrepSet, compute_irreps, regular_representations
from .sdp import LMI, hermitian_basis_triplets, hermitian_from, solve_sdp

CB_DIM_BOUND = 12
SDP_VAR_BOUND = 6000
CB_GAP_TOL = 1e-3


def _offsets(blocks: Sequence[int]) -> list[int]:
    return [int(x) for x in np.cumsum([0, *blocks[:-1]])]


@dataclass(frozen=True, eq=False)
class MatrixMap:
    superop: np.ndarray
    m: int
    n: int
    domain_blocks: tuple[int, ...] | None = None
    codomain_blocks: tuple[int, ...] | None = None

    def __post_init__(self):
        S = np.asarray(self.superop, dtype=complex)
        if S.shape != (self.n * self.n, self.m * self.m):
            raise ValueError(f"superoperator shape {S.shape} does not match M_{self.m} -> M_{self.n}")
        object.__setattr__(self, "superop", S)
        for blocks, size in ((self.domain_blocks, self.m), (self.codomain_blocks, self.n)):
            if blocks is not None and sum(blocks) != size:
                raise ValueError(f"block sizes {blocks} do not add up to {size}")

    @classmethod
    def from_function(cls, f: Callable[[np.ndarray], np.ndarray], m: int, n: int, **kw) -> "MatrixMap":
        cols = []
        for k in range(m * m):
            E = np.zeros(m * m, complex)
            E[k] = 1
            cols.append(np.asarray(f(E.reshape(m, m)), complex).reshape(-1))
        return cls(np.array(cols).T, m, n, **kw)

    @property
    def s4(self) -> np.ndarray:
        """``S[p, q, i, j]`` = entry ``(p, q)`` of ``phi(E_ij)``."""
        return self.superop.reshape(self.n, self.n, self.m, self.m)

    @property
    def dblocks(self) -> tuple[int, ...]:
        return self.domain_blocks or (self.m,)

    @property
    def cblocks(self) -> tuple[int, ...]:
        return self.codomain_blocks or (self.n,)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return (self.superop @ np.asarray(X, complex).reshape(-1)).reshape(self.n, self.n)

    def compose(self, other: "MatrixMap") -> "MatrixMap":
        """``self o other``."""
        if other.n != self.m:
            raise ValueError("dimension mismatch in composition")
        return MatrixMap(self.superop @ other.superop, other.m, self.n,
                         other.domain_blocks, self.codomain_blocks)

    def choi(self) -> np.ndarray:
        """``C[(i,p),(j,q)] = phi(E_ij)[p,q]``."""
        m, n = self.m, self.n
        return self.s4.transpose(2, 0, 3, 1).reshape(m * n, m * n)

    def domain_choi_blocks(self) -> list[np.ndarray]:
        S4 = self.s4
        out = []
        for o, d in zip(_offsets(self.dblocks), self.dblocks):
            out.append(S4[:, :, o:o + d, o:o + d].transpose(2, 0, 3, 1).reshape(d * self.n, d * self.n))
        return out

    def component(self, k: int) -> "MatrixMap":
        """Compression onto the ``k``-th codomain block."""
        o, d = _offsets(self.cblocks)[k], self.cblocks[k]
        S4 = self.s4[o:o + d, o:o + d]
        return MatrixMap(S4.reshape(d * d, self.m * self.m), self.m, d, self.domain_blocks, None)


def identity_map(m: int) -> MatrixMap:
    return MatrixMap(np.eye(m * m), m, m)


def transpose_map(m: int) -> MatrixMap:
    return MatrixMap.from_function(lambda X: X.T, m, m)


def tensor_with_identity(phi: MatrixMap, k: int) -> MatrixMap:
    """``phi (x) id_{M_k}`` with tensor index order (algebra index, k index)."""
    if k < 1:
        raise ValueError("k must be positive")
    I = np.eye(k)
    S = np.einsum("pqij,ac,bd->paqbicjd", phi.s4, I, I)
    m, n = phi.m * k, phi.n * k
    db = None if phi.domain_blocks is None else tuple(d * k for d in phi.domain_blocks)
    cb = None if phi.codomain_blocks is None else tuple(d * k for d in phi.codomain_blocks)
    return MatrixMap(S.reshape(n * n, m * m), m, n, db, cb)


def choi_min_eigenvalue(phi: MatrixMap) -> float:
    """Smallest eigenvalue over the domain blocks' Choi matrices (``-inf`` if not Hermitian)."""
    worst = np.inf
    for J in phi.domain_choi_blocks():
        if np.abs(J - J.conj().T).max() > 1e-9 * max(1.0, np.abs(J).max()):
            return -np.inf
        worst = min(worst, float(np.linalg.eigvalsh((J + J.conj().T) / 2)[0]))
    return worst


def is_completely_positive(phi: MatrixMap, tol: float = 1e-9) -> bool:
    return choi_min_eigenvalue(phi) >= -tol


@dataclass(frozen=True)
class CbBound:
    lower: float
    upper: float
    level: int
    method: str = "sdp"
    details: dict = field(default_factory=dict, compare=False)

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def relative_gap(self) -> float:
        return self.gap / max(1.0, abs(self.upper))

    def contains(self, value: float, tol: float = 1e-6) -> bool:
        return self.lower - tol <= value <= self.upper + tol


def _alternating_lower(comp: MatrixMap, level: int, restarts: int, seed: int,
                       iters: int = 400) -> float:
    """``||id_L (x) phi||`` from below by alternating over contractions and unit vectors."""
    S4 = comp.s4
    n, m, L = comp.n, comp.m, level
    blocks = [np.arange(o, o + d) for o, d in zip(_offsets(comp.dblocks), comp.dblocks)]
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        xi = rng.normal(size=(L, n)) + 1j * rng.normal(size=(L, n))
        eta = rng.normal(size=(L, n)) + 1j * rng.normal(size=(L, n))
        xi /= np.linalg.norm(xi)
        eta /= np.linalg.norm(eta)
        prev = -1.0
        for _ in range(iters):
            D = np.einsum("pqij,ap,bq->bjai", S4, xi.conj(), eta)
            X = np.zeros((L, m, L, m), complex)
            for b in blocks:
                d = len(b)
                Db = D[:, b][:, :, :, b].reshape(L * d, L * d)
                U, _, Vh = np.linalg.svd(Db)
                X[np.ix_(range(L), b, range(L), b)] = (Vh.conj().T @ U.conj().T).reshape(L, d, L, d)
            Y = np.einsum("pqij,aibj->apbq", S4, X).reshape(L * n, L * n)
            U, s, Vh = np.linalg.svd(Y)
            val = float(s[0])
            xi = U[:, 0].reshape(L, n)
            eta = Vh[0].conj().reshape(L, n)
            if val <= prev * (1 + 1e-13) + 1e-15:
                break
            prev = val
        best = max(best, max(val, prev))
    return best


def _partial_trace_triplets(a, r, c, v, n):
    """Keep entries ``((i,p),(i,q))`` and map them to ``(p, q)``."""
    keep = (r // n) == (c // n)
    return a[keep], r[keep] % n, c[keep] % n, v[keep]


def _sdp_bounds(Js: list[np.ndarray], dims: Sequence[int], n: int, tol: float):
    ks = [d * n for d in dims]
    nvar = 1 + sum(2 * k * k for k in ks)
    if nvar > SDP_VAR_BOUND:
        raise OrderTooLarge(f"semidefinite program with {nvar} variables exceeds the bound {SDP_VAR_BOUND}")
    lmis = []
    tr_p = LMI(n, np.zeros((n, n), complex))
    tr_q = LMI(n, np.zeros((n, n), complex))
    diag = np.arange(n)
    tr_p.add(np.zeros(n), diag, diag, 1.0)
    tr_q.add(np.zeros(n), diag, diag, 1.0)
    offs = []
    off = 1
    for J, k in zip(Js, ks):
        F0 = np.zeros((2 * k, 2 * k), complex)
        F0[:k, k:] = J
        F0[k:, :k] = J.conj().T
        lmi = LMI(2 * k, F0)
        a, r, c, v = hermitian_basis_triplets(k)
        lmi.add(off + a, r, c, v)
        lmi.add(off + k * k + a, k + r, k + c, v)
        pa, pr, pc, pv = _partial_trace_triplets(a, r, c, v, n)
        tr_p.add(off + pa, pr, pc, -pv)
        tr_q.add(off + k * k + pa, pr, pc, -pv)
        offs.append(off)
        off += 2 * k * k
        lmis.append(lmi)
    lmis += [tr_p, tr_q]
    cost = np.zeros(nvar)
    cost[0] = 1.0
    res = solve_sdp(cost, lmis, tol=tol)

    # certified upper bound: shift P, Q until every block is PSD, then measure
    sumP = np.zeros((n, n), complex)
    sumQ = np.zeros((n, n), complex)
    for J, k, d, o in zip(Js, ks, dims, offs):
        P = hermitian_from(res.x[o:o + k * k], k)
        Q = hermitian_from(res.x[o + k * k:o + 2 * k * k], k)
        M = np.block([[P, J], [J.conj().T, Q]])
        eps = max(0.0, -float(np.linalg.eigvalsh(M)[0])) * (1 + 1e-9) + 1e-14
        P = P + eps * np.eye(k)
        Q = Q + eps * np.eye(k)
        sumP += np.einsum("ipiq->pq", P.reshape(d, n, d, n))
        sumQ += np.einsum("ipiq->pq", Q.reshape(d, n, d, n))
    upper = max(float(np.linalg.eigvalsh((sumP + sumP.conj().T) / 2)[-1]),
                float(np.linalg.eigvalsh((sumQ + sumQ.conj().T) / 2)[-1]))

    # certified lower bound from the dual point
    def psd_part(Z):
        w, V = np.linalg.eigh((Z + Z.conj().T) / 2)
        return (V * np.clip(w, 0, None)) @ V.conj().T

    R, S = psd_part(res.duals[-2]), psd_part(res.duals[-1])
    scale = np.real(np.trace(R) + np.trace(S))
    lower = 0.0
    if scale > 0:
        bump = 1e-12 * scale
        R = R + bump * np.eye(n)
        S = S + bump * np.eye(n)
        scale = np.real(np.trace(R) + np.trace(S))
        wr, Vr = np.linalg.eigh(R)
        ws, Vs = np.linalg.eigh(S)
        r_isqrt = (Vr / np.sqrt(wr)) @ Vr.conj().T
        s_isqrt = (Vs / np.sqrt(ws)) @ Vs.conj().T
        total = 0.0
        for J, k, d, Z in zip(Js, ks, dims, res.duals):
            B = Z[:k, k:]
            K = np.kron(np.eye(d), r_isqrt) @ B @ np.kron(np.eye(d), s_isqrt)
            nk = float(np.linalg.norm(K, 2))
            if nk > 1:
                B = B / nk
            total += 2 * abs(np.trace(B.conj().T @ J))
        lower = total / scale
    return lower, upper, {"sdp_primal": res.primal, "sdp_dual": res.dual, "status": res.status}


def _component_bound(comp: MatrixMap, seed: int, restarts: int, tol: float):
    Js = comp.domain_choi_blocks()
    if all(np.abs(J).max() == 0 for J in Js):
        return 0.0, 0.0, "zero", {}
    if comp.n == 1:
        val = float(sum(np.linalg.svd(J, compute_uv=False).sum() for J in Js))
        return val, val, "exact functional", {}
    if comp.m > CB_DIM_BOUND or comp.n > CB_DIM_BOUND:
        raise OrderTooLarge(f"cb norm limited to M_{CB_DIM_BOUND}")
    alt = _alternating_lower(comp, comp.n, restarts, seed)
    dual, upper, info = _sdp_bounds(Js, comp.dblocks, comp.n, tol)
    info = dict(info, alternating=alt, dual_certificate=dual)
    return max(alt, dual), upper, "sdp", info


def cb_norm(phi: MatrixMap, seed: int = 0, restarts: int = 8, solver_tol: float = 1e-9,
            gap_tol: float = CB_GAP_TOL, strict: bool = True) -> CbBound:
    """Sandwich for ``||phi||_cb``, computed per codomain block and maximised."""
    lower = upper = 0.0
    methods = []
    details = []
    for k in range(len(phi.cblocks)):
        lo, up, how, info = _component_bound(phi.component(k), seed + k, restarts, solver_tol)
        if lo > up + 1e-6 * max(1.0, up):
            raise SolverFailure("lower bound exceeds upper bound", {"lower": lo, "upper": up, **info})
        lower, upper = max(lower, lo), max(upper, up)
        methods.append(how)
        details.append({"block": k, "lower": lo, "upper": up, "method": how})
    level = max(phi.cblocks)
    bound = CbBound(lower, upper, level, "+".join(sorted(set(methods))), {"components": details})
    if strict and bound.relative_gap > gap_tol:
        raise NonConvergence(f"cb sandwich [{lower}, {upper}] did not close to {gap_tol}")
    return bound


# ---------------------------------------------------------------------------
# maps between function spaces on groups and their adjoints


@dataclass(frozen=True, eq=False)
class LinearFunctionMap:
    """``(Phi u)(h) = sum_s M[h, s] u(s)`` from functions on ``source`` to functions on ``target``."""

    source: FiniteGroup
    target: FiniteGroup
    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=complex)
        if M.shape != (self.target.order, self.source.order):
            raise ValueError(f"matrix shape {M.shape} != ({self.target.order}, {self.source.order})")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    def __call__(self, u: FunctionOnGroup) -> FunctionOnGroup:
        if u.group != self.source:
            raise ValueError("function lives on the wrong group")
        return FunctionOnGroup(self.target, self.matrix @ u.values)

    def __mul__(self, c: complex) -> "LinearFunctionMap":
        return LinearFunctionMap(self.source, self.target, self.matrix * c)

    __rmul__ = __mul__


def multiplication_map(u: FunctionOnGroup) -> LinearFunctionMap:
    return LinearFunctionMap(u.group, u.group, np.diag(u.values))


def identity_function_map(G: FiniteGroup) -> LinearFunctionMap:
    return LinearFunctionMap(G, G, np.eye(G.order))


def conditional_expectation(H: FiniteGroup) -> MatrixMap:
    """``E(X) = sum_h tau(X lam(h)^*) lam(h)`` onto the left group algebra of ``H``."""
    lam, _ = regular_representations(H)
    n = H.order
    S = np.einsum("hij,hpq->pqij", lam, lam) / n
    return MatrixMap(S.reshape(n * n, n * n), n, n)


def vn_coefficients(T: np.ndarray, G: FiniteGroup) -> np.ndarray:
    """Coefficients ``a`` with ``T = sum_s a_s lam(s)`` (assuming ``T`` lies in the algebra)."""
    return np.asarray(T)[:, G.identity]


@dataclass(frozen=True, eq=False)
class AdjointMap:
    """``Phi^*(lam_H(h)) = sum_s M[h, s] lam_G(s)``, extended linearly."""

    phi: LinearFunctionMap

    @property
    def generator_images(self) -> np.ndarray:
        lam, _ = regular_representations(self.phi.source)
        return np.einsum("hs,sij->hij", self.phi.matrix, lam)

    def __call__(self, T: np.ndarray) -> np.ndarray:
        """Apply to an element of the left group algebra of ``H`` (given as a matrix)."""
        a = vn_coefficients(T, self.phi.target)
        return np.einsum("h,hij->ij", a, self.generator_images)

    def duality_residual(self, u: FunctionOnGroup) -> float:
        """``max_h |<Phi u, lam_H(h)> - <u, Phi^*(lam_H(h))>|``."""
        lhs = self.phi(u).values
        rhs = np.array([(vn_coefficients(X, self.phi.source) * u.values).sum()
                        for X in self.generator_images])
        return float(np.abs(lhs - rhs).max()) if lhs.size else 0.0

    def full_map(self) -> MatrixMap:
        """``Phi^* o E`` on all of ``M_|H|``."""
        H, G = self.phi.target, self.phi.source
        lam_h, _ = regular_representations(H)
        img = self.generator_images
        S = np.einsum("hij,hpq->pqij", lam_h, img) / H.order
        return MatrixMap(S.reshape(G.order ** 2, H.order ** 2), H.order, G.order)

    def fourier_map(self, irreps_h: IrrepSet | None = None, irreps_g: IrrepSet | None = None) -> MatrixMap:
        """The same map after Fourier transforming both group algebras.

        Domain ``sum_sigma M_{d_sigma}`` (irreps of ``H``), codomain
        ``sum_pi M_{d_pi}`` (irreps of ``G``).
        """
        H, G = self.phi.target, self.phi.source
        ih = irreps_h or compute_irreps(H)
        ig = irreps_g or compute_irreps(G)
        return fourier_adjoint(self.phi.matrix, ih, ig)


def fourier_adjoint(M: np.ndarray, ih: IrrepSet, ig: IrrepSet) -> MatrixMap:
    H = ih.group
    dh, dg = ih.dims, ig.dims
    m, n = sum(dh), sum(dg)
    # image of lam_H(h) inside sum_pi M_{d_pi}
    img = np.zeros((H.order, n, n), complex)
    for o, r in zip(_offsets(dg), ig.irreps):
        d = r.shape[1]
        img[:, o:o + d, o:o + d] = np.einsum("hs,sij->hij", M, r)
    S4 = np.zeros((n, n, m, m), complex)
    for o, r in zip(_offsets(dh), ih.irreps):
        d = r.shape[1]
        S4[:, :, o:o + d, o:o + d] = np.einsum("hij,hpq->pqij", r.conj(), img) * d / H.order
    return MatrixMap(S4.reshape(n * n, m * m), m, n, tuple(dh), tuple(dg))


def adjoint(phi: LinearFunctionMap) -> AdjointMap:
    return AdjointMap(phi)


def function_map_cb(phi: LinearFunctionMap, seed: int = 0, restarts: int = 8,
                    solver_tol: float = 1e-9, strict: bool = True) -> CbBound:
    """cb norm of ``Phi`` via its adjoint in Fourier block form."""
    return cb_norm(adjoint(phi).fourier_map(), seed=seed, restarts=restarts,
                   solver_tol=solver_tol, strict=strict)


def is_completely_contractive(target, tol: float = CB_GAP_TOL, **kw):
    """``True`` if ``upper <= 1 + tol``, ``False`` if ``lower > 1 + tol``, else ``None``.

    ``target`` is a :class:`CbBound`, a :class:`MatrixMap` or a
    :class:`LinearFunctionMap`.
    """
    if isinstance(target, CbBound):
        bound = target
    elif isinstance(target, MatrixMap):
        bound = cb_norm(target, strict=False, **kw)
    else:
        bound = function_map_cb(target, strict=False, **kw)
    if bound.upper <= 1 + tol:
        return True
    if bound.lower > 1 + tol:
        return False
    return None
