"""Exhaustive checks over every partial map ``alpha: Y -> G`` with ``Y`` inside ``H``.

Maps are enumerated domain by domain as integer arrays, and every quantity
the classification needs is computed in batches:

* affinity and the homomorphism property from pair identities on ``Y``;
* complete positivity from the Fourier blocks
  ``J[sigma, pi] = (d_sigma/|H|) sum_{h in Y} conj(sigma(h)) (x) pi(alpha(h))``
  of the adjoint, which must all be positive semidefinite;
* the cb norm, which is the maximum over ``pi`` of the cb norms of the
  components.  One-dimensional ``pi`` give functionals, whose cb norm is
  the exact sum of trace norms.  Higher-dimensional ``pi`` get a batched
  level-one lower bound first; a map whose verdict is still open is handed
  to :func:`cbfourier.cb.cb_norm`.

The trivial bound ``||Phi||_cb <= |Y|`` (a sum of ``|Y|`` rank-one maps of cb
norm one) serves as the upper end whenever a lower bound alone settles the
verdict.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cb import CB_GAP_TOL, MatrixMap, cb_norm
from .errors import BudgetExceeded
from .groups import ElementSet, FiniteGroup, is_coset, is_subgroup
from .lab import theorem_consistent
from .reprs import a_norm_many, compute_irreps

DEFAULT_BUDGET = 10 ** 6
CHUNK = 1 << 16


@dataclass
class ScanSummary:
    G: str
    H: str
    total: int = 0
    affine: int = 0
    subgroup_hom: int = 0
    cp: int = 0
    cc: int = 0
    not_cc: int = 0
    indeterminate: int = 0
    inconsistent: int = 0
    inconsistent_examples: list = field(default_factory=list)
    worst_gap: float = 0.0
    worst_gap_map: list | None = None
    decided_by_lower_bound: int = 0
    refined: int = 0
    sdp_solves: int = 0
    max_affine_upper: float = 0.0
    min_hom_choi_eigenvalue: float = np.inf
    max_nonhom_choi_eigenvalue: float = -np.inf
    bound_violations: int = 0
    max_bound_ratio: float = 0.0
    cp_maps: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def consistent(self) -> bool:
        return self.inconsistent == 0 and self.indeterminate == 0 and self.bound_violations == 0

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("cp_maps", "elapsed")}
        d["consistent"] = self.consistent
        d["cp_map_count"] = len(self.cp_maps)
        for k in ("min_hom_choi_eigenvalue", "max_nonhom_choi_eigenvalue"):
            if not np.isfinite(d[k]):
                d[k] = None
        return d


def _trace_norm(J: np.ndarray) -> np.ndarray:
    if J.shape[-1] == 1:
        return np.abs(J[..., 0, 0])
    return np.linalg.svd(J, compute_uv=False).sum(axis=-1)


def _level_one_lower(Js: list[np.ndarray], dims: list[int], dp: int, rng, stop: float,
                     iters: int = 12, starts: int = 3) -> np.ndarray:
    """Batched ``sup_{xi, eta} sum_sigma ||F_sigma(xi, eta)||_1`` by alternating updates.

    ``F_sigma[i, j] = <phi(E_ij) eta, xi>``.  Every value recorded is the
    exact cb norm of a functional ``x -> <phi(x) eta, xi>`` with unit
    vectors, hence a lower bound for the component.  Maps whose bound
    already exceeds ``stop`` are dropped from further iterations.
    """
    N = Js[0].shape[0]
    J5 = [J.reshape(N, d, dp, d, dp) for J, d in zip(Js, dims)]
    best = np.zeros(N)
    for st in range(starts):
        live = np.flatnonzero(best <= stop)
        if live.size == 0:
            break
        L = live.size
        if st < dp:
            xi = np.zeros((L, dp), complex)
            xi[:, st] = 1
            eta = xi.copy()
        else:
            xi = rng.normal(size=(L, dp)) + 1j * rng.normal(size=(L, dp))
            eta = rng.normal(size=(L, dp)) + 1j * rng.normal(size=(L, dp))
            xi /= np.linalg.norm(xi, axis=1, keepdims=True)
            eta /= np.linalg.norm(eta, axis=1, keepdims=True)
        sub = [J[live] for J in J5]
        for _ in range(iters):
            Y = np.zeros((live.size, dp, dp), complex)
            val = np.zeros(live.size)
            for J in sub:
                F = np.einsum("nipjq,np,nq->nji", J, xi.conj(), eta)  # transposed
                if F.shape[1] == 1:
                    a = F[:, 0, 0]
                    val += np.abs(a)
                    X = np.where(a == 0, 1, np.conj(a) / np.where(a == 0, 1, np.abs(a)))[:, None, None]
                else:
                    U, s, Vh = np.linalg.svd(F)
                    val += s.sum(axis=1)
                    X = np.swapaxes(Vh, 1, 2).conj() @ np.swapaxes(U, 1, 2).conj()
                Y += np.einsum("nij,nipjq->npq", X, J)
            best[live] = np.maximum(best[live], val)
            keep = best[live] <= stop
            if not keep.any():
                break
            live, Y = live[keep], Y[keep]
            sub = [J[keep] for J in sub]
            U, s, Vh = np.linalg.svd(Y)
            xi = U[:, :, 0]
            eta = Vh[:, 0, :].conj()
    return best


def _component_map(Js: list[np.ndarray], dims: list[int], dp: int) -> MatrixMap:
    m = sum(dims)
    S4 = np.zeros((dp, dp, m, m), complex)
    o = 0
    for J, d in zip(Js, dims):
        S4[:, :, o:o + d, o:o + d] = J.reshape(d, dp, d, dp).transpose(1, 3, 0, 2)
        o += d
    return MatrixMap(S4.reshape(dp * dp, m * m), m, dp, tuple(dims), None)


def _domain_data(H: FiniteGroup):
    n = H.order
    info = []
    for mask in range(1 << n):
        Y = [h for h in range(n) if mask >> h & 1]
        if not Y:
            info.append((Y, False, False))
            continue
        S = ElementSet(H, Y)
        c = bool(is_coset(S))
        info.append((Y, c, c and is_subgroup(S)))
    return info


def _codes(nG: int, k: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % nG
        idx //= nG
    return out


def exhaustive_theorem_scan(G: FiniteGroup, H: FiniteGroup, budget: int = DEFAULT_BUDGET,
                            seed: int = 0, tol: float = CB_GAP_TOL, cp_tol: float = 1e-9,
                            solver_tol: float = 1e-9, collect_cp: bool = True) -> ScanSummary:
    """Classify every ``Phi_alpha`` for ``alpha: Y -> G``, ``Y`` a subset of ``H``."""
    t0 = time.perf_counter()
    nG, nH = G.order, H.order
    total = (nG + 1) ** nH
    if total > budget:
        raise BudgetExceeded(f"{total} partial maps {H.name or 'H'} -> {G.name or 'G'} exceed budget {budget}")
    ig, ih = compute_irreps(G, seed=seed), compute_irreps(H, seed=seed)
    sig = [(r.shape[1] / nH) * r.conj() for r in ih.irreps]
    sdims = [r.shape[1] for r in ih.irreps]
    pis = ig.irreps
    small = [r for r in pis if r.shape[1] == 1]
    big = [r for r in pis if r.shape[1] > 1]
    delta_norm = float(a_norm_many(np.eye(nH)[:1], ih)[0])  # norm of a point mass
    mulG, invG, mulH = G.table, G.inverses, H.table
    rng = np.random.default_rng(seed)
    cache: dict[bytes, tuple[float, float]] = {}
    out = ScanSummary(G.name, H.name)

    def record_inconsistent(code, why):
        out.inconsistent += 1
        if len(out.inconsistent_examples) < 10:
            out.inconsistent_examples.append({"map": code.tolist(), "reason": why})

    for Y, coset, subgroup in _domain_data(H):
        k = len(Y)
        if k == 0:
            out.total += 1
            out.cp += 1
            out.cc += 1
            code = np.full(nH, -1)
            if not theorem_consistent(True, False, False, True, True, 0.0, tol):
                record_inconsistent(code, "zero map")
            if collect_cp:
                out.cp_maps.append(code.tolist())
            continue
        loc = {h: i for i, h in enumerate(Y)}
        count = nG ** k
        for start in range(0, count, CHUNK):
            A = _codes(nG, k, start, min(count, start + CHUNK))
            N = A.shape[0]
            affine = np.zeros(N, bool)
            if coset:
                s0 = Y[0]
                a0inv = invG[A[:, 0]]
                affine[:] = True
                for r in Y:
                    for t in Y:
                        w = loc[int(mulH[mulH[r, H.inverses[s0]], t])]
                        affine &= A[:, w] == mulG[mulG[A[:, loc[r]], a0inv], A[:, loc[t]]]
            hom = np.zeros(N, bool)
            if subgroup:
                hom[:] = True
                for x in Y:
                    for y in Y:
                        hom &= A[:, loc[int(mulH[x, y])]] == mulG[A[:, loc[x]], A[:, loc[y]]]
            cp = np.ones(N, bool)
            mineig = np.full(N, np.inf)
            cb_small = np.zeros(N)
            big_blocks = []
            for r in pis:
                dp = r.shape[1]
                P = r[A]  # (N, k, dp, dp)
                blocks = []
                tn = np.zeros(N)
                for s, d in zip(sig, sdims):
                    J = np.einsum("hij,nhpq->nipjq", s[Y], P).reshape(N, d * dp, d * dp)
                    herm = np.abs(J - np.conj(np.swapaxes(J, 1, 2))).max(axis=(1, 2)) <= cp_tol
                    ev = np.linalg.eigvalsh(J)[:, 0]
                    ev = np.where(herm, ev, -np.inf)
                    mineig = np.minimum(mineig, ev)
                    if dp == 1:
                        tn += _trace_norm(J)
                    else:
                        blocks.append(J)
                if dp == 1:
                    cb_small = np.maximum(cb_small, tn)
                else:
                    big_blocks.append((dp, blocks))
            cp = mineig >= -cp_tol
            lower = cb_small.copy()
            upper = cb_small.copy()
            exact = np.ones(N, bool)
            if big_blocks:
                open_ = np.flatnonzero(lower <= 1 + tol)
                for dp, blocks in big_blocks:
                    if open_.size:
                        lb = _level_one_lower([J[open_] for J in blocks], sdims, dp, rng, 1 + tol)
                        lower[open_] = np.maximum(lower[open_], lb)
                        open_ = open_[lower[open_] <= 1 + tol]
                upper = np.maximum(upper, float(k))
                exact[:] = k == 1  # a single point: Phi is a rank-one map of cb norm one
                if k == 1:
                    lower = np.maximum(lower, 1.0)
                    upper = np.minimum(upper, 1.0)
                need = np.flatnonzero((lower <= 1 + tol) & (upper > 1 + tol))
                for i in need:
                    key = b"".join(np.round(J[i], 10).tobytes() for _, bl in big_blocks for J in bl)
                    if key not in cache:
                        lo = up = 0.0
                        for dp, blocks in big_blocks:
                            comp = _component_map([J[i] for J in blocks], sdims, dp)
                            b = cb_norm(comp, seed=seed, solver_tol=solver_tol, strict=False)
                            lo, up = max(lo, b.lower), max(up, b.upper)
                        cache[key] = (lo, up)
                        out.sdp_solves += 1
                    lo, up = cache[key]
                    lower[i] = max(lower[i], lo)
                    upper[i] = min(upper[i], max(cb_small[i], up))
                    exact[i] = True
                out.refined += need.size
            cc_true = upper <= 1 + tol
            cc_false = lower > 1 + tol
            out.total += N
            out.affine += int(affine.sum())
            out.subgroup_hom += int(hom.sum())
            out.cp += int(cp.sum())
            out.cc += int(cc_true.sum())
            out.not_cc += int(cc_false.sum())
            undecided = ~(cc_true | cc_false)
            out.indeterminate += int(undecided.sum())
            out.decided_by_lower_bound += int((~exact & cc_false).sum())
            bad = undecided | (cc_true != affine) | (cp != hom)
            bound = k * k * delta_norm
            viol = upper > bound + tol
            out.bound_violations += int(viol.sum())
            out.max_bound_ratio = max(out.max_bound_ratio, float((upper / bound).max()))
            if affine.any():
                out.max_affine_upper = max(out.max_affine_upper, float(upper[affine].max()))
            if hom.any():
                out.min_hom_choi_eigenvalue = min(out.min_hom_choi_eigenvalue, float(mineig[hom].min()))
            if (~hom).any():
                out.max_nonhom_choi_eigenvalue = max(out.max_nonhom_choi_eigenvalue,
                                                     float(mineig[~hom].max()))
            gaps = np.where(exact, upper - lower, 0.0)
            gi = int(np.argmax(gaps))
            if gaps[gi] > out.worst_gap:
                out.worst_gap = float(gaps[gi])
                out.worst_gap_map = _full_code(nH, Y, A[gi]).tolist()
            for i in np.flatnonzero(bad | viol):
                why = ("cb verdict undecided" if undecided[i] else
                       "cc/affine mismatch" if cc_true[i] != affine[i] else
                       "cp/homomorphism mismatch" if cp[i] != hom[i] else "composition bound")
                record_inconsistent(_full_code(nH, Y, A[i]), why)
            if collect_cp:
                for i in np.flatnonzero(cp):
                    out.cp_maps.append(_full_code(nH, Y, A[i]).tolist())
    out.elapsed = time.perf_counter() - t0
    return out


def _full_code(nH: int, Y, a) -> np.ndarray:
    code = np.full(nH, -1, dtype=np.int64)
    code[Y] = a
    return code


def scan_pairs(groups, budget: int = DEFAULT_BUDGET):
    """Ordered ``(G, H)`` pairs from ``groups`` whose scan fits in ``budget``."""
    return [(G, H) for G in groups for H in groups if (G.order + 1) ** H.order <= budget]
