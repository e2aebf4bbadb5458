"""Unitary representations of finite groups and Fourier algebra norms.

Conventions: ``u_hat(pi) = sum_s u(s) pi(s)`` and
``||u||_A = (1/|G|) sum_pi d_pi ||u_hat(pi)||_1``.  The norm formula is
cross-checked against :func:`a_norm_oracle`, which only uses the left
regular representation and a semidefinite program.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import OrderTooLarge, SolverFailure, ToleranceNotMet
from .groups import ElementSet, FiniteGroup

IRREP_ORDER_BOUND = 24
ORACLE_ORDER_BOUND = 12


@dataclass(frozen=True, eq=False)
class FunctionOnGroup:
    group: FiniteGroup
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.size != self.group.order:
            raise ValueError(f"{v.size} values for a group of order {self.group.order}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, s: int) -> complex:
        return complex(self.values[s])

    def __mul__(self, other: "FunctionOnGroup") -> "FunctionOnGroup":
        return FunctionOnGroup(self.group, self.values * other.values)

    def translate(self, s: int) -> "FunctionOnGroup":
        """``t -> u(s^-1 t)``."""
        G = self.group
        return FunctionOnGroup(G, self.values[G.table[G.inv(s)]])

    def allclose(self, other: "FunctionOnGroup", tol: float = 1e-9) -> bool:
        return self.group == other.group and np.allclose(self.values, other.values, atol=tol, rtol=0)


def indicator(S: ElementSet) -> FunctionOnGroup:
    return FunctionOnGroup(S.parent, S.indicator())


def delta(G: FiniteGroup, s: int) -> FunctionOnGroup:
    v = np.zeros(G.order)
    v[s] = 1
    return FunctionOnGroup(G, v)


def regular_representations(G: FiniteGroup):
    """Left and right regular representations as arrays of shape ``(n, n, n)``.

    ``lam[s] @ e_t = e_{st}`` and ``rho[t] @ e_r = e_{r t^-1}``.
    """
    n = G.order
    lam = np.zeros((n, n, n))
    rho = np.zeros((n, n, n))
    idx = np.arange(n)
    for s in range(n):
        lam[s, G.table[s], idx] = 1
        rho[s, G.table[idx, G.inv(s)], idx] = 1
    return lam, rho


@dataclass(frozen=True, eq=False)
class IrrepSet:
    group: FiniteGroup
    irreps: tuple[np.ndarray, ...]  # each of shape (n, d, d)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.shape[1] for r in self.irreps)

    def __len__(self):
        return len(self.irreps)

    def residuals(self) -> dict[str, float]:
        G = self.group
        n = G.order
        hom = unit = 0.0
        for r in self.irreps:
            d = r.shape[1]
            prod = np.einsum("aij,bjk->abik", r, r)
            hom = max(hom, float(np.abs(prod - r[G.table]).max()))
            uu = np.einsum("aji,ajk->aik", r.conj(), r)
            unit = max(unit, float(np.abs(uu - np.eye(d)).max()))
        # Schur: sum_s pi_ij(s) conj(sigma_kl(s)) = n/d delta
        flat = np.concatenate([r.reshape(n, -1) for r in self.irreps], axis=1)
        gram = flat.conj().T @ flat
        target = np.concatenate([np.full(r.shape[1] ** 2, n / r.shape[1]) for r in self.irreps])
        schur = float(np.abs(gram - np.diag(target)).max())
        return {"homomorphism": hom, "unitarity": unit, "schur": schur,
                "dimension_sum": float(abs(sum(d * d for d in self.dims) - n))}

    def character_table(self) -> np.ndarray:
        return np.array([np.trace(r, axis1=1, axis2=2) for r in self.irreps])


_irrep_cache: dict = {}
_cache_lock = threading.Lock()


def _cluster(w: np.ndarray, gap: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > gap:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _try_irreps(G: FiniteGroup, rng: np.random.Generator):
    n = G.order
    lam, rho = regular_representations(G)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    c = (c + c[G.inverses].conj()) / 2  # makes sum c_t rho(t) Hermitian
    A = np.einsum("t,tij->ij", c, rho)
    w, V = np.linalg.eigh((A + A.conj().T) / 2)
    reps, chars = [], []
    for grp in _cluster(w, 1e-7 * (1 + np.abs(w).max())):
        Q = V[:, grp]
        pi = np.einsum("ia,sij,jb->sab", Q.conj(), lam, Q)
        if np.abs(lam @ Q - Q @ pi).max() > 1e-8:
            return None
        chi = np.trace(pi, axis1=1, axis2=2)
        if any(np.abs(chi - x).max() < 1e-6 for x in chars):
            continue
        chars.append(chi)
        reps.append(pi)
    return reps


def _canonical_order(reps):
    def key(r):
        chi = np.trace(r, axis1=1, axis2=2)
        return (r.shape[1], tuple(np.round(-chi.real, 6)), tuple(np.round(-chi.imag, 6)))
    out = []
    for r in sorted(reps, key=key):
        if r.shape[1] == 1:
            r = np.round(r.real, 14) + 1j * np.round(r.imag, 14)
        out.append(r)
    return out


def compute_irreps(G: FiniteGroup, tol: float = 1e-9, seed: int = 0,
                   bound: int = IRREP_ORDER_BOUND, attempts: int = 6) -> IrrepSet:
    """One unitary irreducible representation per class, certified by residual checks.

    The trivial representation comes first; the rest are sorted by dimension
    and then by character values.  Results are cached per (group, seed).
    """
    if G.order > bound:
        raise OrderTooLarge(f"order {G.order} exceeds the representation bound {bound}")
    key = (G, seed, tol)
    with _cache_lock:
        hit = _irrep_cache.get(key)
    if hit is not None:
        return hit
    rng = np.random.default_rng(seed)
    last = None
    for _ in range(attempts):
        reps = _try_irreps(G, rng)
        if reps is None:
            continue
        cand = IrrepSet(G, tuple(_canonical_order(reps)))
        res = cand.residuals()
        last = res
        if max(res.values()) <= tol * max(1, G.order):
            for r in cand.irreps:
                r.setflags(write=False)
            with _cache_lock:
                _irrep_cache[key] = cand
            return cand
    raise ToleranceNotMet(f"irreducible representations of {G.name or G} failed checks: {last}")


@dataclass(frozen=True)
class FourierCoefficients:
    blocks: tuple[np.ndarray, ...]


def fourier_transform(u: FunctionOnGroup, irreps: IrrepSet | None = None) -> FourierCoefficients:
    irreps = irreps or compute_irreps(u.group)
    if irreps.group != u.group:
        raise ValueError("function and representations live on different groups")
    return FourierCoefficients(tuple(np.einsum("s,sij->ij", u.values, r) for r in irreps.irreps))


def inverse_fourier(coeffs: FourierCoefficients, irreps: IrrepSet) -> FunctionOnGroup:
    """``u(s) = (1/|G|) sum_pi d_pi tr(pi(s)^* u_hat(pi))``."""
    G = irreps.group
    vals = sum(r.shape[1] * np.einsum("sji,ji->s", r.conj(), b) for r, b in zip(irreps.irreps, coeffs.blocks))
    return FunctionOnGroup(G, vals / G.order)


def _trace_norms(M: np.ndarray) -> np.ndarray:
    if M.shape[-1] == 1:
        return np.abs(M[..., 0, 0])
    return np.linalg.svd(M, compute_uv=False).sum(axis=-1)


def a_norm_many(U: np.ndarray, irreps: IrrepSet) -> np.ndarray:
    """Fourier algebra norms of the rows of ``U`` (shape ``(k, |G|)``)."""
    U = np.asarray(U, dtype=complex)
    out = np.zeros(U.shape[0])
    for r in irreps.irreps:
        out += r.shape[1] * _trace_norms(np.einsum("ks,sij->kij", U, r))
    return out / irreps.group.order


def is_positive_definite(u: FunctionOnGroup, tol: float = 1e-9) -> bool:
    """Whether the Gram matrix ``[u(s^-1 t)]`` is positive semidefinite."""
    G = u.group
    gram = u.values[G.table[G.inverses[:, None], np.arange(G.order)[None, :]]]
    if np.abs(gram - gram.conj().T).max() > tol:
        return False
    return bool(np.linalg.eigvalsh(gram).min() >= -tol)


@dataclass(frozen=True)
class NormReport:
    a_norm: float
    is_positive_definite: bool
    method: str


def a_norm(u: FunctionOnGroup, irreps: IrrepSet | None = None, tol: float = 1e-9) -> NormReport:
    irreps = irreps or compute_irreps(u.group)
    val = float(a_norm_many(u.values[None, :], irreps)[0])
    return NormReport(val, is_positive_definite(u, tol), "irrep formula")


@dataclass(frozen=True)
class OracleResult:
    value: float
    lower: float
    upper: float


def a_norm_oracle(u: FunctionOnGroup, agree_tol: float = 1e-6, solver_tol: float = 1e-9) -> OracleResult:
    """Norm from the left regular representation alone, certified from both sides.

    Upper: the trace norm of ``T = (1/|G|) sum_s u(s) lam(s)^*``, which
    satisfies ``tr(T lam(s)) = u(s)``.  Restricting to such ``T`` loses
    nothing because the trace-preserving expectation onto the group algebra
    is trace-norm contractive.
    Lower: ``max Re sum_s u(s) c_s`` over ``||sum_s c_s lam(s)|| <= 1``,
    solved as an SDP; the returned ``c`` is rescaled so the constraint
    holds exactly before the objective is evaluated.
    """
    from .sdp import LMI, solve_sdp

    G = u.group
    n = G.order
    if n > ORACLE_ORDER_BOUND:
        raise OrderTooLarge(f"oracle limited to order {ORACLE_ORDER_BOUND}")
    lam, _ = regular_representations(G)
    uv = u.values
    T = np.einsum("s,sji->ij", uv, lam) / n
    upper = float(np.linalg.svd(T, compute_uv=False).sum())
    if upper == 0:
        return OracleResult(0.0, 0.0, 0.0)
    # x = (Re c, Im c); constraint [[I, X], [X^*, I]] >= 0 with X = sum c_s lam(s)
    lmi = LMI(2 * n, np.eye(2 * n, dtype=complex))
    idx = np.arange(n)
    for s in range(n):
        r = G.table[s]  # lam(s)[r[t], t] = 1
        for var, coef in ((s, 1.0), (n + s, 1j)):
            lmi.add(np.full(n, var), r, n + idx, coef)
            lmi.add(np.full(n, var), n + idx, r, np.conj(coef))
    cost = -np.concatenate([uv.real, -uv.imag])
    res = solve_sdp(cost, [lmi], tol=solver_tol)
    cvec = res.x[:n] + 1j * res.x[n:]
    X = np.einsum("s,sij->ij", cvec, lam)
    opn = float(np.linalg.norm(X, 2))
    if opn == 0:
        raise SolverFailure("dual certificate vanished", {"upper": upper})
    lower = float((uv * cvec).sum().real) / max(opn, 1.0)
    if upper - lower > agree_tol * max(1.0, upper) or lower > upper + agree_tol:
        raise SolverFailure("primal and dual bounds disagree",
                            {"lower": lower, "upper": upper, "status": res.status})
    return OracleResult((lower + upper) / 2, lower, upper)


def product_irreps(ig: IrrepSet, ih: IrrepSet, GH: FiniteGroup) -> IrrepSet:
    """Irreps of ``G x H`` as Kronecker products, for the index encoding ``g*|H| + h``."""
    G, H = ig.group, ih.group
    if GH.order != G.order * H.order:
        raise ValueError("product group has the wrong order")
    g_idx = np.arange(GH.order) // H.order
    h_idx = np.arange(GH.order) % H.order
    reps = []
    for a in ig.irreps:
        for b in ih.irreps:
            r = np.einsum("sij,skl->sikjl", a[g_idx], b[h_idx])
            d = a.shape[1] * b.shape[1]
            reps.append(r.reshape(GH.order, d, d))
    return IrrepSet(GH, tuple(reps))
