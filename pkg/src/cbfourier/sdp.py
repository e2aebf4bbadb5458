"""Thin wrapper over ``cvxopt.solvers.sdp`` for complex Hermitian LMIs.

Problems are stated as: minimise ``c @ x`` over real ``x`` subject to
``F0_k + sum_i x_i F_ik >= 0`` for a list of complex Hermitian blocks.
Each block is embedded as the real symmetric matrix ``[[Re, -Im], [Im, Re]]``.
The ``F_ik`` are given as sparse triplets so that large blocks stay cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SolverFailure

DEFAULT_SOLVER_TOL = 1e-9


def unembed(Z: np.ndarray) -> np.ndarray:
    k = Z.shape[0] // 2
    a = (Z[:k, :k] + Z[k:, k:]) / 2
    b = (Z[k:, :k] - Z[:k, k:]) / 2
    return a + 1j * b


def embed(A: np.ndarray) -> np.ndarray:
    re, im = A.real, A.imag
    return np.block([[re, -im], [im, re]])


def hermitian_basis_triplets(k: int):
    """Real basis of k x k Hermitian matrices as ``(index, row, col, value)`` arrays.

    Basis element ``a`` has at most two nonzero entries; there are ``k*k`` of them.
    """
    idx, rows, cols, vals = [], [], [], []
    a = 0
    for i in range(k):
        idx.append(a); rows.append(i); cols.append(i); vals.append(1.0)
        a += 1
    for i in range(k):
        for j in range(i + 1, k):
            idx += [a, a]; rows += [i, j]; cols += [j, i]; vals += [1.0, 1.0]
            a += 1
            idx += [a, a]; rows += [i, j]; cols += [j, i]; vals += [1j, -1j]
            a += 1
    return np.array(idx), np.array(rows), np.array(cols), np.array(vals, dtype=complex)


def hermitian_from(x: np.ndarray, k: int) -> np.ndarray:
    a, r, c, v = hermitian_basis_triplets(k)
    M = np.zeros((k, k), complex)
    np.add.at(M, (r, c), x[a] * v)
    return M


@dataclass
class LMI:
    """``F0 + sum_i x_i F_i >= 0`` with the ``F_i`` stored as triplets."""

    size: int
    F0: np.ndarray
    var: list = field(default_factory=list)
    row: list = field(default_factory=list)
    col: list = field(default_factory=list)
    val: list = field(default_factory=list)

    def add(self, var, row, col, val):
        self.var.append(np.asarray(var, dtype=np.int64).ravel())
        self.row.append(np.asarray(row, dtype=np.int64).ravel())
        self.col.append(np.asarray(col, dtype=np.int64).ravel())
        self.val.append(np.broadcast_to(np.asarray(val, dtype=complex), np.shape(var)).ravel())

    def _cvx(self, nvar):
        from cvxopt import matrix, spmatrix

        k = self.size
        if self.var:
            v = np.concatenate(self.var); r = np.concatenate(self.row)
            c = np.concatenate(self.col); x = np.concatenate(self.val)
        else:
            v = r = c = np.zeros(0, np.int64); x = np.zeros(0, complex)
        K = 2 * k
        rr = np.concatenate([r, r + k, r, r + k])
        cc = np.concatenate([c, c + k, c + k, c])
        xx = np.concatenate([x.real, x.real, -x.imag, x.imag])
        vv = np.concatenate([v, v, v, v])
        keep = xx != 0
        rr, cc, xx, vv = rr[keep], cc[keep], xx[keep], vv[keep]
        G = spmatrix((-xx).tolist(), (cc * K + rr).tolist(), vv.tolist(), (K * K, nvar))
        h = matrix(embed(np.asarray(self.F0, complex)))
        return G, h


@dataclass
class SdpResult:
    x: np.ndarray
    primal: float
    dual: float
    status: str
    duals: list[np.ndarray]
    iterations: int

    @property
    def gap(self) -> float:
        return abs(self.primal - self.dual)


def solve_sdp(c: np.ndarray, lmis: list[LMI], tol: float = DEFAULT_SOLVER_TOL,
              max_iters: int = 200, gap_target: float = 1e-7) -> SdpResult:
    from cvxopt import matrix, solvers

    c = np.asarray(c, dtype=float)
    nvar = c.size
    Gs, hs = zip(*(lmi._cvx(nvar) for lmi in lmis))
    opts = {"show_progress": False, "abstol": tol, "reltol": tol, "feastol": tol,
            "maxiters": max_iters}
    try:
        sol = solvers.sdp(matrix(c), Gs=list(Gs), hs=list(hs), options=opts)
    except (ValueError, ArithmeticError) as exc:
        raise SolverFailure("interior point solver broke down", {"error": str(exc)}) from exc
    if sol["x"] is None:
        raise SolverFailure("solver returned no point", {"status": sol["status"]})
    primal = float(sol["primal objective"])
    dual = float(sol["dual objective"])
    diag = {"status": sol["status"], "primal": primal, "dual": dual,
            "primal_infeasibility": sol.get("primal infeasibility"),
            "dual_infeasibility": sol.get("dual infeasibility")}
    if sol["status"] != "optimal":
        scale = max(1.0, abs(primal))
        pinf = sol.get("primal infeasibility") or 0.0
        if not (abs(primal - dual) <= max(gap_target, 1e-6) * scale and pinf < 1e-6):
            raise SolverFailure("semidefinite program did not converge", diag)
    duals = [unembed(np.array(z)) for z in sol["zs"]]
    return SdpResult(np.array(sol["x"]).ravel(), primal, dual, sol["status"], duals,
                     int(sol.get("iterations", 0)))
