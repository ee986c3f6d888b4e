"""Brute-force LP oracle: exhaustive basis enumeration.

Deliberately shares no code with the simplex pivot path — the standard
form substitution is recomputed with a local Gauss-Jordan inverse and
all basis systems are solved by the same elimination.  Usable only up
to n = 12 (it examines every C(n, m) basis subset).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .core import DEFAULT_TOL, EncryptedProblem, LpProblem, Tolerance
from .errors import SingularMatrix, TooLarge

MAX_N = 12


def gauss_jordan_inverse(mat: np.ndarray, pivot_eps: float = 1e-10) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination with full pivoting."""
    a = np.asarray(mat, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise SingularMatrix("matrix must be square")
    work = np.hstack([a.copy(), np.eye(n)])
    col_perm = list(range(n))
    scale = max(1.0, float(np.max(np.abs(a))))
    for k in range(n):
        sub = np.abs(work[k:, k:n])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= pivot_eps * scale:
            raise SingularMatrix("matrix is numerically singular")
        work[[k, k + i]] = work[[k + i, k]]
        work[:, [k, k + j]] = work[:, [k + j, k]]
        col_perm[k], col_perm[k + j] = col_perm[k + j], col_perm[k]
        work[k] /= work[k, k]
        for r in range(n):
            if r != k:
                work[r] -= work[r, k] * work[k]
    inv = np.empty((n, n))
    inv[col_perm, :] = work[:, n:]
    return inv


def _solve_gj(mat: np.ndarray, rhs: np.ndarray, pivot_eps: float) -> np.ndarray:
    return gauss_jordan_inverse(mat, pivot_eps) @ rhs


@dataclass
class OracleResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float | None = None
    vertices: list = field(default_factory=list)  # all optimal vertices, z-space
    ray: np.ndarray | None = None


def _standard_form(prob, pivot_eps: float):
    if isinstance(prob, EncryptedProblem):
        A, Bm, b, c = prob.Ap, prob.Bp, prob.bp, prob.cp
    else:
        A, Bm, b, c = prob.A, prob.B, prob.b, prob.c
    Binv = gauss_jordan_inverse(Bm, pivot_eps)
    return A @ Binv, b.copy(), Binv.T @ c


def enumerate_solve(prob: LpProblem | EncryptedProblem,
                    tol: Tolerance = DEFAULT_TOL) -> OracleResult:
    """Solve by enumerating every basis of the standard-form system."""
    n = prob.n
    m = prob.m
    if n > MAX_N:
        raise TooLarge(f"oracle cutoff is n <= {MAX_N}, got n = {n}")
    Ahat, bhat, chat = _standard_form(prob, tol.pivot_eps)
    feas_tol = tol.feas_rel * max(1.0, float(np.max(np.abs(bhat))))

    best = None
    best_vertices: dict[tuple, np.ndarray] = {}
    any_feasible = False
    for idx in combinations(range(n), m):
        cols = list(idx)
        Bsub = Ahat[:, cols]
        try:
            Binv = gauss_jordan_inverse(Bsub, tol.pivot_eps)
        except SingularMatrix:
            continue
        zB = Binv @ bhat
        if np.min(zB) < -feas_tol:
            continue
        any_feasible = True
        z = np.zeros(n)
        z[cols] = zB
        # improving recession direction among the nonbasic columns?
        for j in range(n):
            if j in idx:
                continue
            u = Binv @ Ahat[:, j]
            dz = np.zeros(n)
            dz[j] = 1.0
            dz[cols] = -u
            if np.min(dz) >= -1e-9 and float(chat @ dz) < -1e-9 * max(
                    1.0, float(np.max(np.abs(chat)))):
                return OracleResult(status="unbounded", ray=dz)
        val = float(chat @ z)
        key = tuple(np.round(z / 1e-9).astype(np.int64).tolist())
        if best is None or val < best - 1e-12 * max(1.0, abs(best)):
            best = val
            best_vertices = {key: z}
        elif abs(val - best) <= 1e-9 * max(1.0, abs(best)):
            best_vertices.setdefault(key, z)

    if not any_feasible:
        if _phase1_confirms_empty(Ahat, bhat, chat, tol):
            return OracleResult(status="infeasible")
        # feasible region is nonempty but has no vertex within the
        # enumerated bases: cannot happen for full-row-rank systems
        raise SingularMatrix("enumeration found no basis yet region is nonempty")
    return OracleResult(status="optimal", objective=best,
                        vertices=list(best_vertices.values()))


def _phase1_confirms_empty(Ahat, bhat, chat, tol: Tolerance) -> bool:
    """Enumerate the auxiliary problem min sum(a), Ahat z + D a = b to
    confirm its optimum is strictly positive (region empty)."""
    m, n = Ahat.shape
    D = np.diag(np.where(bhat < 0, -1.0, 1.0))
    Aaug = np.hstack([Ahat, D])
    feas_tol = tol.feas_rel * max(1.0, float(np.max(np.abs(bhat))))
    best = np.inf
    for idx in combinations(range(n + m), m):
        cols = list(idx)
        try:
            Binv = gauss_jordan_inverse(Aaug[:, cols], tol.pivot_eps)
        except SingularMatrix:
            continue
        zB = Binv @ bhat
        if np.min(zB) < -feas_tol:
            continue
        art = [k for k, v in enumerate(cols) if v >= n]
        best = min(best, float(np.sum(zB[art])))
        if best <= feas_tol:
            return False
    return best > feas_tol
