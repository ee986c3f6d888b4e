"""Cloud-side solve: reduce to standard form, run two-phase revised
simplex, and emit the answer together with a correctness certificate.

The solver sees only the disguised problem (it accepts nothing but an
EncryptedProblem) and certifies its own answer before returning:

  optimal    -> (y, s, t) with Ap^T s + Bp^T t = cp, t >= 0, zero gap
  infeasible -> Farkas pair (s, t)
  unbounded  -> feasible point y0 plus improving ray d
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .core import EncryptedProblem, Tolerance, DEFAULT_TOL
from .errors import NumericalInstability, SelfCheckFailed, SingularMatrix
from . import verify


@dataclass
class CloudResult:
    """Solver outcome shipped back to the customer."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    y: np.ndarray | None = None
    s: np.ndarray | None = None
    t: np.ndarray | None = None
    y0: np.ndarray | None = None
    d: np.ndarray | None = None
    iterations: int = 0
    solve_time: float = 0.0

    def to_dict(self) -> dict:
        out = {"status": self.status, "iterations": self.iterations,
               "solve_time": self.solve_time}
        for name in ("y", "s", "t", "y0", "d"):
            v = getattr(self, name)
            if v is not None:
                out[name] = np.asarray(v, float).tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "CloudResult":
        kw = {"status": str(d["status"]),
              "iterations": int(d.get("iterations", 0)),
              "solve_time": float(d.get("solve_time", 0.0))}
        for name in ("y", "s", "t", "y0", "d"):
            if name in d:
                kw[name] = np.asarray(d[name], float)
        return cls(**kw)


@dataclass
class StandardForm:
    """min chat^T z  s.t.  Ahat z = bhat, z >= 0, with z = Bp y."""

    Ahat: np.ndarray
    bhat: np.ndarray
    chat: np.ndarray
    _lu: tuple = field(repr=False)

    def back(self, z: np.ndarray) -> np.ndarray:
        """Map a standard-form point back: y = Bp^{-1} z."""
        return lu_solve(self._lu, z)


def to_standard_form(e: EncryptedProblem, tol: Tolerance = DEFAULT_TOL) -> StandardForm:
    """Substitute z = Bp y, exploiting that Bp is nonsingular."""
    scale = max(1.0, float(np.max(np.abs(e.Bp))))
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)  # singularity handled below
            f = lu_factor(e.Bp)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("Bp is singular") from exc
    if float(np.min(np.abs(np.diag(f[0])))) <= tol.pivot_eps * scale:
        raise SingularMatrix("Bp is numerically singular")
    Ahat = lu_solve(f, e.Ap.T, trans=1).T  # Ap Bp^{-1}
    chat = lu_solve(f, e.cp, trans=1)      # Bp^{-T} cp
    return StandardForm(Ahat=Ahat, bhat=e.bp.copy(), chat=chat, _lu=f)


@dataclass
class SimplexOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    z: np.ndarray | None = None       # optimal BFS / feasible point
    p: np.ndarray | None = None       # dual vector (optimal) or Farkas vector
    reduced: np.ndarray | None = None
    ray: np.ndarray | None = None
    iterations: int = 0


class _Core:
    """Primal simplex over min c^T x, A x = b (b >= 0), x >= 0.

    The basis matrix is LU-refactorized at every pivot: for the dense
    problem sizes this solver targets, rebuilding is simpler and more
    robust than eta-file updates and keeps each iteration's residual
    checkable.  Dantzig pricing with a permanent switch to Bland's rule
    after 3*(m+n) consecutive degenerate pivots guarantees termination.
    """

    def __init__(self, A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: Tolerance):
        self.A, self.b, self.c = A, b, c
        self.m, self.k = A.shape
        self.tol = tol
        self.opt_tol = 1e-9 * max(1.0, float(np.max(np.abs(c), initial=0.0)))
        self.piv_tol = 1e-9
        self.iterations = 0

    def run(self, basis: list[int]):
        """Pivot to optimality; returns ("optimal", basis, xB, p, reduced)
        or ("unbounded", basis, xB, entering_index, direction_u)."""
        A, b, c = self.A, self.b, self.c
        m, k = self.m, self.k
        bland = False
        degenerate_run = 0
        max_iter = 100 * (m + k) + 1000
        b_scale = max(1.0, float(np.max(np.abs(b))))
        while True:
            if self.iterations > max_iter:
                raise NumericalInstability("pivot limit exceeded")
            f = lu_factor(A[:, basis])
            xB = lu_solve(f, b)
            if float(np.max(np.abs(A[:, basis] @ xB - b))) > 1e-6 * b_scale:
                raise NumericalInstability("basis factorization residual too large")
            p = lu_solve(f, c[basis], trans=1)
            reduced = c - A.T @ p
            reduced[basis] = 0.0
            if bland:
                cand = np.flatnonzero(reduced < -self.opt_tol)
                if cand.size == 0:
                    return "optimal", basis, xB, p, reduced
                j = int(cand[0])
            else:
                j = int(np.argmin(reduced))
                if reduced[j] >= -self.opt_tol:
                    return "optimal", basis, xB, p, reduced
            u = lu_solve(f, A[:, j])
            pos = np.flatnonzero(u > self.piv_tol)
            if pos.size == 0:
                return "unbounded", basis, xB, j, u
            ratios = xB[pos] / u[pos]
            theta = float(np.min(ratios))
            # smallest-variable-index tie break (Bland-compatible)
            ties = pos[np.flatnonzero(ratios <= theta + 1e-12 * (1.0 + abs(theta)))]
            leave = int(min(ties, key=lambda i: basis[i]))
            basis[leave] = j
            self.iterations += 1
            if theta <= 1e-12 * b_scale:
                degenerate_run += 1
                if degenerate_run > 3 * (m + k):
                    bland = True
            else:
                degenerate_run = 0


def simplex_solve(Ahat: np.ndarray, bhat: np.ndarray, chat: np.ndarray,
                  tol: Tolerance = DEFAULT_TOL) -> SimplexOutcome:
    """Two-phase revised simplex on min chat^T z, Ahat z = bhat, z >= 0."""
    m, n = Ahat.shape
    sgn = np.where(bhat < 0, -1.0, 1.0)
    A1 = sgn[:, None] * Ahat
    b1 = sgn * bhat
    b_scale = max(1.0, float(np.max(np.abs(bhat))))

    # Phase 1: minimize the artificial-variable sum.
    Aaug = np.hstack([A1, np.eye(m)])
    caug = np.concatenate([np.zeros(n), np.ones(m)])
    core1 = _Core(Aaug, b1, caug, tol)
    status, basis, xB, p1, _ = core1.run(list(range(n, n + m)))
    assert status == "optimal"  # phase-1 objective is bounded below by 0
    if float(caug[basis] @ xB) > 1e-8 * b_scale:
        # Infeasible: the phase-1 dual is a Farkas vector for the
        # original row orientation after undoing the sign flips.
        return SimplexOutcome(status="infeasible", p=sgn * p1,
                              iterations=core1.iterations)

    # Drive any residual artificial variables out of the basis (they sit
    # at value zero; full row rank guarantees a replacement column).
    f = lu_factor(Aaug[:, basis])
    for i, var in enumerate(basis):
        if var < n:
            continue
        w = np.zeros(m)
        w[i] = 1.0
        row = A1.T @ lu_solve(f, w, trans=1)
        row[[v for v in basis if v < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) <= 1e-9:
            raise NumericalInstability("cannot eliminate artificial variable from basis")
        basis[i] = j
        f = lu_factor(Aaug[:, basis])

    # Phase 2 on the original columns and costs.
    core2 = _Core(A1, b1, chat, tol)
    out = core2.run(basis)
    total_iters = core1.iterations + core2.iterations
    if out[0] == "optimal":
        _, basis, xB, p, reduced = out
        z = np.zeros(n)
        z[basis] = xB
        return SimplexOutcome(status="optimal", z=z, p=sgn * p, reduced=reduced,
                              iterations=total_iters)
    _, basis, xB, j, u = out
    z0 = np.zeros(n)
    z0[basis] = xB
    ray = np.zeros(n)
    ray[j] = 1.0
    ray[basis] -= u
    return SimplexOutcome(status="unbounded", z=z0, ray=ray, iterations=total_iters)


def proof_gen(e: EncryptedProblem, tol: Tolerance = DEFAULT_TOL) -> CloudResult:
    """Solve the disguised LP and attach a self-checked certificate."""
    t0 = time.perf_counter()
    sf = to_standard_form(e, tol)
    out = simplex_solve(sf.Ahat, sf.bhat, sf.chat, tol)
    if out.status == "optimal":
        y = sf.back(out.z)
        s = out.p
        t = sf.chat - sf.Ahat.T @ out.p
        result = CloudResult(status="optimal", y=y, s=s, t=t,
                             iterations=out.iterations,
                             solve_time=time.perf_counter() - t0)
        check = verify.check_optimal(e, y, s, t, tol)
    elif out.status == "infeasible":
        s = out.p
        t = -sf.Ahat.T @ s
        scale = float(np.max(np.abs(s)))
        if scale > 0:
            s, t = s / scale, t / scale
        result = CloudResult(status="infeasible", s=s, t=t,
                             iterations=out.iterations,
                             solve_time=time.perf_counter() - t0)
        check = verify.check_infeasible(e, s, t, tol)
    else:
        y0 = sf.back(out.z)
        d = sf.back(out.ray)
        result = CloudResult(status="unbounded", y0=y0, d=d,
                             iterations=out.iterations,
                             solve_time=time.perf_counter() - t0)
        check = verify.check_unbounded(e, y0, d, tol)
    if not check:
        raise SelfCheckFailed(
            f"{out.status} certificate failed self-check: "
            f"{check.condition} (residual {check.residual:.3e})")
    return result
