"""Customer-side certificate checks.

Each check costs a handful of matrix-vector products (O(n^2) work) and
never solves an LP.  Rejections name the first violated condition in a
fixed order so diagnostics are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EncryptedProblem, Tolerance, DEFAULT_TOL
from .errors import DimensionMismatch


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    condition: str | None = None
    residual: float = 0.0

    def __bool__(self) -> bool:
        return self.ok


ACCEPT = CheckResult(True)


class FlopCounter:
    """Counts multiply-add work done by the checks (for scaling tests)."""

    def __init__(self):
        self.flops = 0

    def matvec(self, rows: int, cols: int):
        self.flops += 2 * rows * cols

    def dot(self, size: int):
        self.flops += 2 * size


def _mv(mat: np.ndarray, vec: np.ndarray, counter: FlopCounter | None) -> np.ndarray:
    if counter is not None:
        counter.matvec(mat.shape[0], mat.shape[1])
    return mat @ vec


def _dot(u: np.ndarray, v: np.ndarray, counter: FlopCounter | None) -> float:
    if counter is not None:
        counter.dot(u.shape[0])
    return float(u @ v)


def _check_dims(e: EncryptedProblem, **vecs):
    sizes = {"y": e.n, "t": e.n, "s": e.m, "y0": e.n, "d": e.n}
    for name, v in vecs.items():
        if v.shape != (sizes[name],):
            raise DimensionMismatch(f"{name} must have length {sizes[name]}, got {v.shape}")


def _primal_feasibility(e, y, tol, counter) -> CheckResult:
    # (i) equality residual, relative to |bp|
    r_eq = float(np.max(np.abs(_mv(e.Ap, y, counter) - e.bp)))
    bound = tol.feas_rel * max(1.0, float(np.max(np.abs(e.bp))))
    if r_eq > bound:
        return CheckResult(False, "equality", r_eq)
    # (ii) cone feasibility, relative to the size of Bp*y
    By = _mv(e.Bp, y, counter)
    scale = max(1.0, float(np.linalg.norm(e.Bp, np.inf)) * float(np.max(np.abs(y), initial=0.0)))
    worst = float(np.min(By))
    if worst < -tol.feas_rel * scale:
        return CheckResult(False, "inequality", -worst)
    return ACCEPT


def check_optimal(e: EncryptedProblem, y: np.ndarray, s: np.ndarray, t: np.ndarray,
                  tol: Tolerance = DEFAULT_TOL,
                  counter: FlopCounter | None = None) -> CheckResult:
    """Strong-duality acceptance: primal feasible, dual feasible, zero gap."""
    y, s, t = np.asarray(y, float), np.asarray(s, float), np.asarray(t, float)
    _check_dims(e, y=y, s=s, t=t)
    res = _primal_feasibility(e, y, tol, counter)
    if not res:
        return res
    # (iii) dual multipliers of the cone must be nonnegative
    tmin = float(np.min(t))
    if tmin < -tol.feas_rel:
        return CheckResult(False, "dual-sign", -tmin)
    # (iv) dual feasibility Ap^T s + Bp^T t = cp
    r_dual = float(np.max(np.abs(_mv(e.Ap.T, s, counter) + _mv(e.Bp.T, t, counter) - e.cp)))
    bound = tol.feas_rel * max(1.0, float(np.max(np.abs(e.cp))))
    if r_dual > bound:
        return CheckResult(False, "dual-feasibility", r_dual)
    # (v) zero duality gap
    obj = _dot(e.cp, y, counter)
    gap = abs(obj - _dot(e.bp, s, counter))
    if gap > tol.gap_rel * max(1.0, abs(obj)):
        return CheckResult(False, "gap", gap)
    return ACCEPT


def check_infeasible(e: EncryptedProblem, s: np.ndarray, t: np.ndarray,
                     tol: Tolerance = DEFAULT_TOL,
                     counter: FlopCounter | None = None) -> CheckResult:
    """Farkas-type certificate: Ap^T s + Bp^T t = 0, t >= 0, bp^T s > 0."""
    s, t = np.asarray(s, float), np.asarray(t, float)
    _check_dims(e, s=s, t=t)
    scale = float(np.max(np.abs(s), initial=0.0))
    if scale == 0.0:
        return CheckResult(False, "farkas-positivity", 0.0)
    s, t = s / scale, t / scale  # acceptance thresholds are scale-free
    tmin = float(np.min(t))
    if tmin < -tol.feas_rel:
        return CheckResult(False, "dual-sign", -tmin)
    r = float(np.max(np.abs(_mv(e.Ap.T, s, counter) + _mv(e.Bp.T, t, counter))))
    if r > tol.feas_rel * max(1.0, float(np.max(np.abs(s)))):
        return CheckResult(False, "farkas-residual", r)
    pos = _dot(e.bp, s, counter)
    if pos < tol.strict:
        return CheckResult(False, "farkas-positivity", pos)
    return ACCEPT


def check_unbounded(e: EncryptedProblem, y0: np.ndarray, d: np.ndarray,
                    tol: Tolerance = DEFAULT_TOL,
                    counter: FlopCounter | None = None) -> CheckResult:
    """Feasible point plus improving recession ray."""
    y0, d = np.asarray(y0, float), np.asarray(d, float)
    _check_dims(e, y0=y0, d=d)
    res = _primal_feasibility(e, y0, tol, counter)
    if not res:
        return res
    dscale = float(np.max(np.abs(d), initial=0.0))
    if dscale == 0.0:
        return CheckResult(False, "ray-objective", 0.0)
    d = d / dscale  # thresholds below assume a unit-inf-norm ray
    r_null = float(np.max(np.abs(_mv(e.Ap, d, counter))))
    if r_null > tol.feas_rel * max(1.0, float(np.linalg.norm(e.Ap, np.inf))):
        return CheckResult(False, "ray-not-in-nullspace", r_null)
    Bd = _mv(e.Bp, d, counter)
    bscale = float(np.linalg.norm(e.Bp, np.inf))
    worst = float(np.min(Bd))
    if worst < -tol.feas_rel * bscale:
        return CheckResult(False, "ray-inequality", -worst)
    slope = _dot(e.cp, d, counter)
    cscale = float(np.max(np.abs(e.cp), initial=0.0))
    if slope > -tol.strict * max(cscale, 1.0):
        return CheckResult(False, "ray-objective", slope)
    return ACCEPT
