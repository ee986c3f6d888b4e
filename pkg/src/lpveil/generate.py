"""Random test-instance generation with a known status by construction.

feasible   : pick x0 >= 1 and set b = A x0 (so x0 is feasible), then
             build c from a dual-feasible pair so the optimum is bounded.
infeasible : one equality row with positive coefficients and negative
             right-hand side; no x with B x = x >= 0 can satisfy it.
unbounded  : every row of A is orthogonal to a positive direction dray
             and c is tilted so c . dray < 0.
"""

from __future__ import annotations

import numpy as np

from .core import DEFAULT_TOL, LpProblem, Tolerance, random_nonsingular, validate_problem
from .errors import RankDeficient


def random_problem(n: int, m: int | None = None, seed: int = 0,
                   mode: str = "feasible", random_b_matrix: bool = False,
                   tol: Tolerance = DEFAULT_TOL) -> LpProblem:
    if m is None:
        m = max(1, (n + 1) // 2)
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(64):
        if mode == "feasible":
            p = _feasible(n, m, rng, random_b_matrix)
        elif mode == "infeasible":
            p = _infeasible(n, m, rng)
        elif mode == "unbounded":
            p = _unbounded(n, m, rng)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        try:
            validate_problem(p, tol)
            return p
        except RankDeficient:
            continue
    raise RankDeficient("could not draw a full-row-rank instance")


def _b_matrix(n: int, rng: np.random.Generator, random_b: bool,
              x0: np.ndarray) -> np.ndarray:
    if not random_b:
        return np.eye(n)
    while True:
        B = random_nonsingular(n, rng)
        Bx = B @ x0
        B[Bx < 0] *= -1.0  # row sign flips keep B nonsingular
        if np.min(B @ x0) > 1e-9:
            return B


def _feasible(n, m, rng, random_b):
    x0 = rng.uniform(1.0, 2.0, n)
    A = rng.uniform(-1.0, 1.0, (m, n))
    b = A @ x0
    B = _b_matrix(n, rng, random_b, x0)
    # dual-feasible (p, t) for the standard form z = B x makes the
    # optimum bounded: chat = Ahat^T p + t with t >= 0, c = B^T chat.
    p = rng.uniform(-1.0, 1.0, m)
    t = rng.uniform(0.0, 1.0, n)
    Ahat = np.linalg.solve(B.T, A.T).T if random_b else A
    c = B.T @ (Ahat.T @ p + t)
    return LpProblem(A=A, B=B, b=b, c=c)


def _infeasible(n, m, rng):
    A = rng.uniform(-1.0, 1.0, (m, n))
    A[0] = rng.uniform(0.1, 1.0, n)
    x0 = rng.uniform(1.0, 2.0, n)
    b = A @ x0
    b[0] = -rng.uniform(0.5, 1.5)  # row 0 demands a negative sum of nonnegatives
    c = rng.uniform(-1.0, 1.0, n)
    return LpProblem(A=A, B=np.eye(n), b=b, c=c)


def _unbounded(n, m, rng):
    dray = rng.uniform(1.0, 2.0, n)
    A = rng.uniform(-1.0, 1.0, (m, n))
    A -= np.outer(A @ dray, dray) / float(dray @ dray)  # rows orthogonal to dray
    x0 = rng.uniform(1.0, 2.0, n)
    b = A @ x0
    c = rng.uniform(-1.0, 1.0, n)
    c -= ((c @ dray) + 1.0) * dray / float(dray @ dray)  # force c . dray = -1
    return LpProblem(A=A, B=np.eye(n), b=b, c=c)
