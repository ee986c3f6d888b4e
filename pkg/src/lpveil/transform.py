"""Customer-side disguise: key generation, problem encryption, and
verified decryption of the cloud's answer.

The disguise composes three maps on min c^T x, A x = b, B x >= 0:

  equality rows mixed by a nonsingular Q:    Ap = Q A M,  bp = Q b
  cone rewritten via lambda with lambda b=0: Bp = (B - lambda A) M
  variables substituted x = M y, objective scaled by gamma:
                                             cp = gamma M^T c

Each key is bound to the digest of exactly one problem and refuses a
second encryption.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .core import (DEFAULT_TOL, EncryptedProblem, LpProblem, SecretKey,
                   Tolerance, digest, random_lambda, random_nonsingular,
                   validate_problem)
from .errors import KeyProblemMismatch
from .solver import CloudResult
from . import verify


@dataclass(frozen=True)
class VerifiedSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    objective: float | None = None

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.x is not None:
            out["x"] = self.x.tolist()
        if self.objective is not None:
            out["objective"] = self.objective
        return out


@dataclass(frozen=True)
class Rejection:
    """Structured refusal of a cloud answer: first failed condition."""

    condition: str
    residual: float

    def to_dict(self) -> dict:
        return {"status": "rejected", "condition": self.condition,
                "residual": self.residual}


def keygen(p: LpProblem, seed: int, tol: Tolerance = DEFAULT_TOL) -> SecretKey:
    """Draw a fresh one-time key for p; deterministic for fixed (p, seed)."""
    validate_problem(p, tol)
    rng = np.random.default_rng(seed)
    Q = random_nonsingular(p.m, rng)
    M = random_nonsingular(p.n, rng)
    lam = random_lambda(p, rng, tol)
    gamma = float(rng.uniform(0.5, 2.0))
    return SecretKey(Q=Q, M=M, lam=lam, gamma=gamma,
                     problem_digest=digest(p), seed=seed)


def _encrypt_arrays(k: SecretKey, p: LpProblem) -> EncryptedProblem:
    Ap = k.Q @ p.A @ k.M
    bp = k.Q @ p.b
    Bp = (p.B - k.lam @ p.A) @ k.M
    cp = k.gamma * (k.M.T @ p.c)
    return EncryptedProblem(Ap=Ap, Bp=Bp, bp=bp, cp=cp,
                            problem_digest=k.problem_digest)


def prob_enc(k: SecretKey, p: LpProblem) -> EncryptedProblem:
    """Disguise p under k, consuming the key (one-time use)."""
    if digest(p) != k.problem_digest:
        raise KeyProblemMismatch("key is bound to a different problem")
    k.mark_used()
    return _encrypt_arrays(k, p)


def result_dec(k: SecretKey, p: LpProblem, r: CloudResult,
               tol: Tolerance = DEFAULT_TOL) -> VerifiedSolution | Rejection:
    """Verify the cloud's answer against the disguised problem and, on
    acceptance, map it back to plaintext coordinates."""
    if digest(p) != k.problem_digest:
        raise KeyProblemMismatch("key is bound to a different problem")
    e = _encrypt_arrays(k, p)
    if r.status == "optimal":
        check = verify.check_optimal(e, r.y, r.s, r.t, tol)
        if not check:
            return Rejection(check.condition, check.residual)
        x = k.M @ r.y
        # computed through gamma on purpose: equality with c^T x is an invariant
        objective = float(e.cp @ r.y) / k.gamma
        return VerifiedSolution(status="optimal", x=x, objective=objective)
    if r.status == "infeasible":
        check = verify.check_infeasible(e, r.s, r.t, tol)
        if not check:
            return Rejection(check.condition, check.residual)
        return VerifiedSolution(status="infeasible")
    if r.status == "unbounded":
        check = verify.check_unbounded(e, r.y0, r.d, tol)
        if not check:
            return Rejection(check.condition, check.residual)
        return VerifiedSolution(status="unbounded")
    return Rejection("unknown-status", 0.0)


def save_key(k: SecretKey, path: str) -> None:
    """Persist the key file atomically (the used-flag lives here)."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(k.canonical_json())
    os.replace(tmp, path)


def load_key(path: str) -> SecretKey:
    with open(path, encoding="utf-8") as fh:
        return SecretKey.from_json(fh.read())
