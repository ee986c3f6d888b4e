"""Core LP data model: plaintext/disguised problems, keys, tolerances.

Problems are held in the form

    min c^T x   s.t.  A x = b,  B x >= 0

with A an m x n full-row-rank matrix and B an n x n matrix.  All values
are immutable after construction; randomized constructors take an
explicit numpy Generator so every caller controls reproducibility.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonFinite, RankDeficient, SingularityExhausted

CONDITION_CAP = 1e6
LAMBDA_MAX_ATTEMPTS = 32


@dataclass(frozen=True)
class Tolerance:
    feas_rel: float = 1e-6
    gap_rel: float = 1e-6
    pivot_eps: float = 1e-10
    # strict-positivity margin for certificates that need a strict inequality
    strict: float = 1e-6

    def __post_init__(self):
        if not (self.feas_rel > 0 and self.gap_rel > 0 and self.pivot_eps > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.feas_rel >= 1:
            raise ValueError("feas_rel must be < 1")


DEFAULT_TOL = Tolerance()


def _as_matrix(x, rows, cols, name):
    a = np.asarray(x, dtype=float)
    if a.shape != (rows, cols):
        raise DimensionMismatch(f"{name} must be {rows}x{cols}, got {a.shape}")
    return a


def _as_vector(x, size, name):
    a = np.asarray(x, dtype=float)
    if a.shape != (size,):
        raise DimensionMismatch(f"{name} must have length {size}, got {a.shape}")
    return a


@dataclass(frozen=True)
class LpProblem:
    """Plaintext LP: min c^T x  s.t.  A x = b,  B x >= 0."""

    A: np.ndarray
    B: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "A": [list(row) for row in self.A.tolist()],
            "B": [list(row) for row in self.B.tolist()],
            "b": self.b.tolist(),
            "c": self.c.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LpProblem":
        try:
            m, n = int(d["m"]), int(d["n"])
            A = _as_matrix(d["A"], m, n, "A")
            B = _as_matrix(d["B"], n, n, "B")
            b = _as_vector(d["b"], m, "b")
            c = _as_vector(d["c"], n, "c")
        except KeyError as exc:
            raise DimensionMismatch(f"missing field {exc}") from exc
        return cls(A=A, B=B, b=b, c=c)

    def canonical_json(self) -> str:
        """Canonical serialization: fixed key order, no whitespace.

        Python's float repr is the shortest round-trip decimal, so
        parse(serialize(p)) reproduces p bit-exactly.
        """
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, s: str) -> "LpProblem":
        return cls.from_dict(json.loads(s))


@dataclass(frozen=True)
class EncryptedProblem:
    """Disguised LP shipped to the cloud: min cp^T y  s.t. Ap y = bp, Bp y >= 0."""

    Ap: np.ndarray
    Bp: np.ndarray
    bp: np.ndarray
    cp: np.ndarray
    problem_digest: str  # hex digest echoed from the key binding

    @property
    def m(self) -> int:
        return self.Ap.shape[0]

    @property
    def n(self) -> int:
        return self.Ap.shape[1]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "Ap": [list(row) for row in self.Ap.tolist()],
            "Bp": [list(row) for row in self.Bp.tolist()],
            "bp": self.bp.tolist(),
            "cp": self.cp.tolist(),
            "problem_digest": self.problem_digest,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EncryptedProblem":
        try:
            m, n = int(d["m"]), int(d["n"])
            Ap = _as_matrix(d["Ap"], m, n, "Ap")
            Bp = _as_matrix(d["Bp"], n, n, "Bp")
            bp = _as_vector(d["bp"], m, "bp")
            cp = _as_vector(d["cp"], n, "cp")
            dig = str(d["problem_digest"])
        except KeyError as exc:
            raise DimensionMismatch(f"missing field {exc}") from exc
        if not np.all(np.isfinite(Ap)) or not np.all(np.isfinite(Bp)) \
                or not np.all(np.isfinite(bp)) or not np.all(np.isfinite(cp)):
            raise NonFinite("encrypted problem contains NaN/Inf")
        return cls(Ap=Ap, Bp=Bp, bp=bp, cp=cp, problem_digest=dig)

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, s: str) -> "EncryptedProblem":
        return cls.from_dict(json.loads(s))


@dataclass
class SecretKey:
    """One-time disguise key, bound to a single problem digest.

    The used-flag is the one mutable bit; flipping it is guarded by a
    lock so concurrent encryption attempts cannot both succeed.
    """

    Q: np.ndarray
    M: np.ndarray
    lam: np.ndarray
    gamma: float
    problem_digest: str
    seed: int
    used: bool = False
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def mark_used(self):
        """Atomically flip the used-flag; raises if already used."""
        from .errors import KeyReuse
        with self._lock:
            if self.used:
                raise KeyReuse(f"key (seed={self.seed}) was already used once")
            self.used = True

    def to_dict(self) -> dict:
        return {
            "Q": [list(row) for row in self.Q.tolist()],
            "M": [list(row) for row in self.M.tolist()],
            "lambda": [list(row) for row in self.lam.tolist()],
            "gamma": self.gamma,
            "problem_digest": self.problem_digest,
            "seed": self.seed,
            "used": self.used,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SecretKey":
        Q = np.asarray(d["Q"], dtype=float)
        M = np.asarray(d["M"], dtype=float)
        lam = np.asarray(d["lambda"], dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionMismatch("Q must be square")
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionMismatch("M must be square")
        if lam.shape != (M.shape[0], Q.shape[0]):
            raise DimensionMismatch("lambda must be n x m")
        return cls(Q=Q, M=M, lam=lam, gamma=float(d["gamma"]),
                   problem_digest=str(d["problem_digest"]), seed=int(d["seed"]),
                   used=bool(d.get("used", False)))

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, s: str) -> "SecretKey":
        return cls.from_dict(json.loads(s))


def validate_problem(p: LpProblem, tol: Tolerance = DEFAULT_TOL) -> None:
    """Raise unless p satisfies all structural invariants.

    Dimension coherence and finiteness are checked first; the full
    row-rank condition on A is established by LU with pivoting.
    """
    m, n = p.m, p.n
    if m < 1 or n < 1 or n < m:
        raise DimensionMismatch(f"need 1 <= m <= n, got m={m}, n={n}")
    _as_matrix(p.A, m, n, "A")
    _as_matrix(p.B, n, n, "B")
    _as_vector(p.b, m, "b")
    _as_vector(p.c, n, "c")
    for name, arr in (("A", p.A), ("B", p.B), ("b", p.b), ("c", p.c)):
        if not np.all(np.isfinite(arr)):
            raise NonFinite(f"{name} contains NaN/Inf")
    # LU of A^T with partial (row) pivoting == column-pivoted elimination of A;
    # the magnitudes on U's diagonal reveal the row rank of A.
    _, _, U = scipy.linalg.lu(p.A.T)
    diag = np.abs(np.diag(U))
    scale = max(1.0, float(np.max(np.abs(p.A))))
    rank = int(np.count_nonzero(diag > tol.pivot_eps * scale))
    if rank < m:
        raise RankDeficient(f"rank(A) = {rank} < m = {m}")


def random_nonsingular(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random nonsingular dim x dim matrix, nonsingular by construction.

    Built as P*L*U with unit lower-triangular L and an upper-triangular U
    whose diagonal is drawn from +-[1/2, 2], so |det| >= (1/2)^dim > 0.
    Off-diagonal magnitudes shrink as O(1/dim): random dense triangular
    factors with O(1) entries have exponentially growing condition
    numbers, which would make the resampling loop below never terminate
    past dim ~ 50.  Resamples while the estimated condition number
    exceeds CONDITION_CAP.
    """
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    off = min(1.0, 3.0 / dim)
    while True:
        perm = rng.permutation(dim)
        L = np.tril(rng.uniform(-off, off, (dim, dim)), -1) + np.eye(dim)
        U = np.triu(rng.uniform(-off, off, (dim, dim)), 1)
        d = rng.uniform(0.5, 2.0, dim) * rng.choice([-1.0, 1.0], dim)
        np.fill_diagonal(U, d)
        out = (L @ U)[np.argsort(perm), :]  # row permutation P applied to L*U
        if np.linalg.cond(out) <= CONDITION_CAP:
            return out


def random_lambda(p: LpProblem, rng: np.random.Generator,
                  tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Random n x m mask with lambda @ b = 0 and B - lambda A nonsingular.

    Rows are drawn uniform on [-1,1]^m and projected orthogonal to b
    (twice, to flush rounding); when b = 0 the orthogonality constraint
    is vacuous and rows are used as drawn.  Resamples up to
    LAMBDA_MAX_ATTEMPTS times until det(B - lambda A) is bounded away
    from zero.
    """
    m, n = p.m, p.n
    b = p.b
    bb = float(b @ b)
    for _ in range(LAMBDA_MAX_ATTEMPTS):
        lam = rng.uniform(-1.0, 1.0, (n, m))
        if bb > 0:
            for _ in range(2):
                lam -= np.outer(lam @ b, b) / bb
        sign, logdet = np.linalg.slogdet(p.B - lam @ p.A)
        if sign != 0 and logdet > np.log(tol.pivot_eps):
            return lam
    raise SingularityExhausted(
        f"no lambda with det(B - lambda A) != 0 after {LAMBDA_MAX_ATTEMPTS} attempts")


def digest(p: LpProblem) -> str:
    """Hex SHA-256 of the canonical serialization (one-time key binding)."""
    return hashlib.sha256(p.canonical_json().encode("utf-8")).hexdigest()
