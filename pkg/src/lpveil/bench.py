"""Timing benchmark for the customer/cloud cost asymmetry.

For every (size, trial) a fresh feasible bounded instance is generated,
the full outsourcing pipeline runs in-process, and each stage is timed
with the monotonic clock; the same solver is also run on the plaintext
problem as the local baseline.  One CSV row per trial plus a per-size
median summary row.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass, field

from .core import DEFAULT_TOL, Tolerance
from .errors import VerificationFailed
from .generate import random_problem
from .solver import proof_gen
from .transform import Rejection, keygen, prob_enc, result_dec

CSV_FIELDS = ["n", "m", "t_keygen", "t_enc", "t_cloud_solve", "t_verify", "t_dec",
              "t_local_solve", "customer_total", "speedup", "cloud_overhead"]


@dataclass
class BenchRecord:
    n: int
    m: int
    t_keygen: float
    t_enc: float
    t_cloud_solve: float
    t_verify: float
    t_dec: float
    t_local_solve: float
    customer_total: float = field(init=False)
    speedup: float = field(init=False)
    cloud_overhead: float = field(init=False)

    def __post_init__(self):
        self.customer_total = self.t_keygen + self.t_enc + self.t_verify + self.t_dec
        self.speedup = (self.t_local_solve / self.customer_total
                        if self.customer_total > 0 else float("inf"))
        self.cloud_overhead = (self.t_cloud_solve / self.t_local_solve
                               if self.t_local_solve > 0 else float("inf"))

    def as_row(self) -> list:
        return [getattr(self, f) for f in CSV_FIELDS]


def run_trial(n: int, m: int | None, seed: int,
              tol: Tolerance = DEFAULT_TOL) -> BenchRecord:
    p = random_problem(n, m, seed=seed, mode="feasible")
    clock = time.monotonic

    t0 = clock()
    key = keygen(p, seed=seed ^ 0x5EED, tol=tol)
    t_keygen = clock() - t0

    t0 = clock()
    e = prob_enc(key, p)
    t_enc = clock() - t0

    t0 = clock()
    result = proof_gen(e, tol)
    t_cloud_solve = clock() - t0

    # verify and decrypt are one call; time the verification predicates
    # separately so the paper's "close-to-zero overhead" claim is visible
    from . import verify
    t0 = clock()
    verify.check_optimal(e, result.y, result.s, result.t, tol)
    t_verify = clock() - t0

    t0 = clock()
    sol = result_dec(key, p, result, tol)
    t_dec = clock() - t0
    if isinstance(sol, Rejection):
        raise VerificationFailed(sol.condition, sol.residual)

    # local baseline: same solver, plaintext problem
    from .core import EncryptedProblem
    plain = EncryptedProblem(Ap=p.A, Bp=p.B, bp=p.b, cp=p.c, problem_digest="")
    t0 = clock()
    proof_gen(plain, tol)
    t_local_solve = clock() - t0

    return BenchRecord(n=p.n, m=p.m, t_keygen=t_keygen, t_enc=t_enc,
                       t_cloud_solve=t_cloud_solve, t_verify=t_verify,
                       t_dec=t_dec, t_local_solve=t_local_solve)


def run_bench(sizes: list[int], trials: int, seed: int,
              tol: Tolerance = DEFAULT_TOL) -> tuple[list[BenchRecord], list[BenchRecord]]:
    """Returns (per-trial records, per-size median summaries)."""
    records: list[BenchRecord] = []
    summaries: list[BenchRecord] = []
    for n in sizes:
        group = [run_trial(n, None, seed=seed + 7919 * n + i, tol=tol)
                 for i in range(trials)]
        records.extend(group)
        med = {f: statistics.median(getattr(r, f) for r in group)
               for f in ("t_keygen", "t_enc", "t_cloud_solve", "t_verify",
                         "t_dec", "t_local_solve")}
        summaries.append(BenchRecord(n=group[0].n, m=group[0].m, **med))
    return records, summaries


def write_csv(path: str, records: list[BenchRecord],
              summaries: list[BenchRecord] | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow(r.as_row())
        for r in summaries or []:
            writer.writerow(r.as_row())
