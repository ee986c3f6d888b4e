"""Command-line front end.

Exit codes: 0 success / certificate accepted, 2 verification rejected,
3 accepted infeasibility, 4 accepted unboundedness, 1 any error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench as bench_mod
from .core import EncryptedProblem, LpProblem, Tolerance, digest
from .errors import KeyReuse, LpVeilError
from .generate import random_problem
from .netproto import CloudServer, request_solve
from .oracle import enumerate_solve
from .solver import CloudResult, proof_gen
from .transform import (Rejection, keygen, load_key, prob_enc, result_dec,
                        save_key)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REJECTED = 2
EXIT_INFEASIBLE = 3
EXIT_UNBOUNDED = 4


def _tolerance(args) -> Tolerance:
    if getattr(args, "tol", None) is None:
        return Tolerance()
    return Tolerance(feas_rel=args.tol, gap_rel=args.tol)


def _write(path: str, text: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _solution_exit(sol) -> int:
    if isinstance(sol, Rejection):
        return EXIT_REJECTED
    return {"optimal": EXIT_OK, "infeasible": EXIT_INFEASIBLE,
            "unbounded": EXIT_UNBOUNDED}[sol.status]


def cmd_gen(args) -> int:
    p = random_problem(args.size, args.m, seed=args.seed, mode=args.mode,
                       random_b_matrix=args.random_b)
    _write(args.output, p.canonical_json())
    print(f"wrote {args.output} (n={p.n}, m={p.m}, mode={args.mode})")
    return EXIT_OK


def cmd_keygen(args) -> int:
    p = LpProblem.from_json(open(args.problem, encoding="utf-8").read())
    key = keygen(p, seed=args.seed, tol=_tolerance(args))
    save_key(key, args.output)
    print(f"wrote {args.output} (bound to digest {key.problem_digest[:16]}...)")
    return EXIT_OK


def cmd_encrypt(args) -> int:
    key = load_key(args.key)
    p = LpProblem.from_json(open(args.problem, encoding="utf-8").read())
    e = prob_enc(key, p)  # raises KeyReuse if the key file says used
    save_key(key, args.key)  # persist the used-flag before releasing ciphertext
    _write(args.output, e.canonical_json())
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_solve(args) -> int:
    e = EncryptedProblem.from_json(open(args.encrypted, encoding="utf-8").read())
    result = proof_gen(e, _tolerance(args))
    _write(args.output, json.dumps(result.to_dict(), separators=(",", ":")))
    print(f"wrote {args.output} (status={result.status}, "
          f"iterations={result.iterations})")
    return EXIT_OK


def cmd_decrypt(args) -> int:
    key = load_key(args.key)
    p = LpProblem.from_json(open(args.problem, encoding="utf-8").read())
    result = CloudResult.from_dict(_read_json(args.result))
    sol = result_dec(key, p, result, _tolerance(args))
    _write(args.output, json.dumps(sol.to_dict(), separators=(",", ":")))
    if isinstance(sol, Rejection):
        print(f"REJECTED: {sol.condition} (residual {sol.residual:.3e})",
              file=sys.stderr)
    else:
        print(f"wrote {args.output} (status={sol.status})")
    return _solution_exit(sol)


def cmd_oracle(args) -> int:
    d = _read_json(args.problem)
    prob = (EncryptedProblem.from_dict(d) if "Ap" in d else LpProblem.from_dict(d))
    res = enumerate_solve(prob, _tolerance(args))
    if res.status == "optimal":
        print(f"optimal objective {res.objective!r} "
              f"({len(res.vertices)} optimal vertices)")
        return EXIT_OK
    print(res.status)
    return EXIT_INFEASIBLE if res.status == "infeasible" else EXIT_UNBOUNDED


def cmd_serve(args) -> int:
    server = CloudServer(host=args.host, port=args.port, tol=_tolerance(args))
    host, port = server.address
    print(f"cloud solver listening on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def cmd_client(args) -> int:
    host, _, port = args.addr.rpartition(":")
    key = load_key(args.key)
    p = LpProblem.from_json(open(args.problem, encoding="utf-8").read())
    e = prob_enc(key, p)
    save_key(key, args.key)
    result = request_solve((host or "127.0.0.1", int(port)), e)
    sol = result_dec(key, p, result, _tolerance(args))
    _write(args.output, json.dumps(sol.to_dict(), separators=(",", ":")))
    if isinstance(sol, Rejection):
        print(f"REJECTED: {sol.condition} (residual {sol.residual:.3e})",
              file=sys.stderr)
    else:
        print(f"wrote {args.output} (status={sol.status})")
    return _solution_exit(sol)


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    records, summaries = bench_mod.run_bench(sizes, args.trials, args.seed,
                                             _tolerance(args))
    bench_mod.write_csv(args.csv, records, summaries)
    for r in summaries:
        print(f"n={r.n:5d} median: cloud={r.t_cloud_solve:.4f}s "
              f"verify={r.t_verify * 1e3:.3f}ms customer={r.customer_total:.4f}s "
              f"speedup={r.speedup:.1f}x")
    print(f"wrote {args.csv}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpveil",
                                 description="Disguised LP outsourcing toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random problem with known status")
    g.add_argument("--size", type=int, required=True, help="variable count n")
    g.add_argument("--m", type=int, default=None, help="equality rows (default n/2)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=["feasible", "infeasible", "unbounded"],
                   default="feasible")
    g.add_argument("--random-b", action="store_true",
                   help="random nonsingular B instead of the identity")
    g.add_argument("-o", "--output", default="problem.json")
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("keygen", help="draw a one-time key bound to a problem")
    g.add_argument("problem")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("-o", "--output", default="key.json")
    g.set_defaults(func=cmd_keygen)

    g = sub.add_parser("encrypt", help="disguise a problem under a key")
    g.add_argument("key")
    g.add_argument("problem")
    g.add_argument("-o", "--output", default="encrypted.json")
    g.set_defaults(func=cmd_encrypt)

    g = sub.add_parser("solve", help="cloud-side solve with certificate")
    g.add_argument("encrypted")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("-o", "--output", default="result.json")
    g.set_defaults(func=cmd_solve)

    g = sub.add_parser("decrypt", help="verify the cloud result and recover x")
    g.add_argument("key")
    g.add_argument("problem")
    g.add_argument("result")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("-o", "--output", default="solution.json")
    g.set_defaults(func=cmd_decrypt)

    g = sub.add_parser("oracle", help="brute-force vertex enumeration (n <= 12)")
    g.add_argument("problem", help="plaintext or disguised problem file")
    g.add_argument("--tol", type=float, default=None)
    g.set_defaults(func=cmd_oracle)

    g = sub.add_parser("serve", help="run the cloud solver daemon")
    g.add_argument("--host", default="127.0.0.1")
    g.add_argument("--port", type=int, default=9735)
    g.add_argument("--tol", type=float, default=None)
    g.set_defaults(func=cmd_serve)

    g = sub.add_parser("client", help="end-to-end outsourcing against a server")
    g.add_argument("--addr", required=True, help="host:port of the cloud server")
    g.add_argument("key")
    g.add_argument("problem")
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("-o", "--output", default="solution.json")
    g.set_defaults(func=cmd_client)

    g = sub.add_parser("bench", help="customer/cloud timing benchmark")
    g.add_argument("--sizes", default="50,100,200,400",
                   help="comma-separated n values")
    g.add_argument("--trials", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--csv", default="bench.csv")
    g.set_defaults(func=cmd_bench)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyReuse as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (LpVeilError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
