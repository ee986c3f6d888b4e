import threading

import numpy as np
import pytest
import scipy.linalg

from lpveil.core import EncryptedProblem, LpProblem, SecretKey, digest
from lpveil.errors import KeyProblemMismatch, KeyReuse
from lpveil.generate import random_problem
from lpveil.solver import CloudResult, proof_gen
from lpveil.transform import Rejection, keygen, prob_enc, result_dec

HAND = LpProblem(A=np.array([[1.0, 1.0]]), B=np.eye(2),
                 b=np.array([2.0]), c=np.array([1.0, 2.0]))


def manual_key(p, Q, M, lam, gamma):
    return SecretKey(Q=np.asarray(Q, float), M=np.asarray(M, float),
                     lam=np.asarray(lam, float), gamma=gamma,
                     problem_digest=digest(p), seed=0)


class TestKeygen:
    def test_deterministic_byte_identical(self):
        p = random_problem(6, seed=1)
        k1 = keygen(p, seed=99)
        k2 = keygen(p, seed=99)
        assert k1.canonical_json() == k2.canonical_json()

    def test_forced_zero_lambda(self):
        k = keygen(HAND, seed=5)
        assert np.max(np.abs(k.lam)) <= 1e-12

    def test_key_invariants(self):
        for seed in range(5):
            p = random_problem(7, seed=seed)
            k = keygen(p, seed=seed)
            assert 0.5 <= k.gamma <= 2.0
            assert np.max(np.abs(k.lam @ p.b)) <= 1e-12 * max(1, np.max(np.abs(p.b)))
            sign, _ = np.linalg.slogdet(p.B - k.lam @ p.A)
            assert sign != 0
            assert np.linalg.cond(k.Q) <= 1e6
            assert np.linalg.cond(k.M) <= 1e6
            assert k.problem_digest == digest(p)


class TestProbEnc:
    def test_identity_key_is_fixpoint(self):
        k = manual_key(HAND, [[1.0]], np.eye(2), np.zeros((2, 1)), 1.0)
        e = prob_enc(k, HAND)
        assert np.array_equal(e.Ap, HAND.A)
        assert np.array_equal(e.Bp, HAND.B)
        assert np.array_equal(e.bp, HAND.b)
        assert np.array_equal(e.cp, HAND.c)

    def test_pure_scaling_touches_only_c(self):
        k = manual_key(HAND, [[1.0]], np.eye(2), np.zeros((2, 1)), 2.0)
        e = prob_enc(k, HAND)
        assert np.array_equal(e.Ap, HAND.A)
        assert np.array_equal(e.cp, 2.0 * HAND.c)

    def test_hand_example(self):
        # Q=[[2]], M swaps coordinates: hand-solved by vertex enumeration
        k = manual_key(HAND, [[2.0]], [[0.0, 1.0], [1.0, 0.0]],
                       np.zeros((2, 1)), 1.0)
        e = prob_enc(k, HAND)
        assert np.array_equal(e.Ap, [[2.0, 2.0]])
        assert np.array_equal(e.bp, [4.0])
        assert np.array_equal(e.Bp, [[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(e.cp, [2.0, 1.0])
        r = proof_gen(e)
        assert np.allclose(r.y, [0.0, 2.0], atol=1e-9)
        sol = result_dec(k, HAND, r)
        assert np.allclose(sol.x, [2.0, 0.0], atol=1e-9)
        assert sol.objective == pytest.approx(2.0, abs=1e-9)

    def test_key_reuse_rejected(self):
        p = random_problem(5, seed=2)
        k = keygen(p, seed=2)
        prob_enc(k, p)
        with pytest.raises(KeyReuse):
            prob_enc(k, p)

    def test_key_problem_mismatch(self):
        p = random_problem(5, seed=3)
        other = random_problem(5, seed=4)
        k = keygen(p, seed=3)
        with pytest.raises(KeyProblemMismatch):
            prob_enc(k, other)

    def test_used_flag_race_single_winner(self):
        p = random_problem(5, seed=6)
        k = keygen(p, seed=6)
        outcomes = []

        def attempt():
            try:
                prob_enc(k, p)
                outcomes.append("ok")
            except KeyReuse:
                outcomes.append("reuse")

        threads = [threading.Thread(target=attempt) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert outcomes.count("ok") == 1


class TestResultDec:
    def run_pipeline(self, seed, gamma=None):
        p = random_problem(6, seed=seed)
        k = keygen(p, seed=seed + 1)
        if gamma is not None:
            k = SecretKey(Q=k.Q, M=k.M, lam=k.lam, gamma=gamma,
                          problem_digest=k.problem_digest, seed=k.seed)
        e = prob_enc(k, p)
        return p, k, e, proof_gen(e)

    def test_hand_round_trip(self):
        k = manual_key(HAND, [[2.0]], [[0.0, 1.0], [1.0, 0.0]],
                       np.zeros((2, 1)), 1.0)
        e = prob_enc(k, HAND)
        r = CloudResult(status="optimal", y=np.array([0.0, 2.0]),
                        s=np.array([0.5]), t=np.array([0.0, 1.0]))
        sol = result_dec(k, HAND, r)
        assert np.allclose(sol.x, [2.0, 0.0])
        assert sol.objective == pytest.approx(2.0)

    def test_tampered_y_rejected(self):
        k = manual_key(HAND, [[2.0]], [[0.0, 1.0], [1.0, 0.0]],
                       np.zeros((2, 1)), 1.0)
        e = prob_enc(k, HAND)
        r = CloudResult(status="optimal", y=np.array([0.1, 2.0]),
                        s=np.array([0.5]), t=np.array([0.0, 1.0]))
        sol = result_dec(k, HAND, r)
        assert isinstance(sol, Rejection)
        assert sol.condition == "equality"
        assert sol.residual == pytest.approx(0.2)

    def test_gamma_divides_objective(self):
        k = manual_key(HAND, [[1.0]], np.eye(2), np.zeros((2, 1)), 2.0)
        e = prob_enc(k, HAND)
        r = proof_gen(e)
        assert float(e.cp @ r.y) == pytest.approx(4.0, abs=1e-9)
        sol = result_dec(k, HAND, r)
        assert sol.objective == pytest.approx(2.0, abs=1e-9)

    def test_objective_matches_plaintext(self):
        for seed in range(5):
            p, k, e, r = self.run_pipeline(seed)
            sol = result_dec(k, p, r)
            assert sol.status == "optimal"
            assert sol.objective == pytest.approx(float(p.c @ sol.x), rel=1e-9, abs=1e-9)


class TestAlgebraicInvariants:
    def test_feasible_region_bijection(self):
        rng = np.random.default_rng(0)
        for seed in range(10):
            p = random_problem(8, seed=seed)
            k = keygen(p, seed=seed + 100)
            e = prob_enc(k, p)
            y_part = np.linalg.lstsq(e.Ap, e.bp, rcond=None)[0]
            null = scipy.linalg.null_space(e.Ap)
            for _ in range(5):
                y = y_part + null @ rng.standard_normal(null.shape[1])
                x = k.M @ y
                assert np.max(np.abs(p.A @ x - p.b)) <= 1e-8
                scale = max(1.0, np.max(np.abs(e.Bp @ y)))
                assert np.max(np.abs(p.B @ x - e.Bp @ y)) <= 1e-8 * scale

    def test_objective_correspondence_everywhere(self):
        rng = np.random.default_rng(1)
        for seed in range(10):
            p = random_problem(7, seed=seed)
            k = keygen(p, seed=seed + 200)
            e = prob_enc(k, p)
            for _ in range(5):
                y = rng.standard_normal(p.n)  # not necessarily feasible
                lhs = float(e.cp @ y)
                rhs = k.gamma * float(p.c @ (k.M @ y))
                assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)

    def test_optimal_value_equivariance(self):
        for seed in range(8):
            p = random_problem(6, seed=seed)
            k = keygen(p, seed=seed + 300)
            e = prob_enc(k, p)
            opt_enc = float(e.cp @ proof_gen(e).y)
            plain = EncryptedProblem(Ap=p.A, Bp=p.B, bp=p.b, cp=p.c,
                                     problem_digest="")
            opt_plain = float(p.c @ proof_gen(plain).y)
            assert opt_enc == pytest.approx(k.gamma * opt_plain, rel=1e-8, abs=1e-8)
