import numpy as np
import pytest

from lpveil.core import (LpProblem, Tolerance, digest, random_lambda,
                         random_nonsingular, validate_problem)
from lpveil.errors import (DimensionMismatch, NonFinite, RankDeficient,
                           SingularityExhausted)


def problem(A, b, B=None, c=None):
    A = np.asarray(A, float)
    n = A.shape[1]
    return LpProblem(A=A,
                     B=np.eye(n) if B is None else np.asarray(B, float),
                     b=np.asarray(b, float),
                     c=np.zeros(n) if c is None else np.asarray(c, float))


def cofactor_det(mat):
    """Independent determinant oracle: recursive cofactor expansion."""
    mat = np.asarray(mat, float)
    n = mat.shape[0]
    if n == 1:
        return mat[0, 0]
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(mat, 0, axis=0), j, axis=1)
        total += (-1) ** j * mat[0, j] * cofactor_det(minor)
    return total


class TestValidateProblem:
    def test_well_formed(self):
        validate_problem(problem([[1, 1]], [2], c=[1, 2]))

    def test_duplicate_row_rank_deficient(self):
        with pytest.raises(RankDeficient):
            validate_problem(problem([[1, 1], [2, 2]], [1, 1]))

    def test_nan_rejected(self):
        with pytest.raises(NonFinite):
            validate_problem(problem([[1, np.nan]], [1]))

    def test_dimension_mismatch(self):
        p = LpProblem(A=np.ones((1, 2)), B=np.eye(3), b=np.ones(1), c=np.ones(2))
        with pytest.raises(DimensionMismatch):
            validate_problem(p)

    def test_more_rows_than_columns_rejected(self):
        with pytest.raises(DimensionMismatch):
            validate_problem(problem([[1], [2]], [1, 2]))


class TestRandomNonsingular:
    def test_dim_one_diagonal_bound(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = random_nonsingular(1, rng)[0, 0]
            assert 0.5 <= abs(u) <= 2.0

    def test_det_bound_dim_three(self):
        # diagonal magnitudes are all >= 1/2, so |det| > (1/2)^3
        rng = np.random.default_rng(7)
        for _ in range(20):
            mat = random_nonsingular(3, rng)
            assert abs(cofactor_det(mat)) > 0.125 - 1e-12

    @pytest.mark.parametrize("dim", [1, 2, 5, 17, 60])
    def test_solve_round_trip(self, dim):
        rng = np.random.default_rng(dim)
        mat = random_nonsingular(dim, rng)
        rhs = rng.standard_normal(dim)
        x = np.linalg.solve(mat, rhs)  # LU-based oracle
        assert np.max(np.abs(mat @ x - rhs)) <= 1e-9

    def test_condition_capped(self):
        rng = np.random.default_rng(3)
        for dim in (10, 40, 120):
            assert np.linalg.cond(random_nonsingular(dim, rng)) <= 1e6


class TestRandomLambda:
    def test_scalar_b_forces_zero(self):
        p = problem([[1, 1]], [2], c=[1, 2])
        lam = random_lambda(p, np.random.default_rng(0))
        assert np.max(np.abs(lam)) <= 1e-12

    def test_projection_formula(self):
        # raw row (3,1) projected against b=(1,1) must become (1,-1)
        r = np.array([3.0, 1.0])
        b = np.array([1.0, 1.0])
        proj = r - ((r @ b) / (b @ b)) * b
        assert np.allclose(proj, [1.0, -1.0])
        assert proj @ b == 0.0

    def test_orthogonality_and_nonsingularity(self):
        rng = np.random.default_rng(11)
        for seed in range(10):
            A = rng.uniform(-1, 1, (3, 6))
            b = rng.uniform(-1, 1, 3)
            p = problem(A, b, B=np.eye(6))
            lam = random_lambda(p, np.random.default_rng(seed))
            assert np.max(np.abs(lam @ b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))
            sign, logdet = np.linalg.slogdet(p.B - lam @ p.A)
            assert sign != 0 and np.isfinite(logdet)

    def test_zero_b_vacuous(self):
        p = problem([[1, 0]], [0], c=[1, 1])
        lam = random_lambda(p, np.random.default_rng(5))
        assert np.linalg.det(p.B - lam @ p.A) != 0

    def test_singularity_exhausted(self):
        # B = 0 and A = e1^T: B - lam A has a zero column for every lam
        p = problem([[1, 0]], [0], B=np.zeros((2, 2)))
        with pytest.raises(SingularityExhausted):
            random_lambda(p, np.random.default_rng(0))


class TestDigestAndSerialization:
    def test_digest_deterministic(self):
        p = problem([[1, 1]], [2], c=[1, 2])
        q = problem([[1, 1]], [2], c=[1, 2])
        assert digest(p) == digest(q)

    def test_digest_ulp_sensitive(self):
        p = problem([[1, 1]], [2], c=[1, 2])
        c2 = p.c.copy()
        c2[1] = np.nextafter(c2[1], np.inf)
        q = LpProblem(A=p.A, B=p.B, b=p.b, c=c2)
        assert digest(p) != digest(q)

    def test_round_trip_bit_exact(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            A = rng.standard_normal((3, 5)) * rng.uniform(1e-8, 1e8)
            p = LpProblem(A=A, B=rng.standard_normal((5, 5)),
                          b=rng.standard_normal(3), c=rng.standard_normal(5))
            q = LpProblem.from_json(p.canonical_json())
            for name in ("A", "B", "b", "c"):
                assert np.array_equal(getattr(p, name), getattr(q, name))
            assert digest(p) == digest(q)

    def test_canonical_form_has_no_whitespace(self):
        s = problem([[1, 1]], [2], c=[1, 2]).canonical_json()
        assert " " not in s and "\n" not in s
        assert s.startswith('{"m":1,"n":2,"A":')
