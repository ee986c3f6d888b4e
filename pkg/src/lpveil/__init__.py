"""lpveil: outsource a linear program in disguised form, verify the
returned answer through LP duality, and recover the true solution."""

from .core import (EncryptedProblem, LpProblem, SecretKey, Tolerance,
                   digest, random_lambda, random_nonsingular, validate_problem)
from .solver import CloudResult, proof_gen, simplex_solve, to_standard_form
from .transform import (Rejection, VerifiedSolution, keygen, prob_enc,
                        result_dec)
from .verify import check_infeasible, check_optimal, check_unbounded
from .oracle import enumerate_solve

__all__ = [
    "LpProblem", "EncryptedProblem", "SecretKey", "Tolerance",
    "validate_problem", "random_nonsingular", "random_lambda", "digest",
    "keygen", "prob_enc", "result_dec", "VerifiedSolution", "Rejection",
    "CloudResult", "to_standard_form", "simplex_solve", "proof_gen",
    "check_optimal", "check_infeasible", "check_unbounded",
    "enumerate_solve",
]
