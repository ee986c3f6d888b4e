"""Exception hierarchy shared across the toolkit."""


class LpVeilError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(LpVeilError):
    pass


class NonFinite(LpVeilError):
    pass


class RankDeficient(LpVeilError):
    pass


class SingularMatrix(LpVeilError):
    pass


class SingularityExhausted(LpVeilError):
    """Resampling failed to find a mask keeping B - lambda*A nonsingular."""


class KeyProblemMismatch(LpVeilError):
    pass


class KeyReuse(LpVeilError):
    pass


class NumericalInstability(LpVeilError):
    pass


class SelfCheckFailed(LpVeilError):
    """The solver's own certificate failed its self-check (internal bug guard)."""


class TooLarge(LpVeilError):
    """Instance exceeds the brute-force oracle's combinatorial cutoff."""


class VerificationFailed(LpVeilError):
    def __init__(self, condition: str, residual: float):
        super().__init__(f"verification failed: {condition} (residual {residual:.3e})")
        self.condition = condition
        self.residual = residual


class ProtocolError(LpVeilError):
    pass


class ConnectionFailed(LpVeilError):
    pass


class ServerError(LpVeilError):
    def __init__(self, code: int, message: str = ""):
        super().__init__(f"server error {code}: {message}")
        self.code = code
        self.message = message
