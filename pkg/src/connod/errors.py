"""Exception hierarchy shared across the package."""


class ValidationError(ValueError):
    """Input violates a structural precondition (shape, symmetry, rank...)."""


class UnsupportedRankError(ValidationError):
    """Operation requires rank-one constraints but got a higher-rank set."""


class DegenerateThresholdError(ValidationError):
    """alpha + lambda*gamma is (numerically) zero; no critical attention."""


class NumericError(RuntimeError):
    """A numerical routine failed to converge or produced garbage."""


class DivergenceError(NumericError):
    """Integration produced a non-finite state."""

    def __init__(self, time: float):
        super().__init__(f"state diverged (non-finite) at t = {time:.6g}")
        self.time = time
