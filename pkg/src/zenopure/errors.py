"""Exception and warning types shared across the package."""


class ZenoError(Exception):
    """Base class for all errors raised by zenopure."""


class NotHermitian(ZenoError):
    def __init__(self, violation: float, tol: float):
        self.violation = float(violation)
        self.tol = float(tol)
        super().__init__(
            f"matrix is not Hermitian: max|H - H^dag| = {self.violation:.3e} > tol {self.tol:.1e}"
        )


class NumericallyDefective(ZenoError):
    """Jordan-chain construction did not close at the requested tolerance."""


class InvalidSpec(ZenoError, ValueError):
    pass


class DimensionMismatch(ZenoError, ValueError):
    pass


class ZeroProjectionProbability(ZenoError):
    pass


class NoUniqueTarget(ZenoError):
    """The dominant eigenvalue is tied in modulus, so no single target exists."""


class NoFeasiblePoint(ZenoError):
    pass


class ParseError(ZenoError):
    pass


class ValidationError(ZenoError, ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NoUniqueTargetWarning(UserWarning):
    pass


class NotOptimalWarning(UserWarning):
    pass
