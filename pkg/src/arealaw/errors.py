"""Exception types shared across the package."""


class ContractError(ValueError):
    """A precondition on an argument was violated."""


class CapExceeded(ContractError):
    """A requested object would exceed a configured size cap."""

    def __init__(self, what: str, size: int, cap: int, factors=None):
        self.what = what
        self.size = size
        self.cap = cap
        self.factors = tuple(factors) if factors is not None else None
        msg = f"{what}: size {size} exceeds cap {cap}"
        if self.factors:
            msg += " (factors " + " x ".join(str(f) for f in self.factors) + ")"
        super().__init__(msg)


class ConvergenceError(RuntimeError):
    """An iterative solver ran out of iterations.

    ``residuals`` holds the best residual norms reached, one per requested pair.
    """

    def __init__(self, msg: str, residuals=None, eigenvalues=None):
        self.residuals = residuals
        self.eigenvalues = eigenvalues
        super().__init__(msg)


class ModelCheckError(RuntimeError):
    """A structural property a model must satisfy failed at construction."""
