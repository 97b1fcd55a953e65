"""Exception types shared across the toolkit."""


class NumericDomainError(ArithmeticError):
    """A radicand or discriminant left its mathematically valid domain.

    Carries the offending value so callers can log or inspect it.
    """

    def __init__(self, message, value):
        super().__init__(f"{message} (value={value!r})")
        self.value = value


class DegenerateEigenvectorError(ArithmeticError):
    """All candidate cofactor vectors vanished; the eigenvector is undetermined."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to converge within its sweep budget."""


class PlyParseError(ValueError):
    """Malformed or unsupported PLY content.

    ``offset`` is the byte offset of the failure when known, else -1.
    """

    def __init__(self, message, offset=-1):
        super().__init__(f"{message} (byte offset {offset})" if offset >= 0 else message)
        self.offset = offset


class IcpSolverError(RuntimeError):
    """Inner solver failed during ICP; ``iteration`` is the 1-based loop index."""

    def __init__(self, message, iteration):
        super().__init__(f"ICP iteration {iteration}: {message}")
        self.iteration = iteration
