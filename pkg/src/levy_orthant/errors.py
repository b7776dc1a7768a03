"""Exception hierarchy shared by all modules."""


class LevyOrthantError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LevyOrthantError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateModel(LevyOrthantError):
    """The cumulant Hessian is singular, so the increment law is degenerate."""


class NoConvergence(LevyOrthantError):
    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class NoFiniteMinimum(LevyOrthantError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoRoot(LevyOrthantError):
    pass


class VertexNotMpp(LevyOrthantError):
    """The vertex of the scaled orthant is not its most probable point."""


class ConditionError(LevyOrthantError):
    pass


class ConfigError(LevyOrthantError, ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


class FitError(LevyOrthantError):
    pass
