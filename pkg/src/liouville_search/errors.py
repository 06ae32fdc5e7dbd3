"""Exception hierarchy shared by all modules."""


class LiouvilleSearchError(Exception):
    """Base class for every error raised by the package."""


class ConvergenceFailure(LiouvilleSearchError):
    pass


class NoMatching(LiouvilleSearchError):
    pass


class ConstraintViolation(LiouvilleSearchError):
    pass


class UnknownTransition(LiouvilleSearchError):
    pass


class UnobservedTransition(LiouvilleSearchError):
    pass


class Unreachable(LiouvilleSearchError):
    """Two levels lie in different components of the observed-transition graph."""


class Unpreparable(LiouvilleSearchError):
    pass


class UnsearchableState(LiouvilleSearchError):
    """The ancilla transition of the marked state is not available."""


class EmptySpectrum(LiouvilleSearchError):
    pass


class ConfigError(LiouvilleSearchError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
