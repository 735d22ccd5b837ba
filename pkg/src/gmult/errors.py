"""Exception types raised across the package."""


class GmultError(Exception):
    """Base class for all package errors."""


class DimMismatch(GmultError, ValueError):
    pass


class NotHermitian(GmultError, ValueError):
    pass


class NotPSD(GmultError, ValueError):
    pass


class NotUnitary(GmultError, ValueError):
    pass


class NotOrthonormalBasis(GmultError, ValueError):
    pass


class NotRieszBasis(GmultError, ValueError):
    pass


class PreconditionFailed(GmultError, ValueError):
    pass


class ZeroVector(GmultError, ValueError):
    pass


class ZeroProbe(GmultError, ValueError):
    pass


class BiorthogonalityViolated(GmultError, ValueError):
    """Raised when a closed form needs <u_k, v_n> = 0 for k != n and it fails.

    ``max_pairing`` holds the largest off-diagonal pairing modulus found.
    """

    def __init__(self, message, max_pairing=float("nan")):
        super().__init__(message)
        self.max_pairing = max_pairing


class SharedDataMismatch(GmultError, ValueError):
    pass


class NotTraceClass(GmultError, ValueError):
    pass


class ScenarioError(GmultError):
    pass


class ParseError(ScenarioError):
    def __init__(self, message, line=None, column=None, field=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if column is not None:
            loc.append(f"column {column}")
        if field is not None:
            loc.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.line = line
        self.column = column
        self.field = field


class ValidationError(ScenarioError):
    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
