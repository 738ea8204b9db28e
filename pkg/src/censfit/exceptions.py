"""Exception hierarchy shared by all censfit modules."""


class CensfitError(Exception):
    """Base class for every error raised by censfit."""


class DimensionError(CensfitError, ValueError):
    """Covariate or parameter arrays have inconsistent shapes."""


class ParameterError(CensfitError, ValueError):
    """A parameter vector lies outside the admissible set."""


class CensoredAtomError(CensfitError, ArithmeticError):
    """Derivative of log(1 - F) requested at a point where F evaluates to 1.

    The likelihood assembles censored terms only where the survival
    probability is positive, so seeing this error from user code means a
    family method was called directly on such a point.
    """


class ZeroDensityError(CensfitError, ArithmeticError):
    """Derivative of log f requested where f is zero."""


class IdentifiabilityError(CensfitError):
    """The dataset cannot identify the parameter vector."""


class InitializationError(CensfitError):
    """The log-likelihood is -inf at the starting point."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SingularInformationError(CensfitError, ArithmeticError):
    """An information matrix is not positive definite."""


class QuadratureError(CensfitError):
    """Numerical integration did not reach the requested tolerance."""

    def __init__(self, message, abserr=None):
        super().__init__(message)
        self.abserr = abserr


class SchemaError(CensfitError, ValueError):
    """Input file does not match the expected layout."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class ScenarioError(CensfitError, ValueError):
    """Invalid simulation scenario definition."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
