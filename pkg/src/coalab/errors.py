"""Exception hierarchy for coalab."""


class CoalabError(ValueError):
    """Base class for all input/contract violations raised by coalab."""


class NotHermitian(CoalabError):
    pass


class NotPSD(CoalabError):
    pass


class NotSymmetric(CoalabError):
    pass


class NonzeroTrace(CoalabError):
    pass


class NotUnitary(CoalabError):
    pass


class NotNormalized(CoalabError):
    pass


class DimMismatch(CoalabError):
    pass


class BadDims(CoalabError):
    pass


class BadSubsystem(CoalabError):
    pass


class BadCut(CoalabError):
    pass


class EnsembleMismatch(CoalabError):
    pass


class TooManyQubits(CoalabError):
    pass


class ConvergenceError(CoalabError, RuntimeError):
    pass
