"""Exception hierarchy raised by pylufid.

Validation failures subclass :class:`ValueError` and numerical failures
subclass :class:`ArithmeticError`, so callers that already catch the
builtin families keep working.
"""


class PylufidError(Exception):
    """Base class for every error raised by pylufid."""


class NonFinite(PylufidError, ValueError):
    """Input or result contains NaN or Inf entries."""


class NotHermitian(PylufidError, ValueError):
    """Matrix deviates from its adjoint beyond tolerance."""


class NotPSD(PylufidError, ValueError):
    """Matrix has an eigenvalue below the PSD tolerance."""


class DimensionMismatch(PylufidError, ValueError):
    """Operands are not conformable or the bipartite split is wrong."""


class BadParameter(PylufidError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class BadSpectrum(PylufidError, ValueError):
    """A spectrum is negative or not normalized."""


class BadConfig(PylufidError, ValueError):
    """Optimizer configuration is invalid."""


class SchemaViolation(BadParameter):
    """A JSON document does not match its published schema."""


class InvalidChannel(PylufidError, ValueError):
    """Kraus operators violate the completeness relation."""


class MissingWitness(PylufidError, ValueError):
    """An optimizer report lacks the achieving local unitary."""


class DimensionTooLarge(PylufidError, ValueError):
    """Requested computation exceeds the supported dimension."""


class SingularRetraction(PylufidError, ArithmeticError):
    """Cayley retraction stayed ill-conditioned after all step halvings."""


class ConvergenceFailure(PylufidError, ArithmeticError):
    """An iterative procedure did not reach its tolerance."""


class IoError(PylufidError, OSError):
    """Reading or writing a problem file failed."""
