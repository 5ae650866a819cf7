"""Exception hierarchy shared across the package.

InputError maps to CLI exit code 2, NumericalError (and subclasses) to 3.
"""


class KernsdrError(Exception):
    pass


class InputError(KernsdrError, ValueError):
    """Bad user input: malformed data, invalid options, dimension mismatch."""


class CalibrationError(InputError):
    """Requested censoring level cannot be reached by the model's mechanism."""


class NumericalError(KernsdrError):
    """Numerical failure during fitting (singular pencil, degenerate data)."""


class SliceDegeneracyError(NumericalError):
    """A slice partition collapsed (ties, empty slices, vanishing mass)."""


class DegenerateDirectionError(NumericalError):
    """A direction has (numerically) zero norm under the Gram metric."""


class LocalSupportError(NumericalError):
    """Kernel-smoothed density below floor: no local support at the query point."""
