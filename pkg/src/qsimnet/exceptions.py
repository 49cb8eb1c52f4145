"""Error types shared across the package.

The CLI maps these onto exit codes: ValidationError and subclasses exit
with 1, I/O problems with 2, ResourceError and CapacityError with 3.
"""


class ValidationError(ValueError):
    """Bad input data or configuration."""


class ShapeError(ValidationError):
    """Sequence length or dimensionality mismatch."""


class DegenerateInputError(ValidationError):
    """Structurally valid input that is numerically unusable (e.g. a zero vector)."""


class ResourceError(RuntimeError):
    """Request exceeds a hard resource guard (qubit limit, permutation blowup)."""


class CapacityError(ShapeError):
    """Data does not fit the circuit's state space.

    Subclasses ShapeError so capacity overruns behave like shape errors at
    the library level while the CLI can still report them as exit code 3.
    """
