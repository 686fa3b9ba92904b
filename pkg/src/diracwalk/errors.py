"""Exception hierarchy shared by all modules.

``InputError`` subclasses map to CLI exit code 2, everything else to 1.
"""


class InputError(ValueError):
    """Invalid user-supplied parameter."""


class GeometryError(InputError):
    """Lattice geometry cannot tile correctly (odd sides, bad dimension)."""


class DomainError(InputError):
    """Argument outside the domain of an analytic formula."""


class AlgebraError(RuntimeError):
    """A block matrix failed one of its algebraic invariants."""


class UnwrapError(RuntimeError):
    """Support of a ring distribution touches the antipode."""


class PeakNotFoundError(RuntimeError):
    """No marked-vertex peak above the noise floor within the call budget."""


class ExperimentError(RuntimeError):
    """A scaling experiment failed for one of its lattice sizes."""
