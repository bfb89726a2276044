"""Exception types shared across the package."""


class SfrrtError(Exception):
    """Base class for all errors raised by this package."""


class InvalidContainer(SfrrtError):
    """Container dimensions violate the geometric preconditions."""


class Degenerate(SfrrtError):
    """Inputs collapse the problem to a case with no defined answer."""


class EmptyProfile(SfrrtError):
    """A radial profile with no samples was supplied."""


class NonFiniteInput(SfrrtError):
    """An input array contains NaN or infinity."""


class InvalidConfig(SfrrtError):
    """A configuration value is out of its documented range."""


class InfeasibleQuery(SfrrtError):
    """Start or goal pose is in collision or violates the tilt cap."""


class NoPathFound(SfrrtError):
    """The planner exhausted its budget without connecting the query."""


class EmptyPath(SfrrtError):
    """A path with fewer than two waypoints was supplied."""


class NonFiniteTrajectory(SfrrtError):
    """A trajectory contains NaN or infinity."""


class EmptyTrajectory(SfrrtError):
    """A trajectory with no samples was supplied."""


class NoSpillFreeTrajectory(SfrrtError):
    """Jerk reduction hit its floor without finding a safe trajectory."""


class EncodingError(SfrrtError):
    """A trajectory could not be resampled into classifier input."""


class ShapeMismatch(SfrrtError):
    """A tensor does not have the expected dimensions."""


class FileFormatError(SfrrtError):
    """Base class for errors in on-disk binary formats."""


class BadMagic(FileFormatError):
    """The file does not start with the expected magic bytes."""


class VersionUnsupported(FileFormatError):
    """The file declares a format version this code cannot read."""


class TruncatedFile(FileFormatError):
    """The file ended before the declared content was complete."""
