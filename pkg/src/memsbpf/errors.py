"""Exception types raised by the toolkit."""


class MemsError(ValueError):
    """Base class; every computation error in the package derives from it."""

    code = "computation"


class UnknownMaterialError(MemsError, KeyError):
    code = "unknown_material"

    def __str__(self):
        return self.args[0] if self.args else ""


class GeometryError(MemsError):
    code = "geometry"


class NoPeakError(MemsError):
    code = "no_peak"


class CutoffOutOfRangeError(MemsError):
    code = "cutoff_out_of_range"


class NoPullInError(MemsError):
    code = "no_pull_in"


class NoOverlapError(MemsError):
    code = "no_overlap"


class DataFormatError(MemsError):
    """Malformed CSV; ``line`` is the 1-based line number when known."""

    code = "parse"

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonMonotonicError(DataFormatError):
    code = "non_monotonic"


class UnitMismatchError(DataFormatError):
    code = "unit_mismatch"


class ConfigError(MemsError):
    """Bad run configuration. Treated as a usage error by the CLI."""

    code = "config"


class TooManyPointsError(ConfigError):
    code = "too_many_points"
