"""Exception hierarchy shared by all latinmac modules."""


class LatinMacError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(LatinMacError, ValueError):
    """An argument is outside the documented domain of an operation."""


class ConstructionUnsupported(LatinMacError):
    """The requested combinatorial object cannot be built by our constructions."""


class ConfigError(LatinMacError, ValueError):
    """An experiment configuration is malformed or inconsistent."""
