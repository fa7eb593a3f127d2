"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class ClimhetError(Exception):
    """Base class for all package errors."""


class ConfigError(ClimhetError):
    """Invalid run configuration or command-line arguments."""


class DataError(ClimhetError):
    """Input data cannot support the requested computation."""


class IngestError(DataError):
    """A station file could not be parsed."""


class PanelError(DataError):
    """No balanced panel can be formed from the available stations."""
