class HennError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(HennError, ValueError):
    """A numeric argument lies outside the function's domain."""


class PartitionError(HennError):
    pass


class InvalidLabelError(HennError, ValueError):
    pass


class DatasetFormatError(HennError):
    """A dataset or domain file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CheckpointError(HennError):
    pass


class ConfigError(HennError):
    pass
