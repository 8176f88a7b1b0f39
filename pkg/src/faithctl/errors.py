"""Exception hierarchy shared across the toolkit."""


class FaithctlError(Exception):
    """Base class for all toolkit errors."""


class IngestError(FaithctlError):
    """Malformed input data; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InputTooLongError(FaithctlError):
    """Serialized input cannot fit the token budget even after truncation."""


class ProtocolError(FaithctlError):
    """Remote endpoint answered, but not with the expected schema/status."""


class JudgeUnavailableError(FaithctlError):
    """Remote NLI judge unreachable after retries."""


class GeneratorUnavailableError(FaithctlError):
    """Remote generator unreachable after retries."""
