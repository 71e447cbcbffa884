"""Exception hierarchy shared across the package.

Kept in one module so the HTTP service can map error classes to status
codes without importing every subsystem.
"""


class DramaturgError(Exception):
    """Base class for all package errors."""


# --- domain model -----------------------------------------------------------

class InvalidLogLine(DramaturgError):
    pass


class InvalidCharacter(DramaturgError):
    pass


class InvalidScene(DramaturgError):
    pass


class EmptySlot(DramaturgError):
    pass


class UnknownSlot(DramaturgError):
    """Slot address does not exist in the session."""


class InvalidCandidateIndex(DramaturgError):
    pass


# --- prompt sets ------------------------------------------------------------

class PromptSetError(DramaturgError):
    pass


class PromptSetParseError(PromptSetError):
    pass


class UnknownPlaceholder(PromptSetError):
    pass


class MissingFamily(PromptSetError):
    pass


class EmptyCharacterList(DramaturgError):
    pass


class EmptyLocationName(DramaturgError):
    pass


# --- language-model gateway -------------------------------------------------

class GatewayError(DramaturgError):
    pass


class BackendUnavailable(GatewayError):
    """Network or server failure that persisted through the retry budget."""


class BackendRejected(GatewayError):
    """The backend refused the request (4xx-style); not retryable."""


class ContextOverflow(GatewayError):
    """Prompt exceeds the backend's declared context window."""


# --- parsing of generated output --------------------------------------------

class OutputParseError(DramaturgError):
    pass


class EmptyTitle(OutputParseError):
    pass


class NoCharactersFound(OutputParseError):
    pass


class NoScenesFound(OutputParseError):
    pass


class MalformedScene(OutputParseError):
    def __init__(self, ordinal: int, message: str = ""):
        self.ordinal = ordinal
        super().__init__(message or f"scene {ordinal} is missing a field")


class UnparseableEdit(OutputParseError):
    pass


# --- metrics ------------------------------------------------------------------

class EmptyOriginal(DramaturgError):
    pass


class EmptyInput(DramaturgError):
    pass


# --- engine -----------------------------------------------------------------

class UpstreamMissing(DramaturgError):
    """A required upstream slot has no accepted or edited text yet."""

    def __init__(self, missing: str):
        self.missing = missing
        super().__init__(f"upstream slot {missing!r} is not resolved")


class FullGenerationError(DramaturgError):
    """Wraps a failure inside generate_full, tagged with the failing slot."""

    def __init__(self, slot_address: str, cause: Exception):
        self.slot_address = slot_address
        self.cause = cause
        super().__init__(f"generation failed at {slot_address!r}: {cause}")


# --- persistence / assembly -------------------------------------------------

class IncompleteSession(DramaturgError):
    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__("session has unresolved slots: " + ", ".join(missing))


class SerializationError(DramaturgError):
    pass


class VersionMismatch(DramaturgError):
    pass
