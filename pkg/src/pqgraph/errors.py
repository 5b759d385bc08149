"""Exception hierarchy shared across the engine."""


class PqgraphError(Exception):
    """Base class for all engine errors."""


class ValidationError(PqgraphError):
    """An input value violates a declared range or shape constraint."""


class StructuralError(PqgraphError):
    """A graph or document references entities that do not exist."""


class ConfigurationError(PqgraphError):
    """A scoring configuration cannot produce a well-defined result."""


class PathExplosionError(PqgraphError):
    """Exact path enumeration exceeded the configured cap.

    Carries the cap so callers can surface actionable guidance (switch the
    scoring mode to the all-walks backend).
    """

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(
            f"path enumeration exceeded the cap of {cap} paths; "
            "use the 'katz' scoring mode for graphs of this density"
        )


class EndpointUnavailableError(PqgraphError):
    """The inference endpoint could not be reached after retries."""


class ParseError(PqgraphError):
    """A document or feed record could not be parsed."""


class NotFoundError(PqgraphError):
    """A referenced item, version, or record does not exist."""


class ConflictError(PqgraphError):
    """A terminal decision was attempted twice for the same item."""
