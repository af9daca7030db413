"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for simulator errors. `code` is the wire-level error code."""

    code = "error"


class SpecError(SimError):
    """Home description violates a structural invariant."""

    code = "spec_error"


class ParseError(SimError):
    """Scenario document is malformed. Message names the offending field."""

    code = "parse_error"


class NotFound(SimError):
    code = "not_found"


class CannotCloseRoot(SimError):
    """Root and outside spaces are permanent."""

    code = "cannot_close"


class TargetIsClosing(SimError):
    code = "target_is_closing"


class Unauthorized(SimError):
    """Move from outside into an interior space without authentication."""

    code = "unauthorized"


class OutOfBounds(SimError):
    code = "out_of_bounds"


class InvalidProperty(SimError):
    """Command property does not exist on the target appliance kind."""

    code = "invalid_property"


class UnknownPerson(SimError):
    """Authentication attempt for a person absent from the registry."""

    code = "unknown_person"


class SchemaMismatch(SimError):
    """Case signatures do not share a feature schema."""

    code = "schema_mismatch"


class BadMessage(SimError):
    """Protocol line failed to parse or validate."""

    code = "bad_message"


class Unsupported(SimError):
    """Protocol message type is not part of the vocabulary."""

    code = "unsupported"


class WeatherUnavailable(SimError):
    """Live weather provider could not be reached or understood."""

    code = "weather_unavailable"
