"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A file does not match the pinned column/format contract."""


class IntegrityError(ValueError):
    """Parsed data violates a structural invariant (frame gaps, id clashes)."""


class GenerationError(ValueError):
    """A synthetic-traffic template cannot be realized under the given bounds."""


class CoverageError(KeyError):
    """A label set does not cover every clustered scenario id."""
