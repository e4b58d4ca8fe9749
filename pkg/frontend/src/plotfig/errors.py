class SpecError(ValueError):
    """The figure spec is malformed or references missing inputs."""


class SchemaError(SpecError):
    """An input CSV does not match the expected schema."""
