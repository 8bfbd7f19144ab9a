"""Shared error base for the whole package.

Every domain error carries a stable machine-readable ``code`` so the CLI and
the HTTP layer can map it without string matching.
"""


class ModelGateError(Exception):
    """Base class for all domain errors raised by modelgate."""

    code: str = "error"
