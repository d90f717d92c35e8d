"""Shared exception types.

``InputError`` marks problems with user-supplied files or arguments; the CLI
maps it to exit code 1, everything else to exit code 2.
"""


class InputError(ValueError):
    """Bad input data or configuration (user-correctable)."""


class TrainingDivergedError(RuntimeError):
    """NaN encountered during solver iterations."""
