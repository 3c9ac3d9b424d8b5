"""Shared exception types with a stable mapping onto CLI exit codes."""

__all__ = [
    "ParityKSError",
    "InputError",
    "InvariantError",
    "BudgetError",
    "CapError",
    "PhaseError",
]


class ParityKSError(Exception):
    """Base class for all package-specific failures."""


class InputError(ParityKSError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


class InvariantError(ParityKSError):
    """An internal consistency check failed (CLI exit code 1)."""


class BudgetError(ParityKSError):
    """A configured time or memory budget was exceeded (CLI exit code 3)."""


class CapError(BudgetError):
    """An enumeration guard refused to start a job that is too large."""


class PhaseError(ParityKSError):
    """A Pauli product picked up a +/-i phase and is not a signed Pauli."""
