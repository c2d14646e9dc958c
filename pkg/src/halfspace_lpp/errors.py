"""Exception types shared across the package."""

from __future__ import annotations


class NoPathError(RuntimeError):
    """No admissible up-right path exists between the requested endpoints."""


class CapacityError(RuntimeError):
    """A requested table exceeds the configured memory budget."""


class InvariantViolation(RuntimeError):
    """A pathwise theorem-backed check failed.

    These checks hold deterministically under the coupling, so raising (or a
    nonzero violation count) indicates a bug, not statistical noise.  The CLI
    maps this to exit code 2.
    """


class RefinementError(RuntimeError):
    """Quadrature refinement failed to converge to the requested tolerance."""
