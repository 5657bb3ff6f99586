"""Exception types shared across the package."""

from __future__ import annotations


class AssumptionError(Exception):
    """A model-level non-degeneracy assumption is violated.

    Raised by constructors that are only defined away from degenerate
    parameter sets (resonance conditions on tau, vanishing spectral weight).
    ``assumption`` names the violated condition so front ends can surface it.
    """

    def __init__(self, assumption: str, message: str | None = None):
        self.assumption = assumption
        super().__init__(message or f"assumption violated: {assumption}")


class NumericalCheckError(Exception):
    """An internal numerical invariant (trace preservation, positivity,
    contraction) failed beyond tolerance."""
