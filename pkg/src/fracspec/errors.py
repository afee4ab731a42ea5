from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the supported parameter range."""


class NumericError(ArithmeticError):
    """A numerical procedure broke down or failed to converge.

    ``best`` carries the best available estimate when there is one.
    """

    def __init__(self, message: str, best=None) -> None:
        super().__init__(message)
        self.best = best
