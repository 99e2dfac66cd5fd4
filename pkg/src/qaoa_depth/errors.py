"""Exceptions raised by qaoa_depth.

Plain argument problems (bad bounds, wrong lengths) raise ``ValueError``.
"""


class CapacityError(ValueError):
    """Qubit count above the dense-simulation cap."""


class ParseError(ValueError):
    def __init__(self, message, line):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class ConsistencyError(RuntimeError):
    """A computed quantity contradicts an exact bound (e.g. energy below the ground energy)."""


class FitError(RuntimeError):
    """Least-squares fit failed; ``best`` holds the best iterate reached."""

    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)
