"""Exception hierarchy."""
from typing import Optional


class LatticeSearchError(Exception):
    """Base class for simulator errors."""


class ConfigError(LatticeSearchError):
    """Invalid or unknown configuration key."""

    def __init__(self, key: str, message: str, line: Optional[int] = None):
        self.key = key
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{key}{where}: {message}")


class UsageError(LatticeSearchError):
    """An operation was called outside its preconditions."""


class CapExhaustedError(LatticeSearchError):
    """A walk ran out of its step budget without detecting the target."""

    def __init__(self, steps: int):
        self.steps = steps
        super().__init__(f"target not detected within {steps} steps")
