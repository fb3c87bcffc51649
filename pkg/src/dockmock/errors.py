"""Exception types raised by dockmock.

Faults in the analyzed Dockerfile are *not* exceptions; they are reported as
:class:`dockmock.faults.MockWarning` values. The classes here signal that an
input could not be processed at all.
"""

from __future__ import annotations


class DockmockError(Exception):
    """Base class for every error raised by this package."""


class SyntaxFault(DockmockError):
    """A Dockerfile or embedded shell script could not be parsed."""

    def __init__(self, reason: str, line: int = 0) -> None:
        super().__init__(f"line {line}: {reason}" if line else reason)
        self.reason = reason
        self.line = line


class ConflictFault(DockmockError):
    """A file tree operation contradicts precisely known state."""

    def __init__(self, reason: str, path: str = "") -> None:
        super().__init__(f"{path}: {reason}" if path else reason)
        self.reason = reason
        self.path = path


class IOFault(DockmockError):
    """The workspace directory could not be read."""


class StoreFault(DockmockError):
    """The prior-context store is unreadable or malformed."""


class RuntimeFault(DockmockError):
    """The container runtime is missing or failed while capturing a snapshot."""


class ManifestFault(DockmockError):
    """A corpus manifest entry is unreadable or references missing paths."""
