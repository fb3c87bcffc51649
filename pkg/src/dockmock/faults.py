"""Fault taxonomy, warnings and mock outcomes."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class FaultType(enum.Enum):
    SYNTAX_MISTAKE = "syntax-mistake"
    INSTRUCTION_MISUSE = "instruction-misuse"
    COMMAND_MISUSE = "command-misuse"
    COMMAND_NOT_FOUND = "command-not-found"
    OUTER_FILE_NOT_FOUND = "outer-file-not-found"
    INNER_FILE_NOT_FOUND = "inner-file-not-found"
    IMAGE_NOT_FOUND = "image-not-found"
    IMAGE_VERSION_MISMATCH = "image-version-mismatch"
    PERMISSION_DENIED = "permission-denied"
    REQUIRE_MANUAL_INPUT = "require-manual-input"

    @property
    def code(self) -> str:
        return self.value

    @property
    def title(self) -> str:
        """Human name, e.g. ``Outer-File-Not-Found``."""
        return "-".join(part.capitalize() for part in self.value.split("-"))

    @classmethod
    def parse(cls, text: str) -> FaultType:
        """Accept a code (``outer-file-not-found``), an enum name
        (``OUTER_FILE_NOT_FOUND``) or a CamelCase name (``OuterFileNotFound``)."""
        key = text.strip()
        for member in cls:
            if key in (member.value, member.name, member.title):
                return member
            if key.replace("-", "").replace("_", "").lower() == member.name.replace("_", "").lower():
                return member
        raise ValueError(f"unknown fault type: {text!r}")


class Severity(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


# Heuristic detections with a known false-positive risk are downgraded.
DEFAULT_SEVERITY: dict[FaultType, Severity] = {
    ft: Severity.ERROR for ft in FaultType
}
DEFAULT_SEVERITY[FaultType.IMAGE_VERSION_MISMATCH] = Severity.WARNING
DEFAULT_SEVERITY[FaultType.REQUIRE_MANUAL_INPUT] = Severity.WARNING


@dataclass(frozen=True)
class MockWarning:
    """A detected fault."""

    fault_type: FaultType
    line: int
    subject: str
    message: str
    severity: Severity | None = None

    def __post_init__(self) -> None:
        if self.severity is None:
            object.__setattr__(self, "severity", DEFAULT_SEVERITY[self.fault_type])

    def at_line(self, line: int) -> MockWarning:
        return MockWarning(self.fault_type, line, self.subject, self.message, self.severity)

    @property
    def key(self) -> tuple[FaultType, int, str]:
        return (self.fault_type, self.line, self.subject)


class Status(enum.Enum):
    PRECISE_OK = "precise-ok"
    CONFLICT = "conflict"
    FUZZY = "fuzzy"


@dataclass(frozen=True)
class MockResult:
    status: Status
    warnings: tuple[MockWarning, ...] = field(default=())
    exit_fuzzy: bool = False
    #: fuzzy context was consumed with the assumption disabled; the rest of
    #: the and-or list must not run
    halted: bool = False

    def __post_init__(self) -> None:
        if self.status is Status.FUZZY and self.warnings:
            raise ValueError("a fuzzy result cannot carry warnings")
        if self.status is Status.CONFLICT and not self.warnings:
            raise ValueError("a conflict needs at least one warning")

    @property
    def ok(self) -> bool:
        return self.status is Status.PRECISE_OK

    @property
    def conflict(self) -> bool:
        return self.status is Status.CONFLICT

    @property
    def fuzzy(self) -> bool:
        return self.status is Status.FUZZY


OK = MockResult(Status.PRECISE_OK)
FUZZY = MockResult(Status.FUZZY, exit_fuzzy=True)


def conflict(fault_type: FaultType, subject: str, message: str, line: int = 0) -> MockResult:
    return MockResult(Status.CONFLICT, (MockWarning(fault_type, line, subject, message),))


def combine(results: list[MockResult]) -> MockResult:
    """Aggregate per-command results: any conflict wins, then any fuzzy."""
    warnings = tuple(w for r in results for w in r.warnings)
    if warnings:
        return MockResult(Status.CONFLICT, warnings)
    if any(r.status is Status.FUZZY for r in results):
        return MockResult(Status.FUZZY, exit_fuzzy=True, halted=any(r.halted for r in results))
    return OK
