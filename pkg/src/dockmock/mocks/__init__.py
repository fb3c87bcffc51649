"""Mock registry and the mocks shipped with dockmock.

Importing this package registers every built-in shell command mock in
:data:`COMMANDS`.
"""

from __future__ import annotations

from dockmock.mocks import commands, packages  # noqa: F401  (registration)
from dockmock.mocks.base import (
    COMMANDS,
    Integrity,
    Invocation,
    MockRegistry,
    MockSpec,
    Outcome,
    apply_fuzz_scope,
    fuzzy_everything,
)
from dockmock.mocks.dispatch import dispatch_argv, dispatch_command, run_program
from dockmock.mocks.instructions import BuildState, mock_instruction
from dockmock.mocks.versions import mock_version_check

__all__ = [
    "BuildState",
    "COMMANDS",
    "Integrity",
    "Invocation",
    "MockRegistry",
    "MockSpec",
    "Outcome",
    "apply_fuzz_scope",
    "dispatch_argv",
    "dispatch_command",
    "fuzzy_everything",
    "mock_instruction",
    "mock_version_check",
    "run_program",
]
