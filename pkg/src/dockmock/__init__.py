"""dockmock: find Dockerfile faults before running ``docker build``.

The analyzer mock-executes each instruction, and the shell commands inside
``RUN``, against an approximate model of the build. It reports a fault only
where the Dockerfile contradicts state it knows precisely.
"""

from __future__ import annotations

from dockmock.context import Context, FileNode, scan_workspace, tree_from_paths
from dockmock.dockerfile import DockerfileAst, Instruction, Keyword, parse_dockerfile
from dockmock.engine import AnalysisReport, analyze, analyze_multi_stage, check_source
from dockmock.errors import (
    ConflictFault,
    DockmockError,
    IOFault,
    ManifestFault,
    RuntimeFault,
    StoreFault,
    SyntaxFault,
)
from dockmock.faults import FaultType, MockResult, MockWarning, Severity, Status
from dockmock.priors import ImageSnapshot, PriorStore, load_snapshot
from dockmock.shell import parse_shell

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "ConflictFault",
    "Context",
    "DockerfileAst",
    "DockmockError",
    "FaultType",
    "FileNode",
    "IOFault",
    "ImageSnapshot",
    "Instruction",
    "Keyword",
    "ManifestFault",
    "MockResult",
    "MockWarning",
    "PriorStore",
    "RuntimeFault",
    "Severity",
    "Status",
    "StoreFault",
    "SyntaxFault",
    "analyze",
    "analyze_multi_stage",
    "check_source",
    "load_snapshot",
    "parse_dockerfile",
    "parse_shell",
    "scan_workspace",
    "tree_from_paths",
]
