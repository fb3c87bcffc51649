from __future__ import annotations

from pathlib import Path

import pytest

from dockmock.context import Context, ExecutableList, VariableMap, directory, tree_from_paths
from dockmock.context import DEFAULT_PATH, SHELL_BUILTINS
from dockmock.mocks import run_program
from dockmock.priors import PriorStore
from dockmock.shell import parse_shell

CORPUS = Path(__file__).parent / "corpus"

TOOLS = frozenset(
    "sh bash mkdir cp mv rm touch ln chmod chown cat ls echo printf test grep sed tar "
    "npm node pip python make apt-get curl git".split()
)


def precise_ctx(paths=(), *, workdir="/", autofix=True, assume=True, workspace=None,
                exes=TOOLS, env=None) -> Context:
    """A fully precise context whose container holds ``paths``."""
    vars = {"PATH": DEFAULT_PATH, "HOME": "/root"}
    vars.update(env or {})
    tree = tree_from_paths(paths)
    return Context(
        vars=VariableMap.precise(vars),
        container=tree,
        workspace=workspace if workspace is not None else directory(),
        executables=ExecutableList(frozenset(exes) | SHELL_BUILTINS),
        workdir=workdir,
        assume=assume,
        autofix=autofix,
    )


def run(script: str, ctx: Context):
    return run_program(parse_shell(script), ctx)


def codes(result) -> list[str]:
    return [w.fault_type.code for w in result.warnings]


@pytest.fixture(scope="session")
def corpus_store() -> PriorStore:
    return PriorStore.from_file(CORPUS / "priors.json")


# -- acceptance summary ------------------------------------------------------

_CRITERIA: list[tuple[str, bool, str]] = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    _CRITERIA.append((name, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
