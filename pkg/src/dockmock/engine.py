"""Analysis driver: walk the instructions, thread the context, keep warnings.

Every instruction is mocked in order. A fuzzy result contributes nothing; a
conflict contributes its warnings and the mock has already moved the context
to the repaired state, so one pass reports every fault it can see.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from dockmock.context import Context, FileNode, Lookup, fresh_context, lookup_executable
from dockmock.dockerfile import DockerfileAst, Instruction, Keyword, parse_dockerfile
from dockmock.errors import SyntaxFault
from dockmock.faults import FaultType, MockWarning, Status
from dockmock.mocks import COMMANDS, MockRegistry
from dockmock.mocks.instructions import (
    POSIX_SHELLS,
    BuildState,
    global_arg,
    mock_instruction,
    shell_lookup,
)
from dockmock.priors import EMPTY_STORE, PriorStore
from dockmock.shell import ShellProgram, SimpleCommand, Subshell, expand_fields, parse_shell

log = logging.getLogger(__name__)


@dataclass
class AnalysisReport:
    warnings: list[MockWarning] = field(default_factory=list)
    #: ``(line, status)`` for every instruction, in source order
    instruction_outcomes: list[tuple[int, Status]] = field(default_factory=list)
    context_final: Context | None = None

    @property
    def clean(self) -> bool:
        return not self.warnings


def _dedupe(warnings: list[MockWarning]) -> list[MockWarning]:
    seen: set = set()
    out = []
    for w in warnings:
        # a version mismatch shows up at FROM and again at `bundle`/`go`;
        # report it once, where the image is chosen
        key = (w.fault_type, w.subject) if w.fault_type is FaultType.IMAGE_VERSION_MISMATCH else w.key
        if key in seen:
            continue
        seen.add(key)
        out.append(w)
    return sorted(out, key=lambda w: w.line)


def analyze(ast: DockerfileAst, workspace: FileNode, prior_store: PriorStore | None = None, *,
            assume: bool = True, use_priors: bool = True, autofix: bool = True,
            registry: MockRegistry = COMMANDS) -> AnalysisReport:
    """Mock-execute ``ast`` against ``workspace`` and collect the faults."""
    store = prior_store if (prior_store is not None and use_priors) else EMPTY_STORE
    state = BuildState(prior_store=store, registry=registry)
    ctx = fresh_context(workspace, assume=assume).evolve(autofix=autofix)
    report = AnalysisReport()
    warnings: list[MockWarning] = []

    if not any(i.keyword is Keyword.FROM for i in ast.instructions):
        line = ast.instructions[0].line_start if ast.instructions else 1
        warnings.append(MockWarning(FaultType.SYNTAX_MISTAKE, line, "FROM",
                                    "no FROM instruction; a build needs a base image"))
        report.instruction_outcomes = [(i.line_start, Status.FUZZY) for i in ast.instructions]
        report.warnings = warnings
        report.context_final = ctx
        return report

    before_from = [(line, reason) for line, reason in ast.problems if "before the first FROM" in reason]
    if before_from:
        line, reason = before_from[0]
        warnings.append(MockWarning(FaultType.SYNTAX_MISTAKE, line, "FROM", reason))

    seen_from = False
    stage_name: str | None = None
    stage_instrs: list[Instruction] = []
    for instr in ast.instructions:
        if not seen_from and instr.keyword is not Keyword.FROM:
            if instr.keyword is Keyword.ARG:
                state.global_args = global_arg(instr, state.global_args)
                report.instruction_outcomes.append((instr.line_start, Status.PRECISE_OK))
            else:
                report.instruction_outcomes.append((instr.line_start, Status.FUZZY))
            continue
        if instr.keyword is Keyword.FROM:
            if seen_from:
                warnings.extend(_check_runtime_commands(stage_instrs, ctx))
                state.stages.append((stage_name, ctx))
            seen_from = True
            stage_name = instr.stage_name.lower() if instr.stage_name else None
            stage_instrs = []
        result, ctx = mock_instruction(instr, ctx, state)
        stage_instrs.append(instr)
        report.instruction_outcomes.append((instr.line_start, result.status))
        if result.conflict:
            warnings.extend(result.warnings)
        log.debug("line %d %s -> %s", instr.line_start, instr.keyword.value, result.status.value)
    warnings.extend(_check_runtime_commands(stage_instrs, ctx))

    report.warnings = _dedupe(warnings)
    report.context_final = ctx
    return report


def analyze_multi_stage(ast: DockerfileAst, workspace: FileNode,
                        prior_store: PriorStore | None = None, **kwargs) -> AnalysisReport:
    """Same as :func:`analyze`; stages are split at each ``FROM`` there."""
    return analyze(ast, workspace, prior_store, **kwargs)


def check_source(text: str | bytes, workspace: FileNode, prior_store: PriorStore | None = None,
                 **kwargs) -> AnalysisReport:
    """Parse and analyze; a parse failure becomes a one-warning report."""
    try:
        ast = parse_dockerfile(text)
    except SyntaxFault as exc:
        w = MockWarning(FaultType.SYNTAX_MISTAKE, exc.line or 1, "Dockerfile", exc.reason)
        return AnalysisReport([w], [], None)
    return analyze(ast, workspace, prior_store, **kwargs)


# -- CMD / ENTRYPOINT / HEALTHCHECK ------------------------------------------

def _runtime_instructions(instrs: list[Instruction]) -> list[Instruction]:
    last: dict[Keyword, Instruction] = {}
    for i in instrs:
        if i.keyword in (Keyword.CMD, Keyword.ENTRYPOINT, Keyword.HEALTHCHECK):
            last[i.keyword] = i
    if Keyword.ENTRYPOINT in last:
        # CMD only supplies arguments to the entrypoint
        last.pop(Keyword.CMD, None)
    return sorted(last.values(), key=lambda i: i.line_start)


def _check_runtime_commands(instrs: list[Instruction], ctx: Context) -> list[MockWarning]:
    out: list[MockWarning] = []
    for instr in _runtime_instructions(instrs):
        for name in _runtime_heads(instr, ctx):
            out.append(MockWarning(FaultType.COMMAND_NOT_FOUND, instr.line_start, name,
                                   f"{name}: command not found in the final image"))
    return out


def _runtime_heads(instr: Instruction, ctx: Context) -> list[str]:
    """Command names the instruction would start that are certainly missing."""
    args, exec_form, text = list(instr.args), instr.exec_form, instr.text
    if instr.keyword is Keyword.HEALTHCHECK:
        if not args or args[0].upper() != "CMD":
            return []
        text = text.strip()[3:].strip()
        args = args[1:]
        exec_form = text.startswith("[")
        if exec_form:
            try:
                args = json.loads(text)
            except ValueError:
                return []
    if exec_form:
        if not args:
            return []
        return [args[0]] if lookup_executable(args[0], ctx) is Lookup.NOT_FOUND else []
    shell = ctx.shell[0] if ctx.shell else "/bin/sh"
    if shell_lookup(ctx) is Lookup.NOT_FOUND:
        return [shell]
    if shell.rsplit("/", 1)[-1] not in POSIX_SHELLS:
        return []
    try:
        program = parse_shell(text)
    except SyntaxFault:
        return []
    missing = []
    for cmd in _simple_commands(program):
        if not cmd.words:
            continue
        fields = expand_fields(cmd.words[0], ctx.vars, ctx.home())
        if not fields or fields[0].fuzzy:
            continue
        head = fields[0]
        if head.text in ("exec", "command") and len(cmd.words) > 1:
            nxt = expand_fields(cmd.words[1], ctx.vars, ctx.home())
            if not nxt or nxt[0].fuzzy:
                continue
            head = nxt[0]
        if lookup_executable(head, ctx) is Lookup.NOT_FOUND:
            missing.append(head.text)
    return missing


def _simple_commands(program: ShellProgram):
    for item in program.items:
        for pipe in item.pipelines:
            for cmd in pipe.commands:
                if isinstance(cmd, SimpleCommand):
                    yield cmd
                elif isinstance(cmd, Subshell):
                    yield from _simple_commands(cmd.body)


__all__ = ["AnalysisReport", "analyze", "analyze_multi_stage", "check_source"]
