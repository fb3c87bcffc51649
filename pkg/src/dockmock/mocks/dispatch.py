"""Shell-level evaluation: from a parsed script to per-command mocks."""

from __future__ import annotations

import logging

from dockmock.context import (
    Context,
    Lookup,
    fuzz_all,
    get_node,
    join_contexts,
    lookup_executable,
    put_node,
    regular,
)
from dockmock.errors import ConflictFault
from dockmock.faults import FaultType, MockResult, MockWarning, Status, combine
from dockmock.mocks.base import (
    COMMANDS,
    Invocation,
    MockRegistry,
    Outcome,
    apply_fuzz_scope,
    expand_globs,
    fuzzy_everything,
    is_special_device,
    resolve,
)
from dockmock.shell import (
    CommandList,
    ExpandedValue,
    OpaqueNode,
    Pipeline,
    Redirect,
    ShellProgram,
    SimpleCommand,
    Subshell,
    expand_fields,
    expand_word,
)

log = logging.getLogger(__name__)

_FUZZY_HALT = MockResult(Status.FUZZY, exit_fuzzy=True, halted=True)
# `node -v`, `go version`: asking a tool about itself changes nothing
QUERY_ARGS = frozenset(["-v", "-V", "--version", "version", "-h", "--help", "help"])


def _is_query(argv: list[ExpandedValue]) -> bool:
    return len(argv) > 1 and all(not a.fuzzy and a.text in QUERY_ARGS for a in argv[1:])


def _expand_argv(cmd: SimpleCommand, ctx: Context) -> list[ExpandedValue]:
    home = ctx.home()
    argv: list[ExpandedValue] = []
    for w in cmd.words:
        argv.extend(expand_fields(w, ctx.vars, home))
    return expand_globs(argv, ctx)


def dispatch_command(cmd: SimpleCommand, ctx: Context, registry: MockRegistry = COMMANDS):
    """Mock one simple command: assignments, redirects, then the command."""
    home = ctx.home()
    assigned = ctx.vars
    assign_fuzzy = False
    for name, word in cmd.assignments:
        value = expand_word(word, ctx.vars, home)
        assign_fuzzy |= value.fuzzy
        assigned = assigned.set(name, value.text, precise=not value.fuzzy)

    argv = _expand_argv(cmd, ctx)
    redirect_result, ctx = _apply_redirects(cmd.redirects, ctx)
    if redirect_result.conflict and not ctx.autofix:
        # the shell does not run a command whose redirection failed
        return redirect_result, ctx

    if not argv:
        # bare assignments persist in the current shell
        result = combine([redirect_result] + ([MockResult(Status.FUZZY, exit_fuzzy=True)] if assign_fuzzy else []))
        return result, ctx.evolve(vars=assigned)

    if cmd.assignments:
        outer_vars = ctx.vars
        result, after = dispatch_argv(argv, ctx.evolve(vars=assigned), registry)
        after = after.evolve(vars=outer_vars) if after.vars == assigned else after
        return combine([redirect_result, result]) if not result.fuzzy else _fuzzy_merge(redirect_result, result), after
    result, after = dispatch_argv(argv, ctx, registry)
    if result.fuzzy:
        return _fuzzy_merge(redirect_result, result), after
    return combine([redirect_result, result]), after


def _fuzzy_merge(first: MockResult, fuzzy: MockResult) -> MockResult:
    if first.conflict:
        return first
    return fuzzy


def dispatch_argv(argv: list[ExpandedValue], ctx: Context, registry: MockRegistry = COMMANDS):
    """Look the command up, then run its mock (or fuzz everything)."""
    head = argv[0]
    if head.fuzzy and not head.text:
        return fuzzy_everything(ctx)
    name = head.text
    found = lookup_executable(head, ctx)
    warnings: list[MockWarning] = []
    fuzzy_lookup = False
    if found is Lookup.NOT_FOUND:
        warnings.append(MockWarning(FaultType.COMMAND_NOT_FOUND, 0, name, f"{name}: command not found"))
        if not ctx.autofix:
            return MockResult(Status.CONFLICT, tuple(warnings)), ctx
        # the fix installs the command; keep analysing what it does
        ctx = ctx.evolve(executables=ctx.executables.add(name))
    elif found is Lookup.FUZZY:
        fuzzy_lookup = True
        if not ctx.assume:
            return _FUZZY_HALT, fuzz_all(ctx)
    spec = registry.get(name)
    if spec is None:
        log.debug("no mock for %s; fuzzing the whole context", name)
        result, after = fuzzy_everything(ctx)
    else:
        result, after = spec.handler(Invocation(tuple(argv)), ctx)
        if spec.fuzz_scope and (not result.conflict or after.autofix) and not _is_query(argv):
            after = apply_fuzz_scope(after, spec.fuzz_scope)
    if warnings:
        return MockResult(Status.CONFLICT, tuple(warnings) + result.warnings), after
    if fuzzy_lookup and result.ok:
        result = MockResult(Status.FUZZY, exit_fuzzy=True)
    return result, after


# -- redirects ---------------------------------------------------------------------

def _apply_redirects(redirects: list[Redirect], ctx: Context):
    results: list[MockResult] = []
    for r in redirects:
        if r.op in ("<<", "<<-", "<&"):
            continue
        if r.op == ">&" and (r.target.source.isdigit() or r.target.source == "-"):
            continue
        target = expand_word(r.target, ctx.vars, ctx.home())
        o = Outcome(ctx)
        path, fuzzy = resolve(ctx, target)
        if fuzzy:
            o.consumed_fuzzy()
            if r.op != "<" and get_node(ctx.container, path) is None:
                try:
                    o.ctx = ctx.evolve(container=put_node(ctx.container, path, regular(fuzzy=True, mode=None)))
                except ConflictFault:
                    pass
        elif is_special_device(path):
            pass
        elif r.op == "<":
            st = ctx.stat_container(path)
            if st.absent_precise:
                o.conflict(FaultType.INNER_FILE_NOT_FOUND, target.text,
                           f"cannot open {target.text}: No such file")
                if ctx.autofix:
                    _create(o, path)
            elif not st.found:
                o.consumed_fuzzy()
        else:
            st = ctx.stat_container(path)
            if st.found and st.is_dir:
                if st.fuzzy:
                    o.consumed_fuzzy()
                else:
                    o.conflict(FaultType.COMMAND_MISUSE, target.text, f"cannot create {target.text}: Is a directory")
            elif not st.found:
                parent = ctx.stat_container(path.rsplit("/", 1)[0] or "/")
                if parent.found and parent.is_dir:
                    o.ctx = _with_file(ctx, path, st.presence.value == "absent-fuzzy")
                elif parent.absent_precise or parent.precise_regular:
                    o.conflict(FaultType.INNER_FILE_NOT_FOUND, target.text,
                               f"cannot create {target.text}: Directory nonexistent")
                    if ctx.autofix:
                        _create(o, path)
                else:
                    o.consumed_fuzzy()
                    _create(o, path)
        result, ctx = o.finish()
        results.append(result)
    return combine(results), ctx


def _with_file(ctx: Context, path: str, fuzzy: bool) -> Context:
    return ctx.evolve(container=put_node(ctx.container, path, regular(fuzzy=fuzzy)))


def _create(o: Outcome, path: str) -> None:
    try:
        o.ctx = o.ctx.evolve(container=put_node(o.ctx.container, path, regular(fuzzy=True, mode=None)))
    except ConflictFault:
        pass


# -- programs -----------------------------------------------------------------------

def run_program(program: ShellProgram, ctx: Context, registry: MockRegistry = COMMANDS):
    """Evaluate a parsed script. Returns the aggregated result and context."""
    if any(item.asynchronous for item in program.items):
        # background jobs race with everything after them
        return fuzzy_everything(ctx)
    results: list[MockResult] = []
    for item in program.items:
        result, ctx = _run_and_or(item, ctx, registry)
        results.append(result)
    return _aggregate(results), ctx


def _aggregate(results: list[MockResult]) -> MockResult:
    out = combine(results)
    if out.fuzzy:
        return MockResult(Status.FUZZY, exit_fuzzy=True, halted=out.halted)
    return out


def _run_and_or(item: CommandList, ctx: Context, registry: MockRegistry):
    results: list[MockResult] = []
    last: MockResult | None = None
    for k, pipe in enumerate(item.pipelines):
        # a failure here is handled when an `||` follows later in the list
        handled = "||" in item.operators[k:]
        op = item.operators[k - 1] if k else None
        if op == "||" and last is not None and last.ok:
            continue
        if op == "&&" and last is not None and last.conflict and not ctx.autofix:
            # the real command failed, so the `&&` part never runs
            continue
        maybe = op == "||" and last is not None and last.fuzzy
        result, after = _run_pipeline(pipe, ctx, registry)
        if maybe:
            after = join_contexts(ctx, after)
            result = MockResult(Status.FUZZY, exit_fuzzy=True, halted=result.halted)
        elif handled and result.conflict:
            # the build goes on through the `||` branch; nothing to report
            results.append(MockResult(Status.FUZZY, exit_fuzzy=True))
            ctx = after
            last = MockResult(Status.CONFLICT, result.warnings)
            continue
        ctx = after
        results.append(result)
        last = result
        if result.halted:
            break
    return _aggregate(results) if results else MockResult(Status.PRECISE_OK), ctx


def _run_pipeline(pipe: Pipeline, ctx: Context, registry: MockRegistry):
    if len(pipe.commands) == 1:
        result, ctx = _run_command(pipe.commands[0], ctx, registry)
    else:
        results = []
        for k, cmd in enumerate(pipe.commands):
            # every stage runs in a subshell; only the last one's status counts
            r, after = _run_command(cmd, ctx, registry)
            ctx = ctx.evolve(container=after.container, container_fuzzy=after.container_fuzzy,
                             executables=after.executables)
            if k < len(pipe.commands) - 1:
                r = MockResult(Status.FUZZY, exit_fuzzy=True) if not r.ok else r
            results.append(r)
            if r.halted:
                break
        last = results[-1]
        head_fuzzy = any(r.fuzzy for r in results[:-1])
        result = last if not (head_fuzzy and last.ok) else MockResult(Status.FUZZY, exit_fuzzy=True)
    if pipe.negated:
        return MockResult(Status.FUZZY, exit_fuzzy=True, halted=result.halted), ctx
    return result, ctx


def _run_command(cmd, ctx: Context, registry: MockRegistry):
    if isinstance(cmd, SimpleCommand):
        return dispatch_command(cmd, ctx, registry)
    if isinstance(cmd, Subshell):
        result, after = run_program(cmd.body, ctx, registry)
        redirect_result, after = _apply_redirects(cmd.redirects, after)
        after = after.evolve(vars=ctx.vars, workdir=ctx.workdir, workdir_fuzzy=ctx.workdir_fuzzy)
        if result.fuzzy:
            return _fuzzy_merge(redirect_result, result), after
        return combine([redirect_result, result]), after
    if isinstance(cmd, OpaqueNode):
        log.debug("unmodelled shell construct %s; fuzzing the whole context", cmd.kind)
        return fuzzy_everything(ctx)
    raise TypeError(f"unexpected command node {cmd!r}")
