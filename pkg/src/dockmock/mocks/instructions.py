"""Mocks for Dockerfile instructions.

Each mock takes an :class:`Instruction` and a :class:`Context` and returns
``(MockResult, Context)`` with warnings stamped on the instruction's first
line. Shell payloads of ``RUN`` are handed to :mod:`dockmock.mocks.dispatch`.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from dockmock.context import (
    Context,
    ExecutableList,
    Lookup,
    VariableMap,
    basename,
    copy_between_trees,
    directory,
    fresh_context,
    fuzz_all,
    fuzz_path,
    get_node,
    lookup_executable,
    normalize,
    put_node,
    regular,
)
from dockmock.dockerfile import Instruction, Keyword, split_env_args
from dockmock.errors import ConflictFault, SyntaxFault
from dockmock.faults import OK, FaultType, MockResult, Status, combine, conflict
from dockmock.mocks.base import COMMANDS, MockRegistry, Outcome, fuzzy_everything, glob_tree
from dockmock.mocks.dispatch import dispatch_argv, run_program
from dockmock.mocks.versions import MANAGERS, mock_version_check
from dockmock.priors import PriorStore
from dockmock.shell import ExpandedValue, expand_word, parse_shell, parse_word

log = logging.getLogger(__name__)

POSIX_SHELLS = frozenset(["sh", "bash", "dash", "ash", "zsh", "ksh", "mksh", "busybox"])
_ARCHIVE = re.compile(r"\.(tar|tar\.gz|tgz|tar\.bz2|tbz2?|tar\.xz|txz|tar\.zst)$")
_URL = re.compile(r"^(https?|ftp)://|^git@")


@dataclass
class BuildState:
    """What the engine shares with instruction mocks across a build."""

    prior_store: PriorStore = field(default_factory=PriorStore)
    #: ARGs declared before the first FROM
    global_args: VariableMap = field(default_factory=VariableMap)
    #: completed stages, in order, with their alias (lower-cased) if any
    stages: list[tuple[str | None, Context]] = field(default_factory=list)
    registry: MockRegistry = COMMANDS

    def stage(self, ref: str) -> Context | None:
        key = ref.lower()
        for name, ctx in self.stages:
            if name == key:
                return ctx
        if ref.isdigit() and int(ref) < len(self.stages):
            return self.stages[int(ref)][1]
        return None


def _stamp(result: MockResult, line: int) -> MockResult:
    if not result.warnings:
        return result
    return MockResult(result.status, tuple(w.at_line(line) for w in result.warnings),
                      result.exit_fuzzy, result.halted)


def expand_arg(text: str, vars: VariableMap, raw: bool = False) -> ExpandedValue:
    """Dockerfile variable substitution plus quote removal on one argument."""
    if raw and "$" not in text:
        return ExpandedValue(text)
    try:
        word = parse_word(text)
    except SyntaxFault:
        return ExpandedValue(text)
    value = expand_word(word, vars)
    return value


# -- FROM ----------------------------------------------------------------------

def mock_from(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    if not instr.args:
        return conflict(FaultType.SYNTAX_MISTAKE, "FROM", "FROM requires a base image"), ctx
    ref = expand_arg(instr.args[0], state.global_args)
    base = dict(workspace=ctx.workspace, assume=ctx.assume, autofix=ctx.autofix)
    unknown = fuzz_all(fresh_context(ctx.workspace).evolve(assume=ctx.assume, autofix=ctx.autofix))
    if ref.fuzzy or not ref.text:
        log.debug("base image %r depends on unknown build args", instr.args[0])
        return MockResult(Status.FUZZY, exit_fuzzy=True), unknown

    image = ref.text
    inherited = state.stage(image) if not image.isdigit() else None
    results: list[MockResult] = []
    if inherited is not None:
        new = inherited.evolve(workdir=inherited.workdir, workspace=ctx.workspace)
        results.append(OK)
    elif image == "scratch":
        new = Context(vars=VariableMap.precise({}), executables=ExecutableList(), image=image,
                      shell=("/bin/sh", "-c"), **base)
        results.append(OK)
    else:
        snap = state.prior_store.get(image)
        if snap is not None:
            new = Context(
                vars=VariableMap.precise(snap.env),
                container=directory(fuzzy=True),
                container_fuzzy=True,
                executables=ExecutableList(frozenset(snap.executables)),
                workdir=snap.workdir,
                user=snap.user,
                image=image,
                **base,
            )
            results.append(OK)
        else:
            log.debug("no prior context for %s", image)
            new = unknown.evolve(image=image)
            results.append(MockResult(Status.FUZZY, exit_fuzzy=True))
    for manager in MANAGERS:
        results.append(mock_version_check(manager, new, in_workspace=True))
    return _stamp(combine(results), instr.line_start), new


# -- COPY / ADD ------------------------------------------------------------------

def _place_fuzzy(o: Outcome, path: str, dir_like: bool) -> None:
    ctx = o.ctx
    node = get_node(ctx.container, path)
    try:
        if node is not None and node.is_dir:
            tree = fuzz_path(ctx.container, path)
        elif dir_like:
            tree = put_node(ctx.container, path, directory(fuzzy=True))
        else:
            tree = put_node(ctx.container, path, regular(fuzzy=True, mode=None))
    except ConflictFault:
        return
    o.ctx = ctx.evolve(container=tree)


def mock_copy_add(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    o = Outcome(ctx)
    kw = instr.keyword.value
    words = [expand_arg(a, ctx.vars, raw=instr.exec_form) for a in instr.args]
    if len(words) < 2:
        o.conflict(FaultType.SYNTAX_MISTAKE, kw, f"{kw} requires at least two arguments")
        return _finish(o, instr)
    *sources, dest = words
    dest_text = dest.text
    dir_like = dest_text.endswith("/") or dest_text in (".", "./") or dest_text.endswith("/.")
    dst_path = normalize(dest_text, ctx.workdir)
    dest_fuzzy = dest.fuzzy or (not dest_text.startswith("/") and ctx.workdir_fuzzy)
    if dest_fuzzy and "from" in instr.flags:
        o.consumed_fuzzy()
        _place_fuzzy(o, dst_path, True)
        return _finish(o, instr)

    if "from" in instr.flags:
        return _copy_from_stage(instr, o, state, dst_path, dir_like)

    # resolve sources in the build context
    resolved: list[tuple[ExpandedValue, list[str]]] = []
    remote = False
    for src in sources:
        if src.fuzzy:
            o.consumed_fuzzy()
            resolved.append((src, []))
            continue
        if instr.keyword is Keyword.ADD and _URL.match(src.text):
            remote = True
            resolved.append((src, []))
            continue
        if src.pattern is not None:
            matches, _ = glob_tree(ctx.workspace, src.pattern, "/")
            paths = [normalize(m, "/") for m in matches]
        else:
            path = normalize(src.text, "/")
            paths = [path] if get_node(ctx.workspace, path) is not None else []
        resolved.append((src, paths))

    if dest_fuzzy:
        # the build context is always precise, whatever the destination
        o.consumed_fuzzy()
        for src, paths in resolved:
            if not src.fuzzy and not paths and not (instr.keyword is Keyword.ADD and _URL.match(src.text)):
                o.conflict(FaultType.OUTER_FILE_NOT_FOUND, src.text,
                           f"{src.text} does not exist in the build context")
        _place_fuzzy(o, dst_path, True)
        return _finish(o, instr)

    n_sources = sum(max(1, len(p)) for _, p in resolved)
    if n_sources > 1 and not dir_like:
        node = get_node(ctx.container, dst_path)
        if node is None or not node.is_dir:
            o.conflict(FaultType.INSTRUCTION_MISUSE, dest_text,
                       f"{kw} with more than one source needs a destination directory ending with /")
            if not ctx.autofix:
                return _finish(o, instr)
            dir_like = True

    for src, paths in resolved:
        if src.fuzzy or (instr.keyword is Keyword.ADD and _URL.match(src.text)):
            _place_fuzzy(o, _target(dst_path, src.text, dir_like), dir_like and not src.fuzzy)
            continue
        if not paths:
            o.conflict(FaultType.OUTER_FILE_NOT_FOUND, src.text,
                       f"{src.text} does not exist in the build context")
            if ctx.autofix:
                _place_fuzzy(o, _target(dst_path, src.text, dir_like), False)
            continue
        for path in paths:
            node = get_node(ctx.workspace, path)
            if instr.keyword is Keyword.ADD and not node.is_dir and _ARCHIVE.search(path):
                # local archives are unpacked; their content is not inspected
                _place_fuzzy(o, dst_path, True)
                continue
            try:
                tree = copy_between_trees(ctx.workspace, path, o.ctx.container, dst_path, dir_like)
            except ConflictFault as exc:
                o.conflict(FaultType.INSTRUCTION_MISUSE, exc.path or dest_text,
                           f"{kw} cannot place {src.text} at {dest_text}: {exc.reason}")
                continue
            o.ctx = o.ctx.evolve(container=tree)
    if remote:
        o.unknown_exit()
    return _finish(o, instr)


def _target(dst_path: str, src_text: str, dir_like: bool) -> str:
    if not dir_like:
        return dst_path
    name = basename(normalize(src_text, "/"))
    return normalize(name, dst_path) if name else dst_path


def _copy_from_stage(instr: Instruction, o: Outcome, state: BuildState,
                     dst_path: str, dir_like: bool) -> tuple[MockResult, Context]:
    ref = expand_arg(instr.flags["from"], o.ctx.vars)
    if ref.fuzzy:
        o.consumed_fuzzy()
    elif state.stage(ref.text) is None and not _looks_like_image(ref.text):
        o.conflict(FaultType.INSTRUCTION_MISUSE, ref.text,
                   f"--from={ref.text} names no earlier build stage")
        if o.autofix:
            o.ctx = fuzz_all(o.ctx)
        return _finish(o, instr)
    many = len(instr.args) > 2
    if many:
        dir_like = True
    if dir_like:
        for src in instr.args[:-1]:
            _place_fuzzy(o, _target(dst_path, expand_arg(src, o.ctx.vars).text, True), False)
        _place_fuzzy(o, dst_path, True)
    else:
        _place_fuzzy(o, dst_path, False)
    return _finish(o, instr)


def _looks_like_image(ref: str) -> bool:
    return any(c in ref for c in ":/@")


def _finish(o: Outcome, instr: Instruction) -> tuple[MockResult, Context]:
    result, ctx = o.finish()
    if result.conflict and o.autofix is False:
        ctx = o.start
    return _stamp(result, instr.line_start), ctx


# -- WORKDIR -------------------------------------------------------------------

def mock_workdir(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    value = expand_arg(instr.text.strip() or instr.args[0], ctx.vars)
    path = normalize(value.text, ctx.workdir)
    fuzzy = value.fuzzy or (not value.text.startswith("/") and ctx.workdir_fuzzy)
    o = Outcome(ctx)
    if fuzzy:
        o.consumed_fuzzy()
        o.ctx = ctx.evolve(workdir=path, workdir_fuzzy=True)
        _place_fuzzy(o, path, True)
        return _finish(o, instr)
    st = ctx.stat_container(path)
    if st.found and st.is_dir:
        o.ctx = ctx.evolve(workdir=path, workdir_fuzzy=False)
        return _finish(o, instr)
    if st.found and not st.fuzzy:
        o.conflict(FaultType.INSTRUCTION_MISUSE, value.text,
                   f"WORKDIR {value.text} is a regular file, not a directory")
        o.ctx = fuzz_all(ctx).evolve(workdir=path)
        return _finish(o, instr)
    if st.found or not st.absent_precise:
        # a fuzzy file or an untracked path; with the assumption on, take
        # what was read at face value: nothing is there, so the directory is
        # new and empty
        o.consumed_fuzzy()
    try:
        tree = put_node(ctx.container, path, directory(fuzzy=st.found))
    except ConflictFault as exc:
        o.conflict(FaultType.INSTRUCTION_MISUSE, value.text,
                   f"WORKDIR {value.text}: {exc.path} is not a directory")
        o.ctx = fuzz_all(ctx).evolve(workdir=path)
        return _finish(o, instr)
    o.ctx = ctx.evolve(container=tree, workdir=path, workdir_fuzzy=False)
    return _finish(o, instr)


# -- ENV / ARG -----------------------------------------------------------------

def mock_env(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    try:
        pairs = split_env_args(instr)
    except SyntaxFault as exc:
        return _stamp(conflict(FaultType.SYNTAX_MISTAKE, instr.keyword.value, exc.reason),
                      instr.line_start), ctx
    before = ctx.vars
    vars_ = ctx.vars
    for name, raw in pairs:
        if raw is None:
            # ARG without a default: the global default or a --build-arg may apply
            value, precise = state.global_args.lookup(name)
            if name in state.global_args.entries and precise:
                vars_ = vars_.set(name, value or "")
            elif precise and name in before.precise_names:
                continue
            else:
                vars_ = vars_.set(name, "", precise=False)
            continue
        value = expand_arg(raw, before)
        vars_ = vars_.set(name, value.text, precise=not value.fuzzy)
    return OK, ctx.evolve(vars=vars_)


def global_arg(instr: Instruction, args: VariableMap) -> VariableMap:
    """Record an ``ARG`` that precedes the first ``FROM``."""
    try:
        pairs = split_env_args(instr)
    except SyntaxFault:
        return args
    for name, raw in pairs:
        if raw is None:
            args = args.set(name, "", precise=False)
        else:
            value = expand_arg(raw, args)
            args = args.set(name, value.text, precise=not value.fuzzy)
    return args


# -- RUN -----------------------------------------------------------------------

def shell_lookup(ctx: Context) -> Lookup:
    """Is the configured shell present in the container?"""
    prog = ctx.shell[0] if ctx.shell else "/bin/sh"
    name = basename(prog)
    if name in ctx.executables:
        return Lookup.FOUND
    found = lookup_executable(prog, ctx)
    if found is Lookup.FUZZY and not ctx.executables.fuzzy:
        # a snapshot enumerates PATH completely
        return Lookup.NOT_FOUND
    return found


def mock_run(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    before = ctx
    if instr.exec_form:
        if not instr.args:
            return _stamp(conflict(FaultType.INSTRUCTION_MISUSE, "RUN", "RUN with an empty command"),
                          instr.line_start), ctx
        result, after = dispatch_argv([ExpandedValue(a) for a in instr.args], ctx, state.registry)
    else:
        shell = ctx.shell[0] if ctx.shell else "/bin/sh"
        found = shell_lookup(ctx)
        if found is Lookup.NOT_FOUND:
            result = conflict(FaultType.COMMAND_NOT_FOUND, shell,
                              f"{shell}: not found; shell-form RUN needs a shell in the image")
            after = fuzz_all(ctx) if ctx.autofix else ctx
            return _stamp(result, instr.line_start), after
        if basename(shell) not in POSIX_SHELLS:
            result, after = fuzzy_everything(ctx)
            return result, after
        try:
            program = parse_shell(instr.text)
        except SyntaxFault as exc:
            result = conflict(FaultType.SYNTAX_MISTAKE, "RUN", f"shell script does not parse: {exc.reason}")
            return _stamp(result, instr.line_start), fuzz_all(ctx) if ctx.autofix else ctx
        result, after = run_program(program, ctx, state.registry)
        if found is Lookup.FUZZY and result.ok:
            result = MockResult(Status.FUZZY, exit_fuzzy=True)
    # shell variables and cd do not outlive the RUN
    after = after.evolve(vars=before.vars, workdir=before.workdir, workdir_fuzzy=before.workdir_fuzzy)
    if result.halted:
        result = MockResult(Status.FUZZY, exit_fuzzy=True)
    return _stamp(result, instr.line_start), after


# -- the rest ------------------------------------------------------------------

def mock_user(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    value = expand_arg(instr.args[0], ctx.vars)
    return OK, ctx.evolve(user=value.text if not value.fuzzy else ctx.user)


def mock_shell(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    if not instr.exec_form or not instr.args:
        result = conflict(FaultType.INSTRUCTION_MISUSE, "SHELL", "SHELL requires a JSON array")
        return _stamp(result, instr.line_start), ctx
    return OK, ctx.evolve(shell=tuple(instr.args))


def mock_volume(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    tree = ctx.container
    for arg in instr.args:
        value = expand_arg(arg, ctx.vars, raw=instr.exec_form)
        if value.fuzzy:
            continue
        path = normalize(value.text, ctx.workdir)
        if get_node(tree, path) is None:
            try:
                tree = put_node(tree, path, directory(fuzzy=ctx.stat_container(path).presence.value == "absent-fuzzy"))
            except ConflictFault:
                pass
    return OK, ctx.evolve(container=tree)


def mock_onbuild(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    # triggers run in a downstream build, not this one
    return MockResult(Status.FUZZY, exit_fuzzy=True), ctx


def mock_unknown(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    result = conflict(FaultType.SYNTAX_MISTAKE, instr.raw_keyword,
                      f"unknown instruction: {instr.raw_keyword}")
    return _stamp(result, instr.line_start), fuzz_all(ctx)


def mock_noop(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    return OK, ctx


INSTRUCTION_MOCKS = {
    Keyword.FROM: mock_from,
    Keyword.COPY: mock_copy_add,
    Keyword.ADD: mock_copy_add,
    Keyword.WORKDIR: mock_workdir,
    Keyword.ENV: mock_env,
    Keyword.ARG: mock_env,
    Keyword.RUN: mock_run,
    Keyword.USER: mock_user,
    Keyword.SHELL: mock_shell,
    Keyword.VOLUME: mock_volume,
    Keyword.ONBUILD: mock_onbuild,
    Keyword.UNKNOWN: mock_unknown,
}


def mock_instruction(instr: Instruction, ctx: Context, state: BuildState) -> tuple[MockResult, Context]:
    """Dispatch ``instr`` to its mock; keywords without effects are no-ops."""
    return INSTRUCTION_MOCKS.get(instr.keyword, mock_noop)(instr, ctx, state)
