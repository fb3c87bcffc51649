"""Shared machinery for instruction and command mocks."""

from __future__ import annotations

import enum
import fnmatch
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from dockmock.context import (
    Context,
    FileNode,
    Presence,
    fuzz_all,
    fuzz_path,
    get_node,
    normalize,
    resolve_path,
    split_path,
)
from dockmock.faults import FaultType, MockResult, MockWarning, Status
from dockmock.shell import ExpandedValue


class Integrity(enum.Enum):
    COMPLETE = "complete"
    PARTIAL = "partial"


@dataclass(frozen=True)
class Invocation:
    """A command ready to be mocked: expanded argv plus the raw words."""

    argv: tuple[ExpandedValue, ...]

    @property
    def name(self) -> str:
        return self.argv[0].text if self.argv else ""

    @property
    def args(self) -> tuple[ExpandedValue, ...]:
        return self.argv[1:]

    @property
    def texts(self) -> list[str]:
        return [a.text for a in self.argv[1:]]


Handler = Callable[[Invocation, Context], "tuple[MockResult, Context]"]


@dataclass(frozen=True)
class MockSpec:
    name: str
    integrity: Integrity
    #: context slices a partial mock gives up on; see :func:`apply_fuzz_scope`
    fuzz_scope: tuple[str, ...]
    handler: Handler = field(compare=False)


class MockRegistry:
    """Name -> :class:`MockSpec` table. Populated at import time, read-only
    afterwards; build a new registry with :meth:`extended` to add mocks."""

    def __init__(self, specs: Iterable[MockSpec] = ()) -> None:
        self._specs: dict[str, MockSpec] = {s.name: s for s in specs}

    def register(self, *names: str, integrity: Integrity, fuzz_scope: tuple[str, ...] = ()):
        def deco(fn: Handler) -> Handler:
            for name in names:
                self._specs[name] = MockSpec(name, integrity, fuzz_scope, fn)
            return fn
        return deco

    def get(self, name: str) -> MockSpec | None:
        spec = self._specs.get(name)
        if spec is None and "/" in name:
            spec = self._specs.get(name.rsplit("/", 1)[-1])
        return spec

    def extended(self, *specs: MockSpec) -> MockRegistry:
        return MockRegistry([*self._specs.values(), *specs])

    def names(self) -> list[str]:
        return sorted(self._specs)

    def __contains__(self, name: object) -> bool:
        return name in self._specs

    def __iter__(self):
        return iter(self._specs.values())


COMMANDS = MockRegistry()


def apply_fuzz_scope(ctx: Context, scope: Iterable[str]) -> Context:
    """Fuzz the declared slices of ``ctx``.

    Slice names: ``all``, ``vars``, ``executables``, ``workdir`` (the current
    working directory subtree), ``path:/abs`` and ``cwd:rel``.
    """
    for item in scope:
        if item == "all":
            ctx = fuzz_all(ctx)
        elif item == "vars":
            ctx = ctx.evolve(vars=ctx.vars.fuzzed())
        elif item == "executables":
            ctx = ctx.evolve(executables=ctx.executables.fuzzed())
        elif item == "workdir":
            ctx = ctx.evolve(container=fuzz_path(ctx.container, ctx.workdir))
        elif item.startswith("path:"):
            ctx = ctx.evolve(container=fuzz_path(ctx.container, item[5:]))
        elif item.startswith("cwd:"):
            ctx = ctx.evolve(container=fuzz_path(ctx.container, normalize(item[4:], ctx.workdir)))
        else:
            raise ValueError(f"unknown fuzz scope {item!r}")
    return ctx


class Outcome:
    """Accumulates what one mocked command did.

    ``consumed_fuzzy()`` records that fuzzy context was read. With the
    assumption enabled the command proceeds and only its exit status turns
    fuzzy; without it the branch halts and the whole context is fuzzed.
    ``unknown_exit()`` is for partial mocks whose exit status is unknowable
    regardless of context.
    """

    def __init__(self, ctx: Context) -> None:
        self.start = ctx
        self.ctx = ctx
        self.warnings: list[MockWarning] = []
        self.fuzzy_input = False
        self.fuzzy_exit = False

    @property
    def autofix(self) -> bool:
        return self.start.autofix

    def conflict(self, fault: FaultType, subject: str, message: str) -> None:
        self.warnings.append(MockWarning(fault, 0, subject, message))

    def consumed_fuzzy(self) -> None:
        self.fuzzy_input = True

    def unknown_exit(self) -> None:
        self.fuzzy_exit = True

    def finish(self) -> tuple[MockResult, Context]:
        if self.warnings:
            return MockResult(Status.CONFLICT, tuple(self.warnings)), self.ctx
        if self.fuzzy_input and not self.start.assume:
            return MockResult(Status.FUZZY, exit_fuzzy=True, halted=True), fuzz_all(self.start)
        if self.fuzzy_input or self.fuzzy_exit:
            return MockResult(Status.FUZZY, exit_fuzzy=True), self.ctx
        return MockResult(Status.PRECISE_OK), self.ctx


def fuzzy_everything(ctx: Context) -> tuple[MockResult, Context]:
    return MockResult(Status.FUZZY, exit_fuzzy=True), fuzz_all(ctx)


# -- options -------------------------------------------------------------------

@dataclass
class Options:
    flags: set[str] = field(default_factory=set)
    values: dict[str, str] = field(default_factory=dict)
    operands: list[ExpandedValue] = field(default_factory=list)
    unknown: list[str] = field(default_factory=list)
    fuzzy: bool = False

    def has(self, *names: str) -> bool:
        return any(n in self.flags for n in names)


def parse_options(
    args: Iterable[ExpandedValue],
    short: str = "",
    long: Iterable[str] = (),
    short_with_value: str = "",
    long_with_value: Iterable[str] = (),
    permute: bool = True,
) -> Options:
    """GNU-style option parsing: bundled short flags, ``--long[=v]``, ``--``.

    Flags are recorded by their bare name (``r``, ``recursive``). Unknown
    options land in ``unknown``; a fuzzy word in option position sets
    ``fuzzy``.
    """
    long = set(long)
    long_with_value = set(long_with_value)
    opts = Options()
    items = list(args)
    i = 0
    done = False
    while i < len(items):
        a = items[i]
        i += 1
        t = a.text
        if done or t == "-" or not t.startswith("-"):
            if a.fuzzy and not t:
                opts.fuzzy = True
            opts.operands.append(a)
            if not permute:
                done = True
            continue
        if a.fuzzy:
            opts.fuzzy = True
        if t == "--":
            done = True
            continue
        if t.startswith("--"):
            name, eq, value = t[2:].partition("=")
            if name in long_with_value:
                if not eq and i < len(items):
                    value = items[i].text
                    i += 1
                opts.values[name] = value
                opts.flags.add(name)
            elif name in long:
                opts.flags.add(name)
            else:
                opts.unknown.append(t)
            continue
        j = 1
        while j < len(t):
            ch = t[j]
            if ch in short_with_value:
                value = t[j + 1:]
                if not value and i < len(items):
                    value = items[i].text
                    i += 1
                opts.values[ch] = value
                opts.flags.add(ch)
                break
            if ch in short:
                opts.flags.add(ch)
            else:
                opts.unknown.append("-" + ch)
            j += 1
    return opts


# -- globbing ----------------------------------------------------------------

def glob_tree(tree: FileNode, pattern: str, cwd: str) -> tuple[list[str], bool]:
    """Match an (absolute or relative) glob against ``tree``.

    Returns ``(matches, fuzzy)``; ``fuzzy`` is set when a fuzzy directory was
    consulted, in which case ``matches`` is only a lower bound.
    """
    absolute = pattern.startswith("/")
    base = "/" if absolute else cwd
    parts = [p for p in pattern.split("/") if p not in ("", ".")]
    frontier: list[tuple[str, FileNode]] = []
    start = get_node(tree, base)
    if start is None:
        return [], _absence_is_fuzzy(tree, base)
    frontier.append((normalize(base), start))
    fuzzy = False
    for k, part in enumerate(parts):
        last = k == len(parts) - 1
        nxt: list[tuple[str, FileNode]] = []
        for path, node in frontier:
            if not node.is_dir:
                fuzzy |= node.fuzzy
                continue
            if node.fuzzy:
                fuzzy = True
            if part == "..":
                parent = normalize("..", path)
                pnode = get_node(tree, parent)
                if pnode is not None:
                    nxt.append((parent, pnode))
                continue
            if any(c in part for c in "*?["):
                for name in sorted(node.children):
                    if name.startswith(".") and not part.startswith("."):
                        continue
                    if fnmatch.fnmatchcase(name, part):
                        child = node.children[name]
                        if last or child.is_dir or child.fuzzy:
                            nxt.append((normalize(name, path), child))
            else:
                name = _unescape(part)
                child = node.children.get(name)
                if child is not None:
                    nxt.append((normalize(name, path), child))
        frontier = nxt
    matches = [p for p, _ in frontier]
    if not absolute:
        prefix = normalize(cwd).rstrip("/") + "/"
        matches = [m[len(prefix):] if m.startswith(prefix) else m for m in matches]
    return matches, fuzzy


def _unescape(part: str) -> str:
    out = []
    i = 0
    while i < len(part):
        if part[i] == "[" and i + 2 < len(part) and part[i + 2] == "]":
            out.append(part[i + 1])
            i += 3
        else:
            out.append(part[i])
            i += 1
    return "".join(out)


def _absence_is_fuzzy(tree: FileNode, path: str) -> bool:
    from dockmock.context import stat

    return stat(tree, path).presence is Presence.ABSENT_FUZZY


def expand_globs(values: list[ExpandedValue], ctx: Context) -> list[ExpandedValue]:
    out: list[ExpandedValue] = []
    for v in values:
        if v.pattern is None or v.fuzzy:
            out.append(v)
            continue
        matches, fuzzy = glob_tree(ctx.container, v.pattern, ctx.workdir)
        if fuzzy or ctx.workdir_fuzzy and not v.pattern.startswith("/"):
            out.append(replace(v, fuzzy=True))
        elif matches:
            out.extend(ExpandedValue(m) for m in matches)
        else:
            out.append(replace(v, pattern=None))
    return out


def resolve(ctx: Context, value: ExpandedValue) -> tuple[str, bool]:
    return resolve_path(value, ctx)


def is_special_device(path: str) -> bool:
    parts = split_path(path)
    return bool(parts) and parts[0] in ("dev", "proc", "sys")
