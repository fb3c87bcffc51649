"""Mock build context: variables, file trees, executables, working directory.

Everything here is an immutable value. Tree operations copy the nodes along
the touched path and share the rest, so a mock can keep the context it was
given and roll back by simply discarding the new one.
"""

from __future__ import annotations

import enum
import os
import stat as stat_mod
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from dockmock.errors import ConflictFault, IOFault
from dockmock.ignore import DockerIgnore

DEFAULT_PATH = "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin"

# Manifests whose text some mocks inspect; everything else is content-free.
MANIFEST_NAMES = frozenset(
    ["Gemfile", "go.mod", "package.json", "package-lock.json", "requirements.txt",
     ".ruby-version", "Pipfile", "pyproject.toml", "setup.py", "yarn.lock"]
)
_MANIFEST_MAX_BYTES = 256 * 1024

# Shell built-ins and POSIX utilities every sh-based image answers to.
SHELL_BUILTINS = frozenset(
    """. : [ [[ alias bg break cd command continue echo eval exec exit export false fc fg
    getopts hash jobs kill local newgrp printf pwd read readonly return set shift source
    test times trap true type ulimit umask unalias unset wait""".split()
)


class Kind(enum.Enum):
    REGULAR = "regular"
    DIRECTORY = "directory"


@dataclass(frozen=True)
class FileNode:
    """One node of a mock file tree.

    ``fuzzy`` on a directory means it may hold children that are not
    tracked; on a regular file it means its attributes (and whether it is
    still a regular file) are unknown.
    """

    kind: Kind
    children: Mapping[str, FileNode] = field(default_factory=dict)
    mode: int | None = None
    fuzzy: bool = False
    content: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.kind is Kind.REGULAR and self.children:
            raise ValueError("a regular file can only be a leaf")

    @property
    def is_dir(self) -> bool:
        return self.kind is Kind.DIRECTORY

    def walk(self, prefix: str = "") -> Iterator[tuple[str, FileNode]]:
        """Yield ``(path, node)`` for every descendant (not ``self``)."""
        for name in sorted(self.children):
            child = self.children[name]
            path = f"{prefix}/{name}"
            yield path, child
            if child.is_dir:
                yield from child.walk(path)

    def shape(self) -> dict[str, str]:
        """Flat ``path -> kind`` map, handy for structural comparisons."""
        return {p: n.kind.value for p, n in self.walk()}


def directory(children: Mapping[str, FileNode] | None = None, *, fuzzy: bool = False,
              mode: int | None = 0o755) -> FileNode:
    return FileNode(Kind.DIRECTORY, dict(children or {}), mode, fuzzy)


def regular(*, fuzzy: bool = False, mode: int | None = 0o644, content: str | None = None) -> FileNode:
    return FileNode(Kind.REGULAR, {}, mode, fuzzy, content)


# -- paths -------------------------------------------------------------------

def split_path(path: str) -> list[str]:
    """Components of a normalized absolute path (``"/"`` -> ``[]``)."""
    parts: list[str] = []
    for name in path.split("/"):
        if name in ("", "."):
            continue
        if name == "..":
            if parts:
                parts.pop()
            continue
        parts.append(name)
    return parts


def normalize(path: str, cwd: str = "/") -> str:
    if not path.startswith("/"):
        path = cwd.rstrip("/") + "/" + path
    return "/" + "/".join(split_path(path))


def parent_of(path: str) -> str:
    parts = split_path(path)
    return "/" + "/".join(parts[:-1])


def basename(path: str) -> str:
    parts = split_path(path)
    return parts[-1] if parts else ""


# -- stat ----------------------------------------------------------------------

class Presence(enum.Enum):
    FOUND = "found"
    ABSENT_PRECISE = "absent-precise"
    ABSENT_FUZZY = "absent-fuzzy"


@dataclass(frozen=True)
class StatResult:
    presence: Presence
    kind: Kind | None = None
    mode: int | None = None
    fuzzy: bool = False

    @property
    def found(self) -> bool:
        return self.presence is Presence.FOUND

    @property
    def absent_precise(self) -> bool:
        return self.presence is Presence.ABSENT_PRECISE

    @property
    def is_dir(self) -> bool:
        return self.kind is Kind.DIRECTORY

    @property
    def is_regular(self) -> bool:
        return self.kind is Kind.REGULAR

    @property
    def precise_dir(self) -> bool:
        return self.found and self.is_dir and not self.fuzzy

    @property
    def precise_regular(self) -> bool:
        return self.found and self.is_regular and not self.fuzzy


ABSENT_PRECISE = StatResult(Presence.ABSENT_PRECISE)
ABSENT_FUZZY = StatResult(Presence.ABSENT_FUZZY)


def stat(tree: FileNode, path: str) -> StatResult:
    """Look ``path`` up in ``tree``.

    Absence is precise only when the directory where the lookup stops is
    precise. Walking through a regular file yields a precise absence
    (``ENOTDIR``) unless that file is fuzzy.
    """
    node = tree
    for name in split_path(path):
        if not node.is_dir:
            return ABSENT_FUZZY if node.fuzzy else ABSENT_PRECISE
        child = node.children.get(name)
        if child is None:
            return ABSENT_FUZZY if node.fuzzy else ABSENT_PRECISE
        node = child
    return StatResult(Presence.FOUND, node.kind, node.mode, node.fuzzy)


def get_node(tree: FileNode, path: str) -> FileNode | None:
    node = tree
    for name in split_path(path):
        if not node.is_dir:
            return None
        nxt = node.children.get(name)
        if nxt is None:
            return None
        node = nxt
    return node


# -- tree edits ----------------------------------------------------------------

def put_node(tree: FileNode, path: str, node: FileNode | Kind, fuzzy: bool = False) -> FileNode:
    """Return a tree with ``node`` at ``path``, creating missing parents.

    Parents created under a fuzzy directory are fuzzy themselves, since they
    might already exist with unknown content. Raises :class:`ConflictFault`
    when a precise regular file sits on the parent chain.
    """
    if isinstance(node, Kind):
        node = directory(fuzzy=fuzzy) if node is Kind.DIRECTORY else regular(fuzzy=fuzzy)
    parts = split_path(path)
    if not parts:
        if not node.is_dir:
            raise ConflictFault("cannot replace the root with a regular file", "/")
        return node
    return _put(tree, parts, node, "")


def _put(cur: FileNode, parts: list[str], node: FileNode, prefix: str) -> FileNode:
    name, rest = parts[0], parts[1:]
    children = dict(cur.children)
    if not rest:
        children[name] = node
        return replace(cur, children=children)
    child = children.get(name)
    here = f"{prefix}/{name}"
    if child is None:
        child = directory(fuzzy=cur.fuzzy)
    elif not child.is_dir:
        if not child.fuzzy:
            raise ConflictFault("not a directory", here)
        child = directory(fuzzy=True)
    children[name] = _put(child, rest, node, here)
    return replace(cur, children=children)


def remove_node(tree: FileNode, path: str) -> FileNode:
    parts = split_path(path)
    if not parts:
        return directory(fuzzy=tree.fuzzy, mode=tree.mode)
    return _remove(tree, parts)


def _remove(cur: FileNode, parts: list[str]) -> FileNode:
    if not cur.is_dir or parts[0] not in cur.children:
        return cur
    children = dict(cur.children)
    if len(parts) == 1:
        del children[parts[0]]
    else:
        children[parts[0]] = _remove(children[parts[0]], parts[1:])
    return replace(cur, children=children)


def fuzz_subtree(node: FileNode) -> FileNode:
    """Mark ``node`` and every descendant fuzzy."""
    if not node.is_dir:
        return replace(node, fuzzy=True)
    return replace(node, fuzzy=True, children={k: fuzz_subtree(v) for k, v in node.children.items()})


def fuzz_path(tree: FileNode, path: str) -> FileNode:
    """Mark the subtree at ``path`` fuzzy, creating it as a fuzzy directory
    when it is not tracked yet."""
    existing = get_node(tree, path)
    if existing is None:
        try:
            return put_node(tree, path, directory(fuzzy=True))
        except ConflictFault:
            return tree
    return put_node(tree, path, fuzz_subtree(existing))


def set_mode(tree: FileNode, path: str, mode: int | None, recursive: bool = False) -> FileNode:
    node = get_node(tree, path)
    if node is None:
        return tree
    if recursive and node.is_dir:
        node = _set_mode_rec(node, mode)
    else:
        node = replace(node, mode=mode)
    return put_node(tree, path, node)


def _set_mode_rec(node: FileNode, mode: int | None) -> FileNode:
    if not node.is_dir:
        return replace(node, mode=mode)
    return replace(node, mode=mode, children={k: _set_mode_rec(v, mode) for k, v in node.children.items()})


def merge_into(existing: FileNode | None, src: FileNode, absent_fuzzy: bool, path: str = "") -> FileNode:
    """Overlay ``src`` onto ``existing`` the way ``COPY`` merges directories.

    ``absent_fuzzy`` says whether a missing ``existing`` might exist for real;
    directories created in that case stay fuzzy.
    """
    if not src.is_dir:
        if existing is not None and existing.is_dir and not existing.fuzzy:
            raise ConflictFault("cannot overwrite directory with non-directory", path)
        return src
    if existing is None or (not existing.is_dir and existing.fuzzy):
        fuzzy = src.fuzzy or absent_fuzzy or existing is not None
        return replace(
            src, fuzzy=fuzzy,
            children={k: merge_into(None, v, fuzzy, f"{path}/{k}") for k, v in src.children.items()},
        )
    if not existing.is_dir:
        raise ConflictFault("cannot overwrite non-directory with directory", path)
    children = dict(existing.children)
    for name, child in src.children.items():
        children[name] = merge_into(children.get(name), child, existing.fuzzy, f"{path}/{name}")
    return replace(existing, children=children, fuzzy=existing.fuzzy or src.fuzzy)


def copy_between_trees(
    src_tree: FileNode,
    src_path: str | Sequence[str],
    dst_tree: FileNode,
    dst_path: str,
    dst_trailing_slash: bool,
) -> FileNode:
    """Copy one or more sources into ``dst_tree`` with ``COPY`` semantics.

    A regular source lands at ``dst_path`` or, when the destination is a
    directory (trailing slash or existing directory), at
    ``dst_path/basename``. A directory source has its *contents* merged into
    ``dst_path``. Several sources need a trailing slash on the destination.
    """
    sources = [src_path] if isinstance(src_path, str) else list(src_path)
    if len(sources) > 1 and not dst_trailing_slash:
        raise ConflictFault("when using COPY with more than one source file, "
                            "the destination must be a directory and end with a /", dst_path)
    tree = dst_tree
    for src in sources:
        node = get_node(src_tree, src)
        if node is None:
            raise ConflictFault("source does not exist", src)
        target = dst_path
        dst_stat = stat(tree, dst_path)
        if not node.is_dir and (dst_trailing_slash or (dst_stat.found and dst_stat.is_dir)):
            target = normalize(basename(src) or "_", dst_path)
        existing = get_node(tree, target)
        absent_fuzzy = stat(tree, target).presence is Presence.ABSENT_FUZZY
        merged = merge_into(existing, node, absent_fuzzy, target)
        tree = put_node(tree, target, merged)
    return tree


# -- variables & executables ---------------------------------------------------

@dataclass(frozen=True)
class VariableMap:
    entries: Mapping[str, str] = field(default_factory=dict)
    precise_names: frozenset[str] = frozenset()
    all_tracked: bool = True

    @classmethod
    def precise(cls, entries: Mapping[str, str], all_tracked: bool = True) -> VariableMap:
        return cls(dict(entries), frozenset(entries), all_tracked)

    def lookup(self, name: str) -> tuple[str | None, bool]:
        if name in self.precise_names:
            return self.entries.get(name), True
        if name in self.entries:
            return self.entries[name], False
        return None, self.all_tracked

    def set(self, name: str, value: str, precise: bool = True) -> VariableMap:
        entries = dict(self.entries)
        entries[name] = value
        names = self.precise_names | {name} if precise else self.precise_names - {name}
        return replace(self, entries=entries, precise_names=names)

    def unset(self, name: str) -> VariableMap:
        entries = dict(self.entries)
        entries.pop(name, None)
        return replace(self, entries=entries, precise_names=self.precise_names | {name})

    def fuzzed(self) -> VariableMap:
        return replace(self, precise_names=frozenset(), all_tracked=False)

    def is_precise(self, name: str) -> bool:
        return self.lookup(name)[1]


@dataclass(frozen=True)
class ExecutableList:
    names: frozenset[str] = frozenset()
    fuzzy: bool = False

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def add(self, *names: str) -> ExecutableList:
        return replace(self, names=self.names | set(names))

    def fuzzed(self) -> ExecutableList:
        return replace(self, fuzzy=True)


class Lookup(enum.Enum):
    FOUND = "found"
    NOT_FOUND = "not-found"
    FUZZY = "fuzzy"


# -- context ------------------------------------------------------------------

@dataclass(frozen=True)
class Context:
    vars: VariableMap = field(default_factory=VariableMap)
    container: FileNode = field(default_factory=directory)
    container_fuzzy: bool = False
    workspace: FileNode = field(default_factory=directory)
    executables: ExecutableList = field(default_factory=ExecutableList)
    workdir: str = "/"
    workdir_fuzzy: bool = False
    user: str = "root"
    #: base image reference of the current stage, when known
    image: str | None = None
    #: consume fuzzy context as if it were real (otherwise halt the branch)
    assume: bool = True
    #: after a conflict, continue as if the obvious fix had been applied;
    #: when off, a failing command leaves the context as the real one would
    autofix: bool = True
    #: interpreter for shell-form RUN/CMD/ENTRYPOINT, set by SHELL
    shell: tuple[str, ...] = ("/bin/sh", "-c")

    def __post_init__(self) -> None:
        if not self.workdir.startswith("/"):
            raise ValueError(f"workdir must be absolute: {self.workdir!r}")

    def evolve(self, **changes) -> Context:
        return replace(self, **changes)

    def home(self):
        from dockmock.shell import ExpandedValue

        value, precise = self.vars.lookup("HOME")
        return ExpandedValue(value or "", not precise)

    def stat_container(self, path: str) -> StatResult:
        return stat(self.container, path)

    def stat_workspace(self, path: str) -> StatResult:
        return stat(self.workspace, path)

    def path_dirs(self) -> tuple[list[str], bool]:
        value, precise = self.vars.lookup("PATH")
        return [d for d in (value or "").split(":") if d], precise


def fresh_context(workspace: FileNode | None = None, *, assume: bool = True) -> Context:
    """Seed context used before any base image is known."""
    return Context(
        vars=VariableMap({"PATH": DEFAULT_PATH}, frozenset({"PATH"}), all_tracked=False),
        container=directory(),
        workspace=workspace if workspace is not None else directory(),
        executables=ExecutableList(SHELL_BUILTINS),
        workdir="/",
        user="root",
        assume=assume,
    )


def fuzz_all(ctx: Context) -> Context:
    """Fuzz every mutable part of the context; the workspace is untouched."""
    return replace(
        ctx,
        vars=ctx.vars.fuzzed(),
        container=fuzz_subtree(ctx.container),
        container_fuzzy=True,
        executables=ctx.executables.fuzzed(),
        workdir_fuzzy=True,
    )


def join_trees(a: FileNode, b: FileNode) -> FileNode:
    """Least precise tree describing both ``a`` and ``b``."""
    if a == b:
        return a
    if a.kind is not b.kind:
        return fuzz_subtree(b if b.is_dir else a)
    if not a.is_dir:
        return replace(b, fuzzy=True, mode=a.mode if a.mode == b.mode else None)
    children: dict[str, FileNode] = {}
    differs = set(a.children) != set(b.children)
    for name in set(a.children) | set(b.children):
        ca, cb = a.children.get(name), b.children.get(name)
        if ca is None or cb is None:
            children[name] = fuzz_subtree(ca or cb)
        else:
            children[name] = join_trees(ca, cb)
    return FileNode(Kind.DIRECTORY, children, a.mode if a.mode == b.mode else None,
                    a.fuzzy or b.fuzzy or differs)


def join_contexts(a: Context, b: Context) -> Context:
    """Context after a command that may or may not have run: ``a`` is the
    state without it, ``b`` with it."""
    same = {
        n for n in a.vars.precise_names & b.vars.precise_names
        if a.vars.entries.get(n) == b.vars.entries.get(n)
    }
    entries = dict(a.vars.entries)
    entries.update(b.vars.entries)
    vars_ = VariableMap(entries, frozenset(same), a.vars.all_tracked and b.vars.all_tracked)
    exes = ExecutableList(a.executables.names | b.executables.names,
                          a.executables.fuzzy or b.executables.fuzzy
                          or a.executables.names != b.executables.names)
    return replace(
        b,
        vars=vars_,
        container=join_trees(a.container, b.container),
        container_fuzzy=a.container_fuzzy or b.container_fuzzy,
        executables=exes,
        workdir_fuzzy=a.workdir_fuzzy or b.workdir_fuzzy or a.workdir != b.workdir,
    )


def resolve_path(p, ctx: Context) -> tuple[str, bool]:
    """Absolute, normalized form of ``p`` (an ``ExpandedValue`` or ``str``)
    relative to the working directory."""
    text = getattr(p, "text", p)
    fuzzy = bool(getattr(p, "fuzzy", False))
    if not text.startswith("/"):
        fuzzy = fuzzy or ctx.workdir_fuzzy
    return normalize(text, ctx.workdir), fuzzy


def lookup_executable(name, ctx: Context) -> Lookup:
    """Classify a command name (``ExpandedValue`` or ``str``) against the
    executable list and the container tree."""
    text = getattr(name, "text", name)
    if getattr(name, "fuzzy", False):
        return Lookup.FUZZY
    if "/" in text:
        path, fuzzy = resolve_path(text, ctx)
        st = ctx.stat_container(path)
        if st.found:
            return Lookup.FOUND if st.is_regular or st.fuzzy else Lookup.FUZZY
        if st.absent_precise and not fuzzy:
            return Lookup.NOT_FOUND
        return Lookup.FUZZY
    if text in ctx.executables:
        return Lookup.FOUND
    dirs, precise = ctx.path_dirs()
    for d in dirs:
        st = ctx.stat_container(normalize(text, d))
        if st.found and (st.is_regular or st.fuzzy):
            return Lookup.FOUND
    if ctx.executables.fuzzy or not precise:
        return Lookup.FUZZY
    return Lookup.NOT_FOUND


# -- workspace scanning --------------------------------------------------------

def scan_workspace(root: str | os.PathLike, ignore_rules: Iterable[str] | None = None) -> FileNode:
    """Build a fully precise tree mirroring the directory ``root``.

    When ``ignore_rules`` is ``None`` the rules come from ``root/.dockerignore``
    if present. Symbolic links are recorded as regular files.
    """
    root = Path(root)
    if not root.is_dir():
        raise IOFault(f"workspace is not a readable directory: {root}")
    if ignore_rules is None:
        ignore = DockerIgnore.from_file(root / ".dockerignore")
    else:
        ignore = DockerIgnore(list(ignore_rules))
    try:
        mode = stat_mod.S_IMODE(root.stat().st_mode)
        return _scan_dir(root, "", ignore, mode)
    except OSError as exc:
        raise IOFault(f"cannot read workspace {root}: {exc}") from exc


def _scan_dir(path: Path, rel: str, ignore: DockerIgnore, mode: int) -> FileNode:
    children: dict[str, FileNode] = {}
    with os.scandir(path) as it:
        entries = sorted(it, key=lambda e: e.name)
    for entry in entries:
        child_rel = f"{rel}/{entry.name}" if rel else entry.name
        st = entry.stat(follow_symlinks=False)
        child_mode = stat_mod.S_IMODE(st.st_mode)
        if entry.is_dir(follow_symlinks=False):
            sub = _scan_dir(Path(entry.path), child_rel, ignore, child_mode)
            if sub.children or not ignore.ignored(child_rel):
                children[entry.name] = sub
        elif not ignore.ignored(child_rel):
            content = None
            if entry.name in MANIFEST_NAMES and st.st_size <= _MANIFEST_MAX_BYTES and not entry.is_symlink():
                content = Path(entry.path).read_text(encoding="utf-8", errors="replace")
            children[entry.name] = regular(mode=child_mode, content=content)
    return directory(children, mode=mode)


def tree_from_paths(paths: Iterable[str], contents: Mapping[str, str] | None = None) -> FileNode:
    """Build a precise tree from relative paths; a trailing ``/`` marks a
    directory. Mainly a convenience for tests and in-memory workspaces."""
    contents = contents or {}
    tree = directory()
    for p in paths:
        if p.endswith("/"):
            tree = put_node(tree, "/" + p, directory())
        else:
            tree = put_node(tree, "/" + p, regular(content=contents.get(p)))
    return tree
