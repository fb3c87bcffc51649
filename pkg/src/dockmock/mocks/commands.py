"""Complete mocks for the core file and environment commands.

These follow GNU coreutils and dash closely enough that, on a precise
context with literal arguments, the mock tree and exit status match a real
run (the shadow-execution tests replay random sequences to check this).
When ``ctx.autofix`` is off a failing command leaves the tree exactly as the
real one would; when it is on, analysis continues from the repaired state.
"""

from __future__ import annotations

import re
from dataclasses import replace

from dockmock.context import (
    Context,
    FileNode,
    Presence,
    VariableMap,
    basename,
    directory,
    fuzz_path,
    get_node,
    merge_into,
    normalize,
    parent_of,
    put_node,
    regular,
    remove_node,
    set_mode,
    split_path,
)
from dockmock.errors import ConflictFault
from dockmock.faults import FaultType
from dockmock.mocks.base import COMMANDS, Integrity, Invocation, Outcome, parse_options, resolve
from dockmock.mocks.dispatch import dispatch_argv
from dockmock.shell import ExpandedValue

MISUSE = FaultType.COMMAND_MISUSE
INNER = FaultType.INNER_FILE_NOT_FOUND
COMPLETE = Integrity.COMPLETE


def _place(o: Outcome, path: str, node: FileNode) -> None:
    """Put ``node`` at ``path`` unless a precise regular file blocks the way."""
    try:
        o.ctx = o.ctx.evolve(container=put_node(o.ctx.container, path, node))
    except ConflictFault:
        pass


def _place_fuzzy(o: Outcome, path: str, kind_dir: bool = False) -> None:
    if get_node(o.ctx.container, path) is None:
        _place(o, path, directory(fuzzy=True) if kind_dir else regular(fuzzy=True, mode=None))


def _parent_state(ctx: Context, path: str) -> str:
    """``dir`` when the parent certainly exists as a directory, ``missing``
    when it certainly does not, ``unknown`` otherwise."""
    st = ctx.stat_container(parent_of(path))
    if st.found and st.is_dir:
        return "dir"
    if st.absent_precise or st.precise_regular:
        return "missing"
    return "unknown"


# -- mkdir -----------------------------------------------------------------------

@COMMANDS.register("mkdir", integrity=COMPLETE)
def mock_mkdir(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="pv", long=("parents", "verbose"),
                         short_with_value="mZ", long_with_value=("mode", "context"))
    if opts.unknown or opts.fuzzy:
        o.unknown_exit()
    if not opts.operands:
        o.conflict(MISUSE, "mkdir", "mkdir: missing operand")
        return o.finish()
    mode = _octal(opts.values.get("m") or opts.values.get("mode"))
    parents = opts.has("p", "parents")
    for op in opts.operands:
        path, fuzzy = resolve(o.ctx, op)
        if fuzzy:
            o.consumed_fuzzy()
            _place_fuzzy(o, path, kind_dir=True)
            continue
        created = _mkdir_p(o, path, op.text) if parents else _mkdir(o, path, op.text)
        if created and mode is not None:
            o.ctx = o.ctx.evolve(container=set_mode(o.ctx.container, path, mode))
    return o.finish()


def _mkdir(o: Outcome, path: str, subject: str) -> bool:
    st = o.ctx.stat_container(path)
    if st.found:
        if st.fuzzy:
            o.consumed_fuzzy()
        else:
            o.conflict(MISUSE, subject, f"mkdir: cannot create directory '{subject}': File exists")
        return False
    if not st.absent_precise:
        # it may already exist; assume it does not
        o.consumed_fuzzy()
    state = _parent_state(o.ctx, path)
    if state == "missing":
        o.conflict(MISUSE, subject,
                   f"mkdir: cannot create directory '{subject}': No such file or directory "
                   "(missing -p)")
        if not o.autofix:
            return False
        # corrected option: behave like mkdir -p
        return _mkdir_p(o, path, subject)
    if state == "unknown":
        o.consumed_fuzzy()
    # the assumption says mkdir succeeded, so the directory is new and empty
    _place(o, path, directory())
    return True


def _mkdir_p(o: Outcome, path: str, subject: str) -> bool:
    st = o.ctx.stat_container(path)
    if st.found:
        if st.is_dir:
            return False
        if not st.fuzzy:
            o.conflict(MISUSE, subject, f"mkdir: cannot create directory '{subject}': File exists")
            return False
        o.consumed_fuzzy()
        _place(o, path, directory(fuzzy=True))
        return True
    node = o.ctx.container
    for name in split_path(path):
        if not node.is_dir:
            if not node.fuzzy:
                o.conflict(MISUSE, subject,
                           f"mkdir: cannot create directory '{subject}': Not a directory")
                return False
            o.consumed_fuzzy()
            break
        nxt = node.children.get(name)
        if nxt is None:
            break
        node = nxt
    _place(o, path, directory(fuzzy=st.presence is Presence.ABSENT_FUZZY))
    return True


# -- touch -------------------------------------------------------------------------

@COMMANDS.register("touch", integrity=COMPLETE)
def mock_touch(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="acfhm", long=("no-create", "no-dereference"),
                         short_with_value="drt", long_with_value=("date", "reference", "time"))
    if opts.unknown or opts.fuzzy:
        o.unknown_exit()
    if not opts.operands:
        o.conflict(MISUSE, "touch", "touch: missing file operand")
        return o.finish()
    for op in opts.operands:
        path, fuzzy = resolve(o.ctx, op)
        if fuzzy:
            o.consumed_fuzzy()
            _place_fuzzy(o, path)
            continue
        st = o.ctx.stat_container(path)
        if st.found or opts.has("c", "no-create"):
            continue
        state = _parent_state(o.ctx, path)
        if state == "dir":
            _place(o, path, regular(fuzzy=st.presence is Presence.ABSENT_FUZZY))
        elif state == "missing":
            o.conflict(INNER, op.text, f"touch: cannot touch '{op.text}': No such file or directory")
            if o.autofix:
                _place_fuzzy(o, path)
        else:
            o.consumed_fuzzy()
            _place(o, path, regular(fuzzy=True, mode=None))
    return o.finish()


# -- cp ----------------------------------------------------------------------------

_CP_SHORT = "rRadfiHlLnPpsTuvxbS"
_CP_LONG = ("recursive", "archive", "force", "interactive", "link", "dereference",
            "no-clobber", "no-dereference", "parents", "symbolic-link", "update", "verbose",
            "one-file-system", "remove-destination", "strip-trailing-slashes",
            "no-target-directory", "attributes-only", "copy-contents", "debug")
_CP_LONG_VAL = ("target-directory", "preserve", "no-preserve", "backup", "suffix", "reflink", "sparse")


@COMMANDS.register("cp", integrity=COMPLETE)
def mock_cp(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short=_CP_SHORT, long=_CP_LONG,
                         short_with_value="t", long_with_value=_CP_LONG_VAL)
    if opts.unknown or opts.fuzzy:
        o.unknown_exit()
    recursive = opts.has("r", "R", "a", "recursive", "archive")
    sources, dest, need_dir = _split_targets(o, opts, "cp")
    if dest is None:
        return o.finish()
    dpath, dfuzzy = resolve(o.ctx, dest)
    if dfuzzy:
        o.consumed_fuzzy()
    if need_dir and not _ensure_target_dir(o, dpath, dest.text, "cp"):
        return o.finish()
    for src in sources:
        _cp_one(o, src, dest, dpath, recursive)
    return o.finish()


def _split_targets(o: Outcome, opts, tool: str):
    target_dir = opts.values.get("t") or opts.values.get("target-directory")
    ops = opts.operands
    if target_dir is not None:
        if not ops:
            o.conflict(MISUSE, tool, f"{tool}: missing file operand")
            return [], None, False
        return ops, ExpandedValue(target_dir), True
    if len(ops) < 2:
        subject = ops[0].text if ops else tool
        o.conflict(MISUSE, subject, f"{tool}: missing destination file operand")
        return [], None, False
    return ops[:-1], ops[-1], len(ops) > 2


def _ensure_target_dir(o: Outcome, dpath: str, text: str, tool: str) -> bool:
    st = o.ctx.stat_container(dpath)
    if st.found and st.is_dir:
        return True
    if st.precise_regular or st.absent_precise:
        o.conflict(MISUSE, text, f"{tool}: target '{text}' is not a directory")
        if o.autofix and st.absent_precise:
            _place(o, dpath, directory(fuzzy=True))
            return True
        return False
    o.consumed_fuzzy()
    _place(o, dpath, directory(fuzzy=True))
    return True


def _target_for(o: Outcome, src_path: str, dest: ExpandedValue, dpath: str, src_is_dir: bool):
    """Where a source lands; ``None`` when the destination is unusable (a
    conflict has been recorded)."""
    dst = o.ctx.stat_container(dpath)
    if dst.found and dst.is_dir:
        return normalize(basename(src_path), dpath)
    if dest.text.endswith("/") and not src_is_dir:
        if dst.found and not dst.fuzzy or dst.absent_precise:
            o.conflict(INNER, dest.text, f"cannot create regular file '{dest.text}': Not a directory")
            if o.autofix:
                _place_fuzzy(o, dpath, kind_dir=True)
                return normalize(basename(src_path), dpath)
            return None
        o.consumed_fuzzy()
        return normalize(basename(src_path), dpath)
    return dpath


def _cp_one(o: Outcome, src: ExpandedValue, dest: ExpandedValue, dpath: str, recursive: bool) -> None:
    spath, sfuzzy = resolve(o.ctx, src)
    if sfuzzy:
        o.consumed_fuzzy()
        target = _target_for(o, spath, dest, dpath, False)
        if target is not None:
            _place(o, target, regular(fuzzy=True, mode=None))
        return
    sst = o.ctx.stat_container(spath)
    if not sst.found:
        if sst.absent_precise:
            o.conflict(INNER, src.text, f"cp: cannot stat '{src.text}': No such file or directory")
            if not o.autofix:
                return
        else:
            o.consumed_fuzzy()
        target = _target_for(o, spath, dest, dpath, False)
        if target is not None:
            _place(o, target, regular(fuzzy=True, mode=None))
        return
    node = get_node(o.ctx.container, spath)
    if node.fuzzy and not node.is_dir:
        o.consumed_fuzzy()
    if node.is_dir and not recursive:
        o.conflict(MISUSE, src.text, f"cp: -r not specified; omitting directory '{src.text}'")
        if not o.autofix:
            return
    target = _target_for(o, spath, dest, dpath, node.is_dir)
    if target is None:
        return
    if target == spath:
        o.conflict(MISUSE, src.text, f"cp: '{src.text}' and '{dest.text}' are the same file")
        return
    state = _parent_state(o.ctx, target)
    if state == "missing":
        o.conflict(INNER, dest.text,
                   f"cp: cannot create '{dest.text}': No such file or directory")
        if o.autofix:
            _place(o, target, replace(node, fuzzy=True) if not node.is_dir else directory(fuzzy=True))
        return
    if state == "unknown":
        o.consumed_fuzzy()
    if node.is_dir and target.startswith(spath.rstrip("/") + "/"):
        # GNU copies a snapshot of the source before noticing the cycle
        existing = get_node(o.ctx.container, target)
        merged = _cp_merge(o, existing, node, False, target)
        if merged is not existing:
            _place(o, target, merged)
        o.conflict(MISUSE, src.text,
                   f"cp: cannot copy a directory, '{src.text}', into itself, '{dest.text}'")
        return
    existing = get_node(o.ctx.container, target)
    absent_fuzzy = existing is None and o.ctx.stat_container(target).presence is Presence.ABSENT_FUZZY
    merged = _cp_merge(o, existing, node, absent_fuzzy, target)
    if merged is not existing:
        _place(o, target, merged)


def _cp_merge(o: Outcome, existing: FileNode | None, src: FileNode, absent_fuzzy: bool, path: str) -> FileNode | None:
    if not src.is_dir:
        if existing is not None and existing.is_dir:
            if not existing.fuzzy:
                o.conflict(MISUSE, path, f"cp: cannot overwrite directory '{path}' with non-directory")
                return existing
            o.consumed_fuzzy()
        return src
    if existing is None:
        return merge_into(None, src, absent_fuzzy, path)
    if not existing.is_dir:
        if not existing.fuzzy:
            o.conflict(MISUSE, path, f"cp: cannot overwrite non-directory '{path}' with directory")
            return existing
        o.consumed_fuzzy()
        return merge_into(None, src, True, path)
    children = dict(existing.children)
    for name, child in src.children.items():
        merged = _cp_merge(o, children.get(name), child, existing.fuzzy, f"{path.rstrip('/')}/{name}")
        if merged is not None:
            children[name] = merged
    return replace(existing, children=children)


# -- mv ------------------------------------------------------------------------------

@COMMANDS.register("mv", integrity=COMPLETE)
def mock_mv(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="bfinTuvZ",
                         long=("force", "interactive", "no-clobber", "no-target-directory",
                               "update", "verbose", "strip-trailing-slashes", "debug"),
                         short_with_value="tS", long_with_value=("target-directory", "suffix", "backup"))
    if opts.unknown or opts.fuzzy:
        o.unknown_exit()
    sources, dest, need_dir = _split_targets(o, opts, "mv")
    if dest is None:
        return o.finish()
    dpath, dfuzzy = resolve(o.ctx, dest)
    if dfuzzy:
        o.consumed_fuzzy()
    if need_dir and not _ensure_target_dir(o, dpath, dest.text, "mv"):
        return o.finish()
    for src in sources:
        _mv_one(o, src, dest, dpath)
    return o.finish()


def _mv_one(o: Outcome, src: ExpandedValue, dest: ExpandedValue, dpath: str) -> None:
    spath, sfuzzy = resolve(o.ctx, src)
    sst = o.ctx.stat_container(spath)
    if sfuzzy or not sst.found:
        if sfuzzy or not sst.absent_precise:
            o.consumed_fuzzy()
        else:
            o.conflict(INNER, src.text, f"mv: cannot stat '{src.text}': No such file or directory")
            if not o.autofix:
                return
        target = _target_for(o, spath, dest, dpath, False)
        if target is not None:
            _place_fuzzy(o, target)
        return
    node = get_node(o.ctx.container, spath)
    if node.fuzzy and not node.is_dir:
        o.consumed_fuzzy()
    target = _target_for(o, spath, dest, dpath, node.is_dir)
    if target is None:
        return
    if target == spath:
        o.conflict(MISUSE, src.text, f"mv: '{src.text}' and '{dest.text}' are the same file")
        return
    if target.startswith(spath.rstrip("/") + "/"):
        o.conflict(MISUSE, src.text,
                   f"mv: cannot move '{src.text}' to a subdirectory of itself, '{dest.text}'")
        return
    state = _parent_state(o.ctx, target)
    if state == "missing":
        o.conflict(INNER, dest.text, f"mv: cannot move '{src.text}' to '{dest.text}': No such file or directory")
        if o.autofix:
            _place_fuzzy(o, target, kind_dir=node.is_dir)
        return
    if state == "unknown":
        o.consumed_fuzzy()
    existing = get_node(o.ctx.container, target)
    if existing is not None:
        problem = None
        if node.is_dir and not existing.is_dir:
            problem = "cannot overwrite non-directory with directory"
        elif not node.is_dir and existing.is_dir:
            problem = "cannot overwrite directory with non-directory"
        elif node.is_dir and existing.children:
            problem = "Directory not empty"
        if existing.fuzzy:
            o.consumed_fuzzy()
        elif problem:
            o.conflict(MISUSE, src.text, f"mv: cannot move '{src.text}' to '{dest.text}': {problem}")
            return
    tree = remove_node(o.ctx.container, spath)
    try:
        tree = put_node(tree, target, node)
    except ConflictFault:
        return
    o.ctx = o.ctx.evolve(container=tree)


# -- rm --------------------------------------------------------------------------------

@COMMANDS.register("rm", integrity=COMPLETE)
def mock_rm(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="dfiIrRv",
                         long=("force", "interactive", "recursive", "dir", "verbose",
                               "one-file-system", "no-preserve-root", "preserve-root"))
    if opts.unknown:
        o.unknown_exit()
    force = opts.has("f", "force")
    recursive = opts.has("r", "R", "recursive")
    if not opts.operands:
        if not force:
            o.conflict(MISUSE, "rm", "rm: missing operand")
        return o.finish()
    for op in opts.operands:
        path, fuzzy = resolve(o.ctx, op)
        if fuzzy:
            # unknown victims: whatever sits around the named path is now unknown
            if not force:
                o.consumed_fuzzy()
            around = parent_of(path) if op.pattern or op.text else path
            if get_node(o.ctx.container, around) is not None:
                o.ctx = o.ctx.evolve(container=fuzz_path(o.ctx.container, around))
            continue
        st = o.ctx.stat_container(path)
        if st.found:
            if path == "/":
                o.conflict(MISUSE, op.text, "rm: it is dangerous to operate recursively on '/'")
                continue
            node = get_node(o.ctx.container, path)
            if node.is_dir and not recursive:
                if opts.has("d", "dir") and not node.children and not node.fuzzy:
                    pass
                elif node.fuzzy:
                    o.consumed_fuzzy()
                else:
                    reason = "Directory not empty" if opts.has("d", "dir") else "Is a directory"
                    o.conflict(MISUSE, op.text, f"rm: cannot remove '{op.text}': {reason}")
                    if not o.autofix:
                        continue
            elif node.fuzzy and not recursive:
                o.consumed_fuzzy()
            o.ctx = o.ctx.evolve(container=remove_node(o.ctx.container, path))
        elif st.absent_precise:
            if not force:
                o.conflict(INNER, op.text, f"rm: cannot remove '{op.text}': No such file or directory")
        elif not force:
            o.consumed_fuzzy()
    return o.finish()


# -- cd / pwd ------------------------------------------------------------------------------

@COMMANDS.register("cd", integrity=COMPLETE)
def mock_cd(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    args = list(inv.args)
    while args and args[0].text in ("-L", "-P", "-e", "-@"):
        args.pop(0)
    if args and args[0].text == "--":
        args.pop(0)
    if not args:
        target = ctx.home()
    elif args[0].text == "-":
        o.ctx = ctx.evolve(workdir_fuzzy=True)
        o.unknown_exit()
        return o.finish()
    else:
        target = args[0]
    path, fuzzy = resolve(ctx, target)
    old = ctx.workdir
    if fuzzy:
        o.consumed_fuzzy()
        _place_fuzzy(o, path, kind_dir=True)
        o.ctx = o.ctx.evolve(workdir=path, workdir_fuzzy=True)
        return o.finish()
    st = ctx.stat_container(path)
    if st.found and st.is_dir:
        pass
    elif st.found:
        if st.fuzzy:
            o.consumed_fuzzy()
            _place(o, path, directory(fuzzy=True))
        else:
            o.conflict(MISUSE, target.text, f"cd: can't cd to {target.text}: Not a directory")
            if o.autofix:
                o.ctx = o.ctx.evolve(workdir=path, workdir_fuzzy=True)
            return o.finish()
    elif st.absent_precise:
        o.conflict(INNER, target.text, f"cd: can't cd to {target.text}: No such file or directory")
        if not o.autofix:
            return o.finish()
        _place_fuzzy(o, path, kind_dir=True)
    else:
        o.consumed_fuzzy()
        _place_fuzzy(o, path, kind_dir=True)
    vars_ = o.ctx.vars.set("OLDPWD", old).set("PWD", path)
    o.ctx = o.ctx.evolve(workdir=path, vars=vars_)
    return o.finish()


@COMMANDS.register("pwd", "echo", "printf", "true", ":", "sleep", "set", "umask", "hash",
                   integrity=COMPLETE)
def mock_noop(inv: Invocation, ctx: Context):
    """Commands with no effect on the build context that succeed."""
    return Outcome(ctx).finish()


# -- variables -------------------------------------------------------------------------------

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@COMMANDS.register("export", "readonly", integrity=COMPLETE)
def mock_export(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    for arg in inv.args:
        if arg.text.startswith("-") and not arg.fuzzy:
            continue
        name, eq, value = arg.text.partition("=")
        if not _NAME.match(name):
            if arg.fuzzy:
                o.consumed_fuzzy()
                o.ctx = o.ctx.evolve(vars=o.ctx.vars.fuzzed())
            else:
                o.conflict(MISUSE, arg.text, f"{inv.name}: {arg.text}: bad variable name")
            continue
        if eq:
            o.ctx = o.ctx.evolve(vars=o.ctx.vars.set(name, value, precise=not arg.fuzzy))
    return o.finish()


@COMMANDS.register("unset", integrity=COMPLETE)
def mock_unset(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    for arg in inv.args:
        if arg.text in ("-v", "-f"):
            continue
        if arg.fuzzy:
            o.ctx = o.ctx.evolve(vars=o.ctx.vars.fuzzed())
        elif _NAME.match(arg.text):
            o.ctx = o.ctx.evolve(vars=o.ctx.vars.unset(arg.text))
    return o.finish()


@COMMANDS.register("env", integrity=COMPLETE)
def mock_env(inv: Invocation, ctx: Context):

    args = list(inv.args)
    vars_ = ctx.vars
    unknown = False
    while args:
        t = args[0].text
        if t in ("-i", "--ignore-environment", "-"):
            vars_ = VariableMap.precise({})
        elif t in ("-u", "--unset") and len(args) > 1:
            args.pop(0)
            vars_ = vars_.unset(args[0].text)
        elif t.startswith("--unset="):
            vars_ = vars_.unset(t.partition("=")[2])
        elif t == "--":
            args.pop(0)
            break
        elif t.startswith("-"):
            unknown = True
        else:
            break
        args.pop(0)
    while args and "=" in args[0].text and _NAME.match(args[0].text.partition("=")[0]):
        name, _, value = args[0].text.partition("=")
        vars_ = vars_.set(name, value, precise=not args[0].fuzzy)
        args.pop(0)
    if not args:
        o = Outcome(ctx)
        if unknown:
            o.unknown_exit()
        return o.finish()
    result, after = dispatch_argv(args, ctx.evolve(vars=vars_))
    return result, after.evolve(vars=ctx.vars)


# -- chmod --------------------------------------------------------------------------------------

_SYMBOLIC = re.compile(r"([ugoa]*([-+=]([rwxXst]*|[ugo]))+|[-+=][0-7]+)(,([ugoa]*([-+=]([rwxXst]*|[ugo]))+|[-+=][0-7]+))*\Z")
_OCTAL = re.compile(r"[0-7]{1,4}\Z")


def _octal(text: str | None) -> int | None:
    if text and _OCTAL.match(text):
        return int(text, 8)
    return None


def apply_mode(spec: str, current: int | None, is_dir: bool = False) -> int | None:
    """New permission bits after ``chmod spec``; ``None`` when unknown."""
    if _OCTAL.match(spec):
        return int(spec, 8)
    if current is None:
        return None
    mode = current
    for clause in spec.split(","):
        m = re.match(r"([ugoa]*)(.*)", clause)
        who, actions = m.group(1) or "a", m.group(2)
        masks = {"u": 0o4700, "g": 0o2070, "o": 0o1007}
        scope = 0
        for w in who:
            scope |= 0o7777 if w == "a" else masks[w]
        for op, perms in re.findall(r"([-+=])([rwxXstugo0-7]*)", actions):
            bits = 0
            for p in perms:
                bits |= {"r": 0o444, "w": 0o222, "x": 0o111, "s": 0o6000, "t": 0o1000}.get(p, 0)
                if p == "X" and (is_dir or mode & 0o111):
                    bits |= 0o111
            bits &= scope
            if m.group(1) == "" and "w" in perms:
                bits &= ~0o022  # default umask
            if op == "+":
                mode |= bits
            elif op == "-":
                mode &= ~bits
            else:
                mode = (mode & ~scope) | bits
    return mode


@COMMANDS.register("chmod", integrity=COMPLETE)
def mock_chmod(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    recursive = False
    mode: ExpandedValue | None = None
    files: list[ExpandedValue] = []
    done = False
    for arg in inv.args:
        t = arg.text
        if done or not t.startswith("-") or t == "-":
            if mode is None:
                mode = arg
            else:
                files.append(arg)
        elif t == "--":
            done = True
        elif t.startswith("--"):
            if t == "--recursive":
                recursive = True
            elif t.startswith("--reference="):
                mode = ExpandedValue(t, fuzzy=True)
            elif t not in ("--verbose", "--changes", "--silent", "--quiet",
                           "--no-preserve-root", "--preserve-root"):
                o.unknown_exit()
        elif all(c in "Rcfv" for c in t[1:]):
            recursive = recursive or "R" in t
        elif mode is None and _SYMBOLIC.match(t):
            mode = arg
        else:
            # not every chmod takes every flag; stay silent rather than guess
            o.unknown_exit()
    if mode is None or not files:
        subject = mode.text if mode is not None else "chmod"
        o.conflict(MISUSE, subject, "chmod: missing operand")
        return o.finish()
    if mode.fuzzy:
        o.consumed_fuzzy()
    elif not (_OCTAL.match(mode.text) or _SYMBOLIC.match(mode.text)):
        o.conflict(MISUSE, mode.text, f"chmod: invalid mode: '{mode.text}'")
        return o.finish()
    for f in files:
        path, fuzzy = resolve(o.ctx, f)
        if fuzzy:
            o.consumed_fuzzy()
            continue
        st = o.ctx.stat_container(path)
        if st.absent_precise:
            o.conflict(INNER, f.text, f"chmod: cannot access '{f.text}': No such file or directory")
            if o.autofix:
                _place_fuzzy(o, path)
            continue
        if not st.found:
            o.consumed_fuzzy()
            continue
        new = None if mode.fuzzy else apply_mode(mode.text, st.mode, st.is_dir)
        o.ctx = o.ctx.evolve(container=set_mode(o.ctx.container, path, new, recursive))
    return o.finish()
