"""Partial mocks: package managers, interpreters, fetchers and friends.

Each mock checks the few things it can judge precisely (a manifest that must
exist, a confirmation flag, an implicit dependency) and fuzzes the part of
the context it does not model. Those scopes are declared as data below, per
command and, where it matters, per subcommand.
"""

from __future__ import annotations

from dataclasses import replace

from dockmock.context import (
    Context,
    Lookup,
    basename,
    directory,
    get_node,
    lookup_executable,
    normalize,
    regular,
)
from dockmock.faults import FaultType
from dockmock.mocks.base import (
    COMMANDS,
    Integrity,
    Invocation,
    Outcome,
    apply_fuzz_scope,
    parse_options,
    resolve,
)
from dockmock.mocks.commands import _place, _place_fuzzy
from dockmock.mocks.dispatch import run_program
from dockmock.mocks.versions import mock_version_check
from dockmock.errors import SyntaxFault
from dockmock.shell import ExpandedValue, parse_shell

PARTIAL = Integrity.PARTIAL
INNER = FaultType.INNER_FILE_NOT_FOUND


def require(o: Outcome, value: ExpandedValue | str, message: str, *, kind_dir: bool = False,
            base: str | None = None) -> bool:
    """Check that a path the command reads exists.

    Precise absence is a conflict (and, with auto-fix, the path is created
    fuzzy); uncertain presence is consumed under the assumption.
    """
    if isinstance(value, str):
        value = ExpandedValue(value)
    if base is not None and not value.text.startswith("/"):
        path, fuzzy = normalize(value.text, base), value.fuzzy
    else:
        path, fuzzy = resolve(o.ctx, value)
    if fuzzy:
        o.consumed_fuzzy()
        return True
    st = o.ctx.stat_container(path)
    if st.found:
        if st.fuzzy and not st.is_dir:
            o.consumed_fuzzy()
        return True
    if st.absent_precise:
        o.conflict(INNER, value.text, message)
        if o.autofix:
            _place_fuzzy(o, path, kind_dir=kind_dir)
        return False
    o.consumed_fuzzy()
    return True


def _cwd_precise(ctx: Context) -> bool:
    return not ctx.workdir_fuzzy


# -- apt / yum / apk -------------------------------------------------------------------

_APT_CONFIRM = {"install", "upgrade", "dist-upgrade", "full-upgrade", "remove", "purge",
                "autoremove", "auto-remove", "build-dep", "reinstall"}
_APT_INSTALLS = _APT_CONFIRM - {"remove", "purge", "autoremove", "auto-remove"}
_YUM_CONFIRM = {"install", "update", "upgrade", "remove", "erase", "groupinstall", "reinstall",
                "localinstall", "downgrade", "autoremove"}


@COMMANDS.register("apt-get", "apt", "aptitude", integrity=PARTIAL, fuzz_scope=("path:/var",))
def mock_apt(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="yqfmsudVhb", long=(
        "yes", "assume-yes", "force-yes", "quiet", "no-install-recommends", "install-recommends",
        "no-install-suggests", "fix-broken", "fix-missing", "allow-unauthenticated", "purge",
        "auto-remove", "autoremove", "allow-downgrades", "allow-remove-essential",
        "allow-change-held-packages", "reinstall", "download-only", "simulate", "dry-run",
        "no-upgrade", "only-upgrade", "show-progress", "verbose-versions", "trivial-only"),
        short_with_value="oct", long_with_value=("option", "config-file", "target-release", "default-release"))
    yes = opts.has("y", "yes", "assume-yes", "force-yes")
    option = opts.values.get("o", "") + opts.values.get("option", "")
    if "Assume-Yes=" in option and "false" not in option.lower():
        yes = True
    if any(a.text.startswith("-qq") or a.text == "-q=2" for a in inv.args):
        # quiet level 2 implies --assume-yes
        yes = True
    sub = opts.operands[0].text if opts.operands else ""
    if sub in _APT_CONFIRM and not yes and not opts.has("s", "simulate", "dry-run", "download-only"):
        o.conflict(FaultType.REQUIRE_MANUAL_INPUT, f"{basename(inv.name)} {sub}",
                   f"{basename(inv.name)} {sub} waits for confirmation; add -y")
        if not o.autofix:
            return o.finish()
    if sub in _APT_INSTALLS:
        o.ctx = o.ctx.evolve(executables=o.ctx.executables.fuzzed())
    return o.finish()


@COMMANDS.register("yum", "dnf", "microdnf", integrity=PARTIAL, fuzz_scope=("path:/var",))
def mock_yum(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="yqvCbh", long=("assumeyes", "quiet", "nogpgcheck", "nodocs",
                                                         "setopt", "best", "allowerasing", "refresh"),
                         short_with_value="ceR", long_with_value=("enablerepo", "disablerepo", "installroot",
                                                                  "releasever", "setopt", "exclude"))
    sub = opts.operands[0].text if opts.operands else ""
    yes = opts.has("y", "assumeyes") or inv.name.endswith("microdnf")
    if sub in _YUM_CONFIRM and not yes:
        o.conflict(FaultType.REQUIRE_MANUAL_INPUT, f"{basename(inv.name)} {sub}",
                   f"{basename(inv.name)} {sub} waits for confirmation; add -y")
        if not o.autofix:
            return o.finish()
    if sub in _YUM_CONFIRM:
        o.ctx = o.ctx.evolve(executables=o.ctx.executables.fuzzed())
    return o.finish()


@COMMANDS.register("apk", integrity=PARTIAL, fuzz_scope=("path:/var", "path:/etc/apk"))
def mock_apk(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="qvUfi", long=("no-cache", "update-cache", "quiet", "virtual",
                                                        "purge", "upgrade", "force", "clean-protected"),
                         short_with_value="tX", long_with_value=("virtual", "repository", "root"))
    sub = opts.operands[0].text if opts.operands else ""
    if sub in ("add", "del", "upgrade", "fix"):
        o.ctx = o.ctx.evolve(executables=o.ctx.executables.fuzzed())
    return o.finish()


# -- language package managers ------------------------------------------------------------

# subcommand -> slices the mock gives up on
NPM_SCOPES: dict[str, tuple[str, ...]] = {
    "install": ("cwd:node_modules",),
    "ci": ("cwd:node_modules",),
    "global": ("executables", "path:/usr/local"),
    "run": ("workdir",),
}
_NPM_INSTALL = {"install", "i", "ci", "add", "isntall", "update", "up", "upgrade"}
_NPM_RUN = {"run", "run-script", "start", "test", "t", "build", "rebuild", "prune", "audit"}


@COMMANDS.register("npm", "yarn", "pnpm", integrity=PARTIAL)
def mock_npm(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="gDSEOPyq", long=(
        "global", "production", "save", "save-dev", "silent", "quiet", "no-optional", "unsafe-perm",
        "frozen-lockfile", "pure-lockfile", "no-audit", "no-fund", "legacy-peer-deps", "force",
        "no-progress", "non-interactive", "ignore-scripts", "prefer-offline", "verbose"),
        long_with_value=("prefix", "registry", "only", "network-timeout", "loglevel", "cache", "cwd"))
    tool = basename(inv.name)
    sub = opts.operands[0].text if opts.operands else ("install" if tool == "yarn" else "")
    packages = [a for a in opts.operands[1:]]
    is_global = opts.has("g", "global") or (tool == "yarn" and sub == "global")
    cwd = ctx.workdir
    if "prefix" in opts.values or "cwd" in opts.values:
        cwd = normalize(opts.values.get("prefix") or opts.values.get("cwd"), ctx.workdir)
    local_manifest = not is_global and (sub in _NPM_RUN or (sub in _NPM_INSTALL and not packages))
    if local_manifest:
        if _cwd_precise(ctx):
            require(o, "package.json", f"{tool} {sub}: no package.json in {cwd}", base=cwd)
            if sub == "ci":
                require(o, "package-lock.json", f"npm ci needs a package-lock.json in {cwd}", base=cwd)
        else:
            o.consumed_fuzzy()
    scope: tuple[str, ...] = ()
    if is_global:
        scope = NPM_SCOPES["global"]
    elif sub in _NPM_INSTALL:
        scope = ("path:" + normalize("node_modules", cwd),)
    elif sub in _NPM_RUN or sub == "exec":
        scope = NPM_SCOPES["run"]
    o.ctx = apply_fuzz_scope(o.ctx, scope)
    return o.finish()


_PIP_SCOPE = ("executables", "path:/usr/local", "path:/usr/lib", "path:/root/.cache")


@COMMANDS.register("pip", "pip3", "pip2", integrity=PARTIAL, fuzz_scope=_PIP_SCOPE)
def mock_pip(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="qvUIe", long=(
        "upgrade", "user", "no-cache-dir", "quiet", "verbose", "no-deps", "pre", "force-reinstall",
        "ignore-installed", "no-binary", "disable-pip-version-check", "no-warn-script-location",
        "editable", "no-build-isolation", "require-hashes", "break-system-packages", "system"),
        short_with_value="rcift", long_with_value=(
            "requirement", "constraint", "index-url", "extra-index-url", "find-links", "target",
            "trusted-host", "prefix", "root", "progress-bar", "timeout", "src"))
    for key in ("r", "requirement", "c", "constraint"):
        if key in opts.values:
            require(o, opts.values[key], f"pip: could not open requirements file {opts.values[key]}")
    sub = opts.operands[0].text if opts.operands else ""
    if sub == "install":
        for pkg in opts.operands[1:]:
            if pkg.text in (".", "./") or pkg.text.startswith(("./", "/")):
                _pip_local(o, pkg)
    return o.finish()


def _pip_local(o: Outcome, pkg: ExpandedValue) -> None:
    path, fuzzy = resolve(o.ctx, pkg)
    if fuzzy:
        o.consumed_fuzzy()
        return
    node = get_node(o.ctx.container, path)
    if node is None:
        require(o, pkg, f"pip: {pkg.text} does not exist", kind_dir=True)
        return
    if node.is_dir and not node.fuzzy and not any(
        n in node.children for n in ("setup.py", "pyproject.toml", "setup.cfg")
    ):
        o.conflict(INNER, pkg.text,
                   f"pip: directory {pkg.text} is not installable: no setup.py or pyproject.toml")


@COMMANDS.register("bundle", "bundler", integrity=PARTIAL,
                   fuzz_scope=("executables", "path:/usr/local/bundle"))
def mock_bundle(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="jV", long=("deployment", "frozen", "quiet", "system", "verbose",
                                                     "without", "local", "clean", "no-cache", "binstubs"),
                         short_with_value="j", long_with_value=("path", "jobs", "gemfile", "retry", "without", "with"))
    sub = opts.operands[0].text if opts.operands else "install"
    if sub not in ("install", "update", "exec", "check", "package", "lock", "config"):
        return o.finish()
    if sub == "config":
        return o.finish()
    gemfile = opts.values.get("gemfile")
    env_gemfile, precise = ctx.vars.lookup("BUNDLE_GEMFILE")
    if gemfile is None and env_gemfile:
        gemfile = env_gemfile
    elif gemfile is None and not precise:
        o.consumed_fuzzy()
        return o.finish()
    target = gemfile or "Gemfile"
    if require(o, target, f"bundle {sub}: could not locate {target}"):
        path, fuzzy = resolve(o.ctx, ExpandedValue(target))
        if not fuzzy:
            _merge_version(o, mock_version_check("bundle", o.ctx, manifest_dir=path.rsplit("/", 1)[0] or "/"))
    if sub == "exec":
        o.ctx = apply_fuzz_scope(o.ctx, ("all",))
    return o.finish()


def _merge_version(o: Outcome, result) -> None:
    if result.conflict:
        o.warnings.extend(result.warnings)
    elif result.fuzzy:
        o.unknown_exit()


@COMMANDS.register("gem", integrity=PARTIAL, fuzz_scope=("executables", "path:/usr/local"))
def mock_gem(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    return o.finish()


@COMMANDS.register("go", integrity=PARTIAL,
                   fuzz_scope=("workdir", "executables", "path:/go", "path:/root/go", "path:/root/.cache"))
def mock_go(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    sub = inv.args[0].text if inv.args else ""
    if sub == "get":
        found = lookup_executable("git", ctx)
        if found is Lookup.NOT_FOUND:
            o.conflict(FaultType.COMMAND_NOT_FOUND, "git", "go get fetches modules with git, which is not installed")
            if o.autofix:
                o.ctx = o.ctx.evolve(executables=o.ctx.executables.add("git"))
        elif found is Lookup.FUZZY:
            o.consumed_fuzzy()
    if sub in ("build", "install", "get", "run", "test", "mod", "generate", "vet") and _cwd_precise(ctx):
        _merge_version(o, mock_version_check("go", o.ctx))
    return o.finish()


# -- git ------------------------------------------------------------------------------------

@COMMANDS.register("git", integrity=PARTIAL, fuzz_scope=("workdir",))
def mock_git(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    args = list(inv.args)
    base = ctx.workdir
    while args and args[0].text.startswith("-"):
        flag = args.pop(0).text
        if flag in ("-C", "-c") and args:
            value = args.pop(0)
            if flag == "-C":
                base = normalize(value.text, base)
    if not args or args[0].text != "clone":
        return o.finish()
    opts = parse_options(args[1:], short="qvnl", long=("quiet", "verbose", "recursive", "recurse-submodules",
                                                       "single-branch", "no-checkout", "bare", "mirror",
                                                       "shallow-submodules", "no-tags"),
                         short_with_value="bjoc", long_with_value=("branch", "depth", "origin", "config",
                                                                   "jobs", "filter", "reference"))
    if not opts.operands:
        o.conflict(FaultType.COMMAND_MISUSE, "git clone", "git clone: you must specify a repository to clone")
        return o.finish()
    url = opts.operands[0]
    if len(opts.operands) > 1:
        dest = opts.operands[1]
    else:
        name = url.text.rstrip("/").rsplit("/", 1)[-1].rsplit(":", 1)[-1]
        dest = ExpandedValue(name[:-4] if name.endswith(".git") else name, url.fuzzy)
    if dest.fuzzy or url.fuzzy and len(opts.operands) == 1:
        o.consumed_fuzzy()
        return o.finish()
    path = normalize(dest.text, base)
    node = get_node(o.ctx.container, path)
    if node is not None and not node.fuzzy and (not node.is_dir or node.children):
        o.conflict(FaultType.COMMAND_MISUSE, dest.text,
                   f"git clone: destination path '{dest.text}' already exists and is not an empty directory")
        return o.finish()
    _place(o, path, directory(fuzzy=True))
    return o.finish()


# -- interpreters and sourcing ----------------------------------------------------------------

_INTERPRETERS = {
    "python": "cmW", "python3": "cmW", "python2": "cmW",
    "node": "erp", "ruby": "eIr", "perl": "eIM", "php": "rdf",
}


@COMMANDS.register(*_INTERPRETERS, integrity=PARTIAL, fuzz_scope=("all",))
def mock_python(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    name = basename(inv.name)
    name = name if name in _INTERPRETERS else "python"
    stop_flags = _INTERPRETERS[name]
    args = list(inv.args)
    for i, a in enumerate(args):
        t = a.text
        if t.startswith("-") and len(t) > 1:
            if name.startswith("python") and t == "-m" and i + 1 < len(args) and args[i + 1].text == "pip":
                return mock_pip(Invocation((ExpandedValue("pip"), *args[i + 2:])), ctx)
            if t[1:2] in stop_flags or t in ("--eval", "--print"):
                # inline program, module or option value: nothing to check
                return o.finish()
            continue
        require(o, a, f"{name}: can't open file '{a.text}': No such file or directory")
        break
    return o.finish()


@COMMANDS.register("sh", "bash", "dash", "ash", "zsh", integrity=PARTIAL)
def mock_sh(inv: Invocation, ctx: Context):
    """``sh -c SCRIPT`` runs the script through the mock shell; ``sh FILE``
    needs the file to exist and fuzzes everything."""
    args = list(inv.args)
    while args and args[0].text.startswith("-") and args[0].text not in ("-c",):
        args.pop(0)
    if args and args[0].text == "-c":
        if len(args) < 2:
            o = Outcome(ctx)
            o.conflict(FaultType.COMMAND_MISUSE, inv.name, f"{inv.name}: -c requires an argument")
            return o.finish()
        if args[1].fuzzy:
            o = Outcome(ctx)
            o.consumed_fuzzy()
            res, _ = o.finish()
            return res, apply_fuzz_scope(ctx, ("all",))
        try:
            program = parse_shell(args[1].text)
        except SyntaxFault as exc:
            o = Outcome(ctx)
            o.conflict(FaultType.SYNTAX_MISTAKE, inv.name, f"{inv.name} -c: {exc.reason}")
            return o.finish()
        result, after = run_program(program, ctx)
        return result, after.evolve(vars=ctx.vars, workdir=ctx.workdir, workdir_fuzzy=ctx.workdir_fuzzy)
    o = Outcome(ctx)
    o.unknown_exit()
    if args:
        require(o, args[0], f"{inv.name}: cannot open {args[0].text}: No such file")
    o.ctx = apply_fuzz_scope(o.ctx, ("all",))
    return o.finish()


@COMMANDS.register(".", "source", integrity=PARTIAL, fuzz_scope=("all",))
def mock_dot(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    if not inv.args:
        o.conflict(FaultType.COMMAND_MISUSE, inv.name, f"{inv.name}: filename argument required")
        return o.finish()
    script = inv.args[0]
    if "/" in script.text:
        require(o, script, f"{inv.name}: cannot open {script.text}: No such file")
    return o.finish()


# -- readers -------------------------------------------------------------------------------

@COMMANDS.register("ls", integrity=PARTIAL)
def mock_ls(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="aAlhdRrStF1iGnpsQXUuvcx",
                         long=("all", "almost-all", "human-readable", "recursive", "color", "directory"),
                         short_with_value="wTI", long_with_value=("color", "sort", "time-style", "format"))
    for op in opts.operands:
        require(o, op, f"ls: cannot access '{op.text}': No such file or directory")
    return o.finish()


@COMMANDS.register("cat", "wc", "md5sum", "sha1sum", "sha256sum", "sha512sum", "head", "tail",
                   integrity=PARTIAL)
def mock_reader(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="AbeEnstTuvlwmcLqzf", short_with_value="nc",
                         long=("quiet", "silent", "verbose", "follow", "check", "strict"),
                         long_with_value=("lines", "bytes"))
    if opts.unknown:
        o.unknown_exit()
    if opts.has("check", "follow"):
        o.unknown_exit()
    for op in opts.operands:
        if op.text == "-":
            continue
        require(o, op, f"{basename(inv.name)}: {op.text}: No such file or directory")
    return o.finish()


@COMMANDS.register("sed", integrity=PARTIAL)
def mock_sed(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    args = list(inv.args)
    script_given = False
    in_place = False
    files: list[ExpandedValue] = []
    i = 0
    while i < len(args):
        t = args[i].text
        if t in ("-e", "--expression", "-f", "--file") and i + 1 < len(args):
            script_given = True
            i += 2
            continue
        if t.startswith("-i") or t.startswith("--in-place"):
            in_place = True
        elif t.startswith("-") and len(t) > 1:
            if "e" in t[1:] and not t.startswith("--"):
                script_given = True
                i += 2
                continue
        elif not script_given:
            script_given = True
        else:
            files.append(args[i])
        i += 1
    for f in files:
        if require(o, f, f"sed: can't read {f.text}: No such file or directory") and in_place:
            path, fuzzy = resolve(o.ctx, f)
            node = get_node(o.ctx.container, path)
            if node is not None and not node.is_dir and node.content is not None:
                _place(o, path, replace(node, content=None))
    return o.finish()


@COMMANDS.register("chown", "chgrp", integrity=PARTIAL)
def mock_chown(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="RcfvhHLP", long=("recursive", "verbose", "changes", "silent",
                                                           "quiet", "dereference", "no-dereference",
                                                           "preserve-root", "no-preserve-root"),
                         long_with_value=("reference", "from"))
    if opts.unknown:
        o.unknown_exit()
    operands = opts.operands if "reference" in opts.values else opts.operands[1:]
    if not operands:
        o.conflict(FaultType.COMMAND_MISUSE, inv.name, f"{inv.name}: missing operand")
        return o.finish()
    # user and group names live in /etc/passwd, which is not tracked
    o.unknown_exit()
    for op in operands:
        require(o, op, f"{inv.name}: cannot access '{op.text}': No such file or directory")
    return o.finish()


@COMMANDS.register("ln", integrity=PARTIAL)
def mock_ln(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    opts = parse_options(inv.args, short="sfnTvrbiLP", long=("symbolic", "force", "no-dereference",
                                                             "verbose", "relative", "no-target-directory"),
                         short_with_value="tS", long_with_value=("target-directory", "suffix"))
    if opts.unknown:
        o.unknown_exit()
    ops = opts.operands
    if not ops:
        o.conflict(FaultType.COMMAND_MISUSE, "ln", "ln: missing file operand")
        return o.finish()
    symbolic = opts.has("s", "symbolic")
    force = opts.has("f", "force")
    target = ops[0]
    link = ops[1] if len(ops) == 2 else None
    if len(ops) > 2 or "t" in opts.values or "target-directory" in opts.values:
        o.unknown_exit()
        o.ctx = apply_fuzz_scope(o.ctx, ("workdir",))
        return o.finish()
    if not symbolic:
        require(o, target, f"ln: failed to access '{target.text}': No such file or directory")
    if link is None:
        link = ExpandedValue(basename(target.text) or target.text, target.fuzzy)
    path, fuzzy = resolve(o.ctx, link)
    if fuzzy:
        o.consumed_fuzzy()
        return o.finish()
    st = o.ctx.stat_container(path)
    if st.found and st.is_dir and not opts.has("n", "no-dereference", "T", "no-target-directory"):
        path = normalize(basename(target.text), path)
        st = o.ctx.stat_container(path)
    if st.found and not force:
        if st.fuzzy:
            o.consumed_fuzzy()
        else:
            o.conflict(FaultType.COMMAND_MISUSE, link.text, f"ln: failed to create link '{link.text}': File exists")
            return o.finish()
    parent = o.ctx.stat_container(path.rsplit("/", 1)[0] or "/")
    if parent.absent_precise or parent.precise_regular:
        o.conflict(INNER, link.text, f"ln: failed to create link '{link.text}': No such file or directory")
        return o.finish()
    if not (parent.found and parent.is_dir):
        o.consumed_fuzzy()
    _place(o, path, regular(fuzzy=True, mode=None))
    return o.finish()


# -- fetchers and archives -----------------------------------------------------------------

@COMMANDS.register("curl", integrity=PARTIAL)
def mock_curl(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="sSfLkIvOJRiq#", long=("silent", "show-error", "fail", "location",
                                                                "insecure", "remote-name", "compressed",
                                                                "create-dirs", "retry-connrefused"),
                         short_with_value="oHdXuAeEmrwxCTFzUYyb", long_with_value=(
                             "output", "header", "data", "request", "user", "retry", "max-time",
                             "connect-timeout", "proto", "tlsv1.2", "user-agent", "cacert", "url"))
    out = opts.values.get("o") or opts.values.get("output")
    if out and out != "-":
        path, fuzzy = resolve(o.ctx, ExpandedValue(out))
        parent = o.ctx.stat_container(path.rsplit("/", 1)[0] or "/")
        if not fuzzy and (parent.absent_precise or parent.precise_regular) and not opts.has("create-dirs"):
            o.conflict(INNER, out, f"curl: (23) failed writing to {out}: no such directory")
            if not o.autofix:
                return o.finish()
        _place(o, path, _fuzzy_file())
    elif opts.has("O", "remote-name", "J"):
        o.ctx = apply_fuzz_scope(o.ctx, ("workdir",))
    return o.finish()


@COMMANDS.register("wget", integrity=PARTIAL)
def mock_wget(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="qvcNnrkpmSx", long=("quiet", "verbose", "no-check-certificate",
                                                              "continue", "no-verbose", "progress",
                                                              "show-progress", "recursive"),
                         short_with_value="OPtTUe", long_with_value=(
                             "output-document", "directory-prefix", "tries", "timeout", "user-agent",
                             "header", "progress", "user", "password"))
    out = opts.values.get("O") or opts.values.get("output-document")
    if out and out != "-":
        _place(o, resolve(o.ctx, ExpandedValue(out))[0], _fuzzy_file())
    elif out != "-":
        prefix = opts.values.get("P") or opts.values.get("directory-prefix")
        scope = ("path:" + normalize(prefix, ctx.workdir),) if prefix else ("workdir",)
        o.ctx = apply_fuzz_scope(o.ctx, scope)
    return o.finish()


def _fuzzy_file():
    return regular(fuzzy=True, mode=None)


@COMMANDS.register("tar", integrity=PARTIAL)
def mock_tar(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    args = [a.text for a in inv.args]
    if args and not args[0].startswith("-"):
        # traditional bundled form: tar xzf archive
        args = ["-" + args[0]] + args[1:]
    extract = create = False
    archive = None
    target = None
    i = 0
    while i < len(args):
        t = args[i]
        if t.startswith("--"):
            name, eq, value = t[2:].partition("=")
            if name in ("extract", "get"):
                extract = True
            elif name == "create":
                create = True
            elif name == "file":
                archive = value if eq else (args[i + 1] if i + 1 < len(args) else None)
                i += 0 if eq else 1
            elif name == "directory":
                target = value if eq else (args[i + 1] if i + 1 < len(args) else None)
                i += 0 if eq else 1
        elif t.startswith("-") and len(t) > 1:
            letters = t[1:]
            extract |= "x" in letters
            create |= "c" in letters
            if "f" in letters:
                rest = letters[letters.index("f") + 1:]
                if rest:
                    archive = rest
                elif i + 1 < len(args):
                    archive = args[i + 1]
                    i += 1
            if letters == "C" and i + 1 < len(args):
                target = args[i + 1]
                i += 1
        i += 1
    if extract and archive and archive != "-":
        require(o, archive, f"tar: {archive}: Cannot open: No such file or directory")
    if target:
        require(o, target, f"tar: {target}: Cannot open: No such file or directory", kind_dir=True)
    if extract:
        scope = ("path:" + normalize(target, ctx.workdir),) if target else ("workdir",)
        o.ctx = apply_fuzz_scope(o.ctx, scope)
    elif create and archive and archive != "-":
        _place(o, resolve(o.ctx, ExpandedValue(archive))[0], _fuzzy_file())
    return o.finish()


@COMMANDS.register("unzip", integrity=PARTIAL)
def mock_unzip(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    opts = parse_options(inv.args, short="oqnjlvtaCLX", short_with_value="dx", permute=True)
    if opts.operands:
        require(o, opts.operands[0], f"unzip: cannot find or open {opts.operands[0].text}")
    dest = opts.values.get("d")
    o.ctx = apply_fuzz_scope(o.ctx, ("path:" + normalize(dest, ctx.workdir),) if dest else ("workdir",))
    return o.finish()


# -- commands with a fixed, declared scope ----------------------------------------------------

def _unknown_exit(inv: Invocation, ctx: Context):
    o = Outcome(ctx)
    o.unknown_exit()
    return o.finish()


# command -> slices it may change; the empty tuple marks read-only tools
SIMPLE_SCOPES: dict[str, tuple[str, ...]] = {
    "useradd": ("path:/etc", "path:/home"),
    "adduser": ("path:/etc", "path:/home"),
    "groupadd": ("path:/etc",),
    "addgroup": ("path:/etc",),
    "usermod": ("path:/etc", "path:/home"),
    "chpasswd": ("path:/etc",),
    "ldconfig": ("path:/etc",),
    "locale-gen": ("path:/etc", "path:/usr/lib/locale"),
    "update-ca-certificates": ("path:/etc", "path:/usr/local/share/ca-certificates"),
    "update-alternatives": ("path:/etc", "executables"),
    "dpkg-reconfigure": ("path:/etc",),
    "test": (), "[": (), "false": (), "which": (), "command": (), "type": (), "id": (),
    "whoami": (), "uname": (), "date": (), "grep": (), "egrep": (), "fgrep": (), "nproc": (),
    "locale": (), "stat": (), "file": (), "readlink": (), "dirname": (), "basename": (),
    "expr": (), "sort": (), "uniq": (), "cut": (), "tr": (), "diff": (), "cmp": (),
}
for _name, _scope in SIMPLE_SCOPES.items():
    COMMANDS.register(_name, integrity=PARTIAL, fuzz_scope=_scope)(_unknown_exit)
