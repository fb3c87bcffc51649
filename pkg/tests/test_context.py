from __future__ import annotations

import pytest

from dockmock.context import (
    ABSENT_PRECISE,
    Context,
    ExecutableList,
    Kind,
    Lookup,
    Presence,
    VariableMap,
    basename,
    directory,
    fresh_context,
    fuzz_all,
    fuzz_path,
    get_node,
    join_contexts,
    join_trees,
    lookup_executable,
    normalize,
    parent_of,
    put_node,
    regular,
    remove_node,
    scan_workspace,
    stat,
    tree_from_paths,
)
from dockmock.errors import ConflictFault, IOFault

from conftest import precise_ctx


@pytest.mark.parametrize("path,cwd,want", [
    ("x", "/a/b", "/a/b/x"),
    ("../x", "/a/b", "/a/x"),
    ("/../x", "/", "/x"),
    ("./a//b/", "/", "/a/b"),
    (".", "/w", "/w"),
])
def test_normalize(path, cwd, want):
    assert normalize(path, cwd) == want


def test_parent_and_basename():
    assert parent_of("/a/b") == "/a"
    assert parent_of("/a") == "/"
    assert basename("/a/b/") == "b"


def test_stat_distinguishes_precise_and_fuzzy_absence():
    tree = tree_from_paths(["a/b.txt", "d/"])
    assert stat(tree, "/a/b.txt").presence is Presence.FOUND
    assert stat(tree, "/nope") == ABSENT_PRECISE
    fuzzy = fuzz_path(tree, "/d")
    assert stat(fuzzy, "/d/anything").presence is Presence.ABSENT_FUZZY
    # below a regular file nothing can exist
    assert stat(tree, "/a/b.txt/x").absent_precise


def test_put_node_creates_parents_and_rejects_files_as_dirs():
    tree = put_node(directory(), "/x/y/z", regular())
    assert get_node(tree, "/x/y").is_dir
    with pytest.raises(ConflictFault):
        put_node(tree, "/x/y/z/w", directory())


def test_trees_are_persistent():
    before = tree_from_paths(["a"])
    after = put_node(before, "/b", regular())
    assert get_node(before, "/b") is None
    assert get_node(remove_node(after, "/a"), "/a") is None
    assert get_node(after, "/a") is not None


def test_join_fuzzes_only_differences():
    a = tree_from_paths(["same", "only_a"])
    b = tree_from_paths(["same", "only_b/"])
    j = join_trees(a, b)
    assert j.fuzzy
    assert not j.children["same"].fuzzy
    assert j.children["only_a"].fuzzy and j.children["only_b"].fuzzy


def test_join_contexts_marks_diverging_variables():
    a = precise_ctx(env={"X": "1", "Y": "same"})
    b = a.evolve(vars=a.vars.set("X", "2"))
    j = join_contexts(a, b)
    assert not j.vars.is_precise("X")
    assert j.vars.is_precise("Y")


def test_fuzz_all_leaves_the_workspace_alone():
    ws = tree_from_paths(["src/main.c"])
    ctx = fuzz_all(precise_ctx(["x"], workspace=ws))
    assert ctx.workspace == ws
    assert ctx.container_fuzzy and ctx.workdir_fuzzy and ctx.executables.fuzzy
    assert not ctx.vars.is_precise("PATH")


def test_variable_map_tracking():
    v = VariableMap.precise({"A": "1"})
    assert v.lookup("A") == ("1", True)
    assert v.lookup("B") == (None, True)
    assert v.unset("A").lookup("A") == (None, True)
    assert v.set("C", "?", precise=False).lookup("C") == ("?", False)
    assert v.fuzzed().lookup("B") == (None, False)


def test_executable_lookup():
    ctx = precise_ctx(["usr/local/bin/tool", "opt/run.sh"], exes={"sh"})
    assert lookup_executable("sh", ctx) is Lookup.FOUND
    assert lookup_executable("tool", ctx) is Lookup.FOUND  # found on PATH
    assert lookup_executable("/opt/run.sh", ctx) is Lookup.FOUND
    assert lookup_executable("missing", ctx) is Lookup.NOT_FOUND
    assert lookup_executable("/opt/none", ctx) is Lookup.NOT_FOUND
    fuzzy = ctx.evolve(executables=ctx.executables.fuzzed())
    assert lookup_executable("missing", fuzzy) is Lookup.FUZZY


def test_fresh_context_is_fuzzy_about_the_base_image():
    ctx = fresh_context()
    assert ctx.vars.lookup("PATH")[1]
    assert ctx.vars.lookup("ANY") == (None, False)


def test_context_rejects_relative_workdir():
    with pytest.raises(ValueError):
        Context(workdir="app")


def test_scan_workspace_honours_dockerignore(tmp_path):
    (tmp_path / "src").mkdir()
    (tmp_path / "src" / "a.py").write_text("x")
    (tmp_path / "node_modules").mkdir()
    (tmp_path / "node_modules" / "dep.js").write_text("x")
    (tmp_path / "package.json").write_text('{"name": "a"}')
    (tmp_path / ".dockerignore").write_text("node_modules\n")
    tree = scan_workspace(tmp_path)
    assert get_node(tree, "/src/a.py").kind is Kind.REGULAR
    assert get_node(tree, "/node_modules") is None
    assert get_node(tree, "/package.json").content == '{"name": "a"}'


def test_scan_workspace_missing_dir(tmp_path):
    with pytest.raises(IOFault):
        scan_workspace(tmp_path / "nope")


def test_executable_list_add():
    exes = ExecutableList(frozenset({"a"})).add("b")
    assert "b" in exes and not exes.fuzzy
