from __future__ import annotations

import pytest

from dockmock.context import VariableMap
from dockmock.errors import SyntaxFault
from dockmock.shell import (
    CommandSub,
    ExpandedValue,
    OpaqueNode,
    Quoted,
    SimpleCommand,
    Subshell,
    Tilde,
    VarRef,
    expand_fields,
    expand_word,
    parse_shell,
    parse_word,
)

VARS = VariableMap.precise({"A": "x y", "B": "b", "HOME": "/root"})


def fields(text, vars=VARS):
    return [f.text for f in expand_fields(parse_word(text), vars)]


def test_and_or_lists_and_terminators():
    prog = parse_shell("a && b || c; d &")
    first, second = prog.items
    assert first.operators == ["&&", "||"]
    assert first.terminator == ";"
    assert second.asynchronous


def test_pipeline_negation_and_subshell():
    prog = parse_shell("! (cd x; ls) | grep y")
    pipe = prog.items[0].pipelines[0]
    assert pipe.negated
    assert isinstance(pipe.commands[0], Subshell)
    assert isinstance(pipe.commands[1], SimpleCommand)
    assert len(prog.commands()) == 4


def test_assignments_and_redirects():
    cmd = parse_shell("A=1 B=2 make >out 2>&1 </dev/null").items[0].pipelines[0].commands[0]
    assert [a for a, _ in cmd.assignments] == ["A", "B"]
    assert [(r.op, r.fd) for r in cmd.redirects] == [(">", None), (">&", 2), ("<", None)]
    assert cmd.name == "make"


def test_compound_commands_become_opaque():
    prog = parse_shell("if true; then a; fi; for i in 1 2; do b; done; f() { c; }")
    kinds = [c.kind for c in prog.commands() if isinstance(c, OpaqueNode)]
    assert kinds == ["if", "for", "function"]


def test_word_segments():
    w = parse_shell('echo "$HOME/x"$(date)~').items[0].pipelines[0].commands[0].words[1]
    assert isinstance(w.segments[0], Quoted)
    assert isinstance(w.segments[0].parts[0], VarRef)
    assert isinstance(w.segments[1], CommandSub)


def test_leading_tilde_in_shell_words():
    w = parse_shell("cd ~/src").items[0].pipelines[0].commands[0].words[1]
    assert isinstance(w.segments[0], Tilde)
    assert [f.text for f in expand_fields(w, VARS)] == ["/root/src"]


def test_line_continuation_and_comments():
    prog = parse_shell("echo a \\\n  b # trailing\necho c")
    assert len(prog.items) == 2
    assert len(prog.items[0].pipelines[0].commands[0].words) == 3


@pytest.mark.parametrize("src", ['echo "x', "echo 'x", "a &&", "| a", "echo $(x", "(a"])
def test_syntax_errors(src):
    with pytest.raises(SyntaxFault):
        parse_shell(src)


def test_field_splitting():
    assert fields("$A") == ["x", "y"]
    assert fields('"$A"') == ["x y"]
    assert fields("'$A'") == ["$A"]
    assert fields("pre$A") == ["prex", "y"]


def test_parameter_operators():
    assert fields("${B:-z}") == ["b"]
    assert fields("${C:-z}") == ["z"]
    assert fields("${B%b}c") == ["c"]
    assert fields("${#B}") == ["1"]


def test_unset_precise_variable_expands_to_nothing():
    assert fields("$NOPE") == []
    assert fields('"$NOPE"') == [""]


def test_untracked_variable_is_fuzzy():
    vars = VariableMap.precise({"A": "1"}).fuzzed()
    [f] = expand_fields(parse_word("$A/x"), vars)
    assert f.fuzzy


def test_command_substitution_is_fuzzy():
    [f] = expand_fields(parse_word("$(uname -m)"), VARS)
    assert f.fuzzy and f.text == ""


def test_glob_patterns_escape_quoted_parts():
    [f] = expand_fields(parse_word('"a*"*.txt'), VARS)
    assert f.pattern == "a[*]*.txt"
    assert expand_fields(parse_word('"*"'), VARS)[0].pattern is None


def test_expand_word_keeps_one_value():
    assert expand_word(parse_word("$A"), VARS) == ExpandedValue("x y")
