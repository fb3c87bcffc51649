from __future__ import annotations

import pytest

from dockmock.context import Kind, get_node, tree_from_paths
from dockmock.engine import check_source
from dockmock.faults import Status

WS = tree_from_paths(["app.py", "requirements.txt", "package.json", "run.sh", "data.tar.gz",
                      "src/a.js", "src/b.js"])


@pytest.fixture
def check(corpus_store):
    def _check(src, **kw):
        return check_source(src, WS, corpus_store, **kw)
    return _check


def found(report):
    return [(w.line, w.fault_type.code) for w in report.warnings]


def test_from_snapshot_seeds_env_and_workdir(check):
    report = check("FROM golang:1.16\n")
    ctx = report.context_final
    assert ctx.workdir == "/go"
    assert ctx.vars.lookup("HOME") == ("/root", True)
    assert "go" in ctx.executables


def test_from_unknown_image_is_fuzzy(check):
    report = check("FROM mycorp/base:1\nRUN cd /nope && frob\n")
    assert report.clean
    assert report.instruction_outcomes[0] == (1, Status.FUZZY)


def test_from_arg_expansion(check):
    report = check("ARG V=3.8\nFROM python:${V}\nRUN javac\n")
    assert found(report) == [(3, "command-not-found")]


def test_scratch_is_empty_and_precise(check):
    assert found(check("FROM scratch\nRUN echo hi\n")) == [(2, "command-not-found")]
    assert check('FROM scratch\nCOPY run.sh /\nCMD ["/run.sh"]\n').clean


def test_copy_places_files(check):
    ctx = check("FROM scratch\nCOPY src/ /app/\nCOPY app.py /app/main.py\n").context_final
    assert get_node(ctx.container, "/app/a.js").kind is Kind.REGULAR
    assert get_node(ctx.container, "/app/main.py") is not None


def test_copy_glob(check):
    assert check("FROM node:14\nWORKDIR /app\nCOPY package*.json ./\nRUN npm install\n").clean
    assert found(check("FROM node:14\nCOPY *.lock /app/\n")) == [(2, "outer-file-not-found")]


def test_copy_missing_source_reported_even_with_fuzzy_destination(check):
    # the destination directory is unknown, the build context is not
    report = check("FROM node:14\nARG DEST\nCOPY nope $DEST\n")
    assert found(report) == [(3, "outer-file-not-found")]


def test_copy_many_sources_needs_a_directory(check):
    assert found(check("FROM nginx:1.19\nCOPY app.py run.sh /srv\n")) == [(2, "instruction-misuse")]
    assert check("FROM nginx:1.19\nCOPY app.py run.sh /srv/\n").clean
    assert check("FROM nginx:1.19\nRUN mkdir /srv\nCOPY app.py run.sh /srv\n").clean


def test_add_url_and_archive(check):
    assert check("FROM python:3.8\nADD https://x/y.tgz /opt/\nRUN cd /opt\n").clean
    assert check("FROM python:3.8\nADD data.tar.gz /opt/data\nRUN cd /opt/data/any\n").clean


def test_copy_from_stage(check):
    src = "FROM python:3.8 AS b\nRUN mkdir /out\nFROM python:3.8\nCOPY --from=b /out /out\n"
    assert check(src).clean
    assert check(src.replace("--from=b", "--from=0")).clean
    assert found(check(src.replace("--from=b", "--from=nope"))) == [(4, "instruction-misuse")]
    assert check(src.replace("--from=b", "--from=nginx:1.19")).clean


def test_from_stage_alias_inherits_context(check):
    src = "FROM scratch AS base\nCOPY run.sh /run.sh\nFROM base\nCOPY app.py /run.sh/x\n"
    assert found(check(src)) == [(4, "instruction-misuse")]


def test_workdir_rules(check):
    assert found(check("FROM mysql:5.7\nCOPY app.py /db\nWORKDIR /db\n")) == [(3, "instruction-misuse")]
    ctx = check("FROM python:3.8\nWORKDIR /a\nWORKDIR b\n").context_final
    assert ctx.workdir == "/a/b"
    assert get_node(ctx.container, "/a/b").is_dir


def test_workdir_creates_a_known_empty_dir_under_assumption(check):
    src = "FROM python:3.8\nWORKDIR /srv\nRUN cd missing\n"
    assert found(check(src)) == [(3, "inner-file-not-found")]
    assert check(src, assume=False).clean


def test_env_and_arg(check):
    # substitution inside one ENV sees the values from before it
    ctx = check("FROM python:3.8\nENV A=/x B=${A}/y\nENV C=${A}/z\n").context_final
    assert ctx.vars.lookup("B") == ("/y", True)
    assert ctx.vars.lookup("C") == ("/x/z", True)
    ctx = check("ARG T=1\nFROM python:3.8\nARG T\nARG U\n").context_final
    assert ctx.vars.lookup("T") == ("1", True)
    assert not ctx.vars.is_precise("U")


def test_run_scope_does_not_leak_variables(check):
    ctx = check("FROM python:3.8\nRUN export X=1 && cd /tmp\n").context_final
    assert ctx.workdir == "/"
    assert not ctx.vars.is_precise("X") or ctx.vars.lookup("X")[0] is None


def test_shell_instruction(check):
    assert found(check("FROM python:3.8\nSHELL /bin/bash -c\n")) == [(2, "instruction-misuse")]
    assert found(check('FROM alpine:3.12\nSHELL ["/bin/bash", "-c"]\nRUN echo\n')) == \
        [(3, "command-not-found")]
    assert found(check('FROM python:3.8\nSHELL ["pwsh", "-c"]\nRUN anything\n')) == [(3, "command-not-found")]
    assert check('FROM mcr/pwsh:1\nSHELL ["pwsh", "-c"]\nRUN cd C:\\\\nope\n').clean


def test_run_parse_error(check):
    assert found(check('FROM python:3.8\nRUN echo "open\n')) == [(2, "syntax-mistake")]


def test_unknown_instruction(check):
    assert found(check("FROM python:3.8\nRUNN x\n")) == [(2, "syntax-mistake")]


def test_passive_instructions(check):
    report = check("FROM python:3.8\nLABEL a=b\nEXPOSE 80\nSTOPSIGNAL SIGTERM\nMAINTAINER me\n"
                   "USER nobody\nVOLUME /data\nONBUILD RUN cd /nope\n")
    assert report.clean
    assert report.context_final.user == "nobody"
    assert get_node(report.context_final.container, "/data").is_dir
