from __future__ import annotations

import time

from dockmock.context import tree_from_paths
from dockmock.dockerfile import parse_dockerfile
from dockmock.engine import analyze, analyze_multi_stage, check_source
from dockmock.faults import FaultType, Status

WS = tree_from_paths(["Gemfile", "app.rb", "index.js"],
                     {"Gemfile": "source 'https://rubygems.org'\nruby '2.7.1'\n"})


def found(report):
    return [(w.line, w.fault_type.code) for w in report.warnings]


def test_no_from_is_a_syntax_mistake(corpus_store):
    assert found(check_source("", WS, corpus_store)) == [(1, "syntax-mistake")]
    assert found(check_source("\n\nRUN echo\n", WS, corpus_store)) == [(3, "syntax-mistake")]


def test_instruction_before_from(corpus_store):
    report = check_source("RUN echo\nFROM python:3.8\n", WS, corpus_store)
    assert found(report) == [(1, "syntax-mistake")]


def test_parse_failure_becomes_one_warning(corpus_store):
    report = check_source('FROM a\nRUN ["x",\n', WS, corpus_store)
    assert found(report) == [(2, "syntax-mistake")]
    assert report.warnings[0].subject == "Dockerfile"


def test_outcomes_cover_every_instruction(corpus_store):
    report = check_source("ARG X=1\nFROM python:3.8\nRUN cd /\nCOPY nope /\n", WS, corpus_store)
    assert [line for line, _ in report.instruction_outcomes] == [1, 2, 3, 4]
    assert report.instruction_outcomes[-1] == (4, Status.CONFLICT)


def test_autofix_reports_every_fault_in_one_pass(corpus_store):
    src = "FROM python:3.8\nCOPY a /a\nCOPY b /b\nRUN cd /a && cd /b\nWORKDIR /srv\nRUN cd nope\n"
    assert found(check_source(src, WS, corpus_store)) == [
        (2, "outer-file-not-found"), (3, "outer-file-not-found"), (6, "inner-file-not-found")]


def test_version_mismatch_reported_once_at_from(corpus_store):
    src = "FROM ruby:2.6\nCOPY Gemfile .\nRUN bundle install\nRUN bundle exec ruby app.rb\n"
    report = check_source(src, WS, corpus_store)
    assert found(report) == [(1, "image-version-mismatch")]


def test_runtime_commands_checked_per_stage(corpus_store):
    src = ('FROM node:12 AS a\nCMD ["nodemon"]\n'
           'FROM node:12\nCMD npm start && nodemon\n')
    assert found(check_source(src, WS, corpus_store)) == [(2, "command-not-found"), (4, "command-not-found")]


def test_only_last_cmd_counts(corpus_store):
    src = 'FROM node:12\nCMD ["nodemon"]\nCMD ["node", "index.js"]\n'
    assert check_source(src, WS, corpus_store).clean


def test_entrypoint_masks_cmd(corpus_store):
    src = 'FROM python:3.8\nENTRYPOINT ["python"]\nCMD ["app.py"]\n'
    assert check_source(src, WS, corpus_store).clean


def test_healthcheck(corpus_store):
    src = "FROM nginx:1.19\nHEALTHCHECK --interval=5s CMD wget -q localhost || exit 1\n"
    assert found(check_source(src, WS, corpus_store)) == [(2, "command-not-found")]
    assert check_source("FROM nginx:1.19\nHEALTHCHECK NONE\n", WS, corpus_store).clean


def test_without_priors_nothing_is_known_about_the_image(corpus_store):
    src = "FROM python:3.8\nRUN javac Main.java\n"
    assert found(check_source(src, WS, corpus_store)) == [(2, "command-not-found")]
    assert check_source(src, WS, corpus_store, use_priors=False).clean
    assert check_source(src, WS, None).clean


def test_analyze_multi_stage_matches_analyze(corpus_store):
    ast = parse_dockerfile("FROM python:3.8 AS b\nRUN mkdir /o\nFROM scratch\nCOPY --from=b /o /o\n")
    a = analyze(ast, WS, corpus_store)
    b = analyze_multi_stage(ast, WS, corpus_store)
    assert a.warnings == b.warnings
    assert a.instruction_outcomes == b.instruction_outcomes


def test_warnings_sorted_and_deduplicated(corpus_store):
    src = "FROM python:3.8\nRUN cd /a; cd /a\nCOPY x /x\nCOPY x /y\n"
    report = check_source(src, WS, corpus_store)
    lines = [w.line for w in report.warnings]
    assert lines == sorted(lines)
    assert len({w.key for w in report.warnings}) == len(report.warnings)
    assert all(w.fault_type is FaultType.OUTER_FILE_NOT_FOUND for w in report.warnings)


def test_large_dockerfile_is_fast(corpus_store):
    body = "".join(f"RUN mkdir -p /d{k} && cd /d{k} && touch f && cp f g\n" for k in range(500))
    start = time.perf_counter()
    report = check_source("FROM python:3.8\n" + body, WS, corpus_store)
    assert report.clean
    assert time.perf_counter() - start < 10
