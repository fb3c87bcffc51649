"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed together at the
end of the run (see ``conftest.py``). Run on its own with::

    pytest tests/test_acceptance.py -v
"""

from __future__ import annotations

import json
import random
import shutil
import time

import pytest

from dockmock.context import scan_workspace
from dockmock.engine import check_source
from dockmock.errors import SyntaxFault
from dockmock.faults import FaultType, Status
from dockmock.harness import evaluate

from conftest import CORPUS, record_criterion, run
from randomized import random_context, random_script
from shadow import compare, random_sequence

GOLDENS = CORPUS / "goldens"


def analyze_case(name, store):
    case = GOLDENS / name
    start = time.perf_counter()
    report = check_source((case / "Dockerfile").read_bytes(), scan_workspace(case), store)
    return report, time.perf_counter() - start


def found(report):
    return [(w.line, w.fault_type.code) for w in report.warnings]


@pytest.fixture
def criterion(request):
    def _record(ok: bool, detail: str) -> None:
        record_criterion(request.node.name, ok, detail)
        assert ok, detail
    return _record


def test_golden_missing_copy_prefix(corpus_store, criterion):
    report, took = analyze_case("copy-prefix", corpus_store)
    fixed, took_fixed = analyze_case("copy-prefix-fixed", corpus_store)
    outer = FaultType.OUTER_FILE_NOT_FOUND.code
    ok = (found(report) == [(4, outer), (5, outer)]
          and fixed.clean and max(took, took_fixed) < 1.0)
    criterion(ok, f"broken={found(report)} fixed={found(fixed)} slowest={max(took, took_fixed):.3f}s")


def test_golden_workdir_over_file(corpus_store, criterion):
    report, took = analyze_case("workdir-over-file", corpus_store)
    fixed, took_fixed = analyze_case("workdir-reordered", corpus_store)
    ok = (found(report) == [(3, FaultType.INSTRUCTION_MISUSE.code)]
          and fixed.clean and max(took, took_fixed) < 1.0)
    criterion(ok, f"broken={found(report)} reordered={found(fixed)} slowest={max(took, took_fixed):.3f}s")


# fault type -> (required detections, out of at least this many labels)
CAPABILITY = {
    FaultType.SYNTAX_MISTAKE: "all",
    FaultType.INSTRUCTION_MISUSE: 1,
    FaultType.COMMAND_MISUSE: 1,
    FaultType.COMMAND_NOT_FOUND: 1,
    FaultType.OUTER_FILE_NOT_FOUND: "all",
    FaultType.INNER_FILE_NOT_FOUND: 1,
    FaultType.IMAGE_VERSION_MISMATCH: "all",
    FaultType.IMAGE_NOT_FOUND: 0,
    FaultType.PERMISSION_DENIED: 0,
    FaultType.REQUIRE_MANUAL_INPUT: 1,
}


def test_capability_matrix(criterion):
    metrics = evaluate(CORPUS / "capability.json")
    cases = json.loads((CORPUS / "capability.json").read_text())
    labels = {ft: 0 for ft in FaultType}
    for case in cases:
        for label in case["labels"]:
            labels[FaultType.parse(label["fault_type"])] += 1
    problems = []
    for ft, need in CAPABILITY.items():
        got = metrics.detected(ft)
        if labels[ft] < 2:
            problems.append(f"{ft.code}: only {labels[ft]} labeled cases")
        if need == "all" and got != labels[ft]:
            problems.append(f"{ft.code}: {got}/{labels[ft]}")
        elif need == 0 and got != 0:
            problems.append(f"{ft.code}: expected no detections, got {got}")
        elif isinstance(need, int) and need and got < need:
            problems.append(f"{ft.code}: {got}/{labels[ft]} < {need}")
    # undetectable types must stay silent, not just unmatched
    for r in metrics.cases:
        if r.name.startswith("inf-") and r.warnings:
            problems.append(f"{r.name}: {len(r.warnings)} warnings")
    summary = " ".join(f"{ft.code}={metrics.detected(ft)}/{labels[ft]}" for ft in CAPABILITY)
    criterion(not problems, "; ".join(problems) or summary)


def test_fuzzy_results_never_carry_warnings(criterion):
    rng = random.Random(20261017)
    invocations = fuzzy = bad = 0
    while invocations < 10_000:
        ctx = random_context(rng)
        try:
            result, _ = run(random_script(rng), ctx)
        except SyntaxFault:
            continue
        invocations += 1
        if result.status is Status.FUZZY:
            fuzzy += 1
            bad += bool(result.warnings)
    criterion(bad == 0 and fuzzy > 1000,
              f"{invocations} invocations, {fuzzy} fuzzy, {bad} fuzzy with warnings")


@pytest.mark.skipif(shutil.which("dash") is None and shutil.which("sh") is None, reason="needs a POSIX shell")
def test_shadow_execution_matches_dash(criterion):
    rng = random.Random(7)
    start = time.perf_counter()
    mismatched = []
    for k in range(100):
        seq = random_sequence(rng, max_len=20)
        problems = compare(seq)
        if problems:
            mismatched.append((k, problems[0]))
    took = time.perf_counter() - start
    criterion(not mismatched and took < 60,
              f"{100 - len(mismatched)}/100 sequences agree in {took:.1f}s"
              + (f"; first mismatch {mismatched[0]}" if mismatched else ""))


def test_clean_corpus_has_no_diagnostics(criterion):
    metrics = evaluate(CORPUS / "clean.json")
    noisy = [(r.name, [(w.line, w.fault_type.code) for w in r.warnings]) for r in metrics.cases if r.warnings]
    criterion(len(metrics.cases) >= 20 and not noisy,
              f"{len(metrics.cases)} projects, noisy={noisy}")


def test_ablations_lose_detections(criterion):
    full = evaluate(CORPUS / "capability.json")
    no_assume = evaluate(CORPUS / "capability.json", assume=False)
    no_priors = evaluate(CORPUS / "capability.json", use_priors=False)
    inner, cnf = FaultType.INNER_FILE_NOT_FOUND, FaultType.COMMAND_NOT_FOUND
    ok = (no_assume.detected(inner) < full.detected(inner)
          and no_priors.detected(cnf) < full.detected(cnf))
    criterion(ok, f"inner-file-not-found {full.detected(inner)} -> {no_assume.detected(inner)} "
                  f"without assumption; command-not-found {full.detected(cnf)} -> "
                  f"{no_priors.detected(cnf)} without snapshots")


def test_harness_arithmetic(tmp_path, criterion):
    # three true positives, one false positive, two missed labels
    (tmp_path / "a").mkdir()
    (tmp_path / "a" / "Dockerfile").write_text(
        "FROM scratch\nCOPY one /one\nCOPY two /two\nCOPY three /three\nCOPY four /four\n")
    (tmp_path / "b").mkdir()
    (tmp_path / "b" / "Dockerfile").write_text("FROM scratch\nCOPY . /\n")
    manifest = [
        {"name": "a", "dockerfile": "a/Dockerfile", "labels": [
            {"line": 2, "fault_type": "outer-file-not-found"},
            {"line": 3, "fault_type": "outer-file-not-found"},
            {"line": 4, "fault_type": "outer-file-not-found"},
        ]},
        {"name": "b", "dockerfile": "b/Dockerfile", "labels": [
            {"line": 2, "fault_type": "permission-denied"},
            {"line": 1, "fault_type": "image-not-found"},
        ]},
    ]
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    m = evaluate(tmp_path / "m.json")
    ok = (m.tp, m.fp, m.fn) == (3, 1, 2) and m.recall == 0.6 and m.precision == 0.75
    criterion(ok, f"tp={m.tp} fp={m.fp} fn={m.fn} recall={m.recall} precision={m.precision}")
