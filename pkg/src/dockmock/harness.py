"""Score the detector against a labeled corpus.

A manifest is a JSON array of cases::

    [{"name": "copy-prefix", "dockerfile": "copy-prefix/Dockerfile", "workspace": "copy-prefix",
      "labels": [{"line": 4, "fault_type": "outer-file-not-found"}],
      "priors": "priors.json"}]

Relative paths are resolved against the manifest's directory. A warning
matches a label when both the line and the fault type are equal; each
label is matched at most once.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from dockmock.context import scan_workspace
from dockmock.engine import check_source
from dockmock.errors import DockmockError, ManifestFault
from dockmock.faults import FaultType, MockWarning
from dockmock.priors import PriorStore

MATCHING_RULE = "a warning matches a label iff fault type and line are both equal"


@dataclass(frozen=True)
class Label:
    line: int
    fault_type: FaultType


@dataclass(frozen=True)
class CorpusCase:
    name: str
    dockerfile: Path
    workspace: Path
    labels: tuple[Label, ...] = ()
    priors: Path | None = None


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other: Counts) -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None


@dataclass
class CaseResult:
    name: str
    warnings: list[MockWarning]
    counts: Counts
    per_fault_type: dict[FaultType, Counts]


@dataclass
class Metrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    per_fault_type: dict[FaultType, Counts] = field(default_factory=dict)
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    def detected(self, fault_type: FaultType) -> int:
        return self.per_fault_type.get(fault_type, Counts()).tp

    def to_dict(self) -> dict:
        return {
            "matching": MATCHING_RULE,
            "cases": len(self.cases),
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "recall": self.recall,
            "precision": self.precision,
            "per_fault_type": {
                ft.code: {"tp": c.tp, "fp": c.fp, "fn": c.fn, "recall": c.recall, "precision": c.precision}
                for ft, c in sorted(self.per_fault_type.items(), key=lambda kv: kv[0].code)
            },
        }

    def to_text(self) -> str:
        def ratio(v: float | None) -> str:
            return "N/A" if v is None else f"{v:.3f}"

        lines = [
            f"matching: {MATCHING_RULE}",
            f"cases: {len(self.cases)}",
            f"tp={self.tp} fp={self.fp} fn={self.fn} recall={ratio(self.recall)} "
            f"precision={ratio(self.precision)}",
        ]
        for ft, c in sorted(self.per_fault_type.items(), key=lambda kv: kv[0].code):
            lines.append(f"  {ft.code:24} tp={c.tp} fp={c.fp} fn={c.fn} "
                         f"recall={ratio(c.recall)} precision={ratio(c.precision)}")
        return "\n".join(lines)


def score(warnings: Iterable[MockWarning], labels: Iterable[Label]) -> tuple[Counts, dict[FaultType, Counts]]:
    """Match warnings to labels on ``(line, fault_type)``."""
    want = Counter((lb.line, lb.fault_type) for lb in labels)
    got = Counter((w.line, w.fault_type) for w in warnings)
    total = Counts()
    per: dict[FaultType, Counts] = {}
    for key in set(want) | set(got):
        matched = min(want[key], got[key])
        c = Counts(matched, got[key] - matched, want[key] - matched)
        total.add(c)
        per.setdefault(key[1], Counts()).add(c)
    return total, per


def load_manifest(manifest: str | os.PathLike) -> list[CorpusCase]:
    path = Path(manifest)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, ValueError) as exc:
        raise ManifestFault(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(data, list):
        raise ManifestFault(f"manifest {path} must be a JSON array of cases")
    base = path.parent
    return [_case(entry, base, k) for k, entry in enumerate(data)]


def _case(entry: object, base: Path, index: int) -> CorpusCase:
    if not isinstance(entry, Mapping):
        raise ManifestFault(f"case #{index} is not an object")
    name = str(entry.get("name", f"case-{index}"))
    try:
        dockerfile = base / entry["dockerfile"]
        workspace = base / entry.get("workspace", str(Path(entry["dockerfile"]).parent))
        labels = tuple(Label(int(lb["line"]), FaultType.parse(str(lb["fault_type"])))
                       for lb in entry.get("labels", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestFault(f"case {name!r}: malformed entry ({exc})") from exc
    priors = base / entry["priors"] if entry.get("priors") else None
    for p in (dockerfile, workspace, priors):
        if p is not None and not p.exists():
            raise ManifestFault(f"case {name!r}: {p} does not exist")
    return CorpusCase(name, dockerfile, workspace, labels, priors)


def run_case(case: CorpusCase, *, assume: bool = True, use_priors: bool = True,
             stores: dict[Path, PriorStore] | None = None) -> CaseResult:
    try:
        store = None
        if case.priors is not None:
            store = (stores or {}).get(case.priors) or PriorStore.from_file(case.priors)
        workspace = scan_workspace(case.workspace)
        text = case.dockerfile.read_bytes()
    except (OSError, DockmockError) as exc:
        raise ManifestFault(f"case {case.name!r}: {exc}") from exc
    report = check_source(text, workspace, store, assume=assume, use_priors=use_priors)
    counts, per = score(report.warnings, case.labels)
    return CaseResult(case.name, report.warnings, counts, per)


def evaluate(manifest: str | os.PathLike | list[CorpusCase], *, assume: bool = True,
             use_priors: bool = True, jobs: int | None = None) -> Metrics:
    """Run every case and aggregate TP/FP/FN overall and per fault type."""
    cases = load_manifest(manifest) if not isinstance(manifest, list) else manifest
    stores: dict[Path, PriorStore] = {}
    for case in cases:
        if case.priors is not None and case.priors not in stores:
            try:
                stores[case.priors] = PriorStore.from_file(case.priors)
            except DockmockError as exc:
                raise ManifestFault(f"case {case.name!r}: {exc}") from exc
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(
            lambda c: run_case(c, assume=assume, use_priors=use_priors, stores=stores), cases))
    metrics = Metrics(cases=results)
    for r in results:
        metrics.tp += r.counts.tp
        metrics.fp += r.counts.fp
        metrics.fn += r.counts.fn
        for ft, c in r.per_fault_type.items():
            metrics.per_fault_type.setdefault(ft, Counts()).add(c)
    return metrics
