"""Command-line front end: ``dockmock check|capture|bench``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from dockmock.context import scan_workspace
from dockmock.engine import check_source
from dockmock.errors import DockmockError
from dockmock.faults import FaultType, MockWarning, Severity
from dockmock.harness import evaluate
from dockmock.priors import DEFAULT_STORE, PriorStore, capture_snapshot

log = logging.getLogger("dockmock")

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2
_THRESHOLDS = {
    "error": {Severity.ERROR},
    "warning": {Severity.ERROR, Severity.WARNING},
    "never": set(),
}


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    severity: Severity
    code: str
    message: str
    subject: str

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "line": self.line,
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "subject": self.subject,
        }

    def to_text(self) -> str:
        return f"{self.file}:{self.line}: {self.severity.value} [{self.code}] {self.message}"


@dataclass
class Config:
    disabled: set[FaultType] = field(default_factory=set)
    severity: dict[FaultType, Severity] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> Config:
        """``key = value`` lines; ``#`` starts a comment.

        ``disable = code, code`` turns fault codes off and
        ``severity.<code> = error|warning`` overrides a severity.
        """
        cfg = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key, value = key.strip(), value.strip().strip("\"'")
            if not eq:
                raise ValueError(f"{source}:{n}: expected key = value")
            try:
                if key == "disable":
                    cfg.disabled |= {FaultType.parse(v) for v in value.replace(",", " ").split()}
                elif key.startswith("severity."):
                    cfg.severity[FaultType.parse(key[len("severity."):])] = Severity(value.upper())
                else:
                    raise ValueError(f"unknown key {key!r}")
            except ValueError as exc:
                raise ValueError(f"{source}:{n}: {exc}") from None
        return cfg

    def apply(self, file: str, warnings: Sequence[MockWarning]) -> list[Diagnostic]:
        out = []
        for w in warnings:
            if w.fault_type in self.disabled:
                continue
            sev = self.severity.get(w.fault_type, w.severity)
            out.append(Diagnostic(file, w.line, sev, w.fault_type.code, w.message, w.subject))
        return out


def _setup_logging() -> None:
    level = {"info": logging.INFO, "debug": logging.DEBUG}.get(os.environ.get("DOCKMOCK_LOG", "off").lower())
    if level is not None:
        logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _error(msg: str) -> int:
    print(f"dockmock: error: {msg}", file=sys.stderr)
    return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dockmock", description="Find Dockerfile faults before building.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="analyze Dockerfiles")
    check.add_argument("dockerfiles", nargs="+", metavar="DOCKERFILE")
    check.add_argument("--workspace", help="build context directory (default: the Dockerfile's directory)")
    check.add_argument("--priors", help=f"snapshot store (default: ./{DEFAULT_STORE} if present)")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--fail-on", choices=tuple(_THRESHOLDS), default="error")
    check.add_argument("--config", help="key=value file disabling codes or overriding severities")
    check.add_argument("--no-assumption", action="store_true",
                       help="halt a branch on fuzzy context instead of assuming it")
    check.add_argument("--no-priors", action="store_true", help="ignore base image snapshots")

    capture = sub.add_parser("capture", help="snapshot a base image into the store")
    capture.add_argument("image")
    capture.add_argument("--priors", default=DEFAULT_STORE)

    bench = sub.add_parser("bench", help="score against a labeled corpus manifest")
    bench.add_argument("manifest")
    bench.add_argument("--format", choices=("text", "json"), default="text")
    bench.add_argument("--no-assumption", action="store_true")
    bench.add_argument("--no-priors", action="store_true")
    return parser


def cmd_check(args: argparse.Namespace) -> int:
    try:
        if args.priors:
            store = PriorStore.from_file(args.priors)
        else:
            store = PriorStore.from_file(DEFAULT_STORE, missing_ok=True)
        config = Config()
        if args.config:
            config = Config.parse(Path(args.config).read_text(encoding="utf-8"), args.config)
    except (OSError, ValueError, DockmockError) as exc:
        return _error(str(exc))

    def one(path: str):
        p = Path(path)
        text = p.read_bytes()
        workspace = scan_workspace(args.workspace or p.parent)
        report = check_source(text, workspace, store, assume=not args.no_assumption,
                              use_priors=not args.no_priors)
        return config.apply(path, report.warnings)

    try:
        with ThreadPoolExecutor() as pool:
            diagnostics = [d for ds in pool.map(one, args.dockerfiles) for d in ds]
    except (OSError, DockmockError) as exc:
        return _error(str(exc))

    if args.format == "json":
        sys.stdout.write(json.dumps([d.to_dict() for d in diagnostics]) + "\n")
    else:
        for d in diagnostics:
            print(d.to_text())
    threshold = _THRESHOLDS[args.fail_on]
    return EXIT_FINDINGS if any(d.severity in threshold for d in diagnostics) else EXIT_OK


def cmd_capture(args: argparse.Namespace) -> int:
    try:
        snap = capture_snapshot(args.image, store_path=args.priors)
    except DockmockError as exc:
        return _error(str(exc))
    print(f"captured {snap.image_ref}: {len(snap.env)} env vars, {len(snap.executables)} executables")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        metrics = evaluate(args.manifest, assume=not args.no_assumption, use_priors=not args.no_priors)
    except DockmockError as exc:
        return _error(str(exc))
    if args.format == "json":
        print(json.dumps(metrics.to_dict()))
    else:
        print(metrics.to_text())
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    if args.command == "check":
        missing = [p for p in args.dockerfiles if not Path(p).is_file()]
        if missing:
            parser.print_usage(sys.stderr)
            return _error(f"cannot read Dockerfile {missing[0]}")
    handler = {"check": cmd_check, "capture": cmd_capture, "bench": cmd_bench}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
