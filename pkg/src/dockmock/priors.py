"""Prior context: cached facts about base images.

A snapshot records what an image looks like from the inside (environment,
executable names, default working directory and user) so analysis can start
from precise state at ``FROM``. Snapshots live in one JSON document keyed by
normalized image reference. Only :func:`capture_snapshot` talks to a
container runtime; analysis reads the store and nothing else.
"""

from __future__ import annotations

import datetime as _dt
import json
import logging
import os
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from dockmock.context import SHELL_BUILTINS
from dockmock.errors import RuntimeFault, StoreFault

log = logging.getLogger(__name__)

DEFAULT_STORE = "dockmock-priors.json"


def normalize_ref(ref: str) -> str:
    """``node`` -> ``node:latest``; registry and ``library/`` prefixes of
    Docker Hub are dropped; digest references are kept verbatim."""
    ref = ref.strip()
    if "@" in ref:
        return ref
    for prefix in ("docker.io/", "index.docker.io/", "registry-1.docker.io/"):
        if ref.startswith(prefix):
            ref = ref[len(prefix):]
    if ref.startswith("library/"):
        ref = ref[len("library/"):]
    last = ref.rsplit("/", 1)[-1]
    if ":" not in last:
        ref += ":latest"
    return ref


@dataclass(frozen=True)
class ImageSnapshot:
    image_ref: str
    env: Mapping[str, str] = field(default_factory=dict)
    executables: frozenset[str] = frozenset()
    workdir: str = "/"
    user: str = "root"
    captured_at: str = ""

    def to_record(self) -> dict:
        return {
            "env": dict(sorted(self.env.items())),
            "executables": sorted(self.executables),
            "workdir": self.workdir,
            "user": self.user,
            "captured_at": self.captured_at,
        }

    @classmethod
    def from_record(cls, ref: str, record: Mapping) -> ImageSnapshot:
        if not isinstance(record, Mapping):
            raise StoreFault(f"snapshot for {ref!r} is not an object")
        env = record.get("env", {})
        exes = record.get("executables", [])
        if not isinstance(env, Mapping) or not all(isinstance(v, str) for v in env.values()):
            raise StoreFault(f"snapshot for {ref!r}: env must map names to strings")
        if not isinstance(exes, list) or not all(isinstance(v, str) for v in exes):
            raise StoreFault(f"snapshot for {ref!r}: executables must be a list of strings")
        workdir = record.get("workdir") or "/"
        if not isinstance(workdir, str) or not workdir.startswith("/"):
            raise StoreFault(f"snapshot for {ref!r}: workdir must be an absolute path")
        return cls(
            image_ref=ref,
            env=dict(env),
            executables=frozenset(exes) | SHELL_BUILTINS,
            workdir=workdir,
            user=str(record.get("user") or "root"),
            captured_at=str(record.get("captured_at", "")),
        )


class PriorStore:
    """Read-only view of a snapshot store."""

    def __init__(self, snapshots: Mapping[str, ImageSnapshot] | None = None) -> None:
        self._snapshots = dict(snapshots or {})

    @classmethod
    def from_file(cls, path: str | os.PathLike, missing_ok: bool = False) -> PriorStore:
        path = Path(path)
        if not path.exists():
            if missing_ok:
                return cls()
            raise StoreFault(f"snapshot store not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, ValueError) as exc:
            raise StoreFault(f"cannot read snapshot store {path}: {exc}") from exc
        if not isinstance(data, Mapping):
            raise StoreFault(f"snapshot store {path} must be a JSON object")
        snaps = {}
        for ref, record in data.items():
            key = normalize_ref(ref)
            snaps[key] = ImageSnapshot.from_record(key, record)
        return cls(snaps)

    def get(self, ref: str) -> ImageSnapshot | None:
        return self._snapshots.get(normalize_ref(ref))

    def __contains__(self, ref: str) -> bool:
        return self.get(ref) is not None

    def __len__(self) -> int:
        return len(self._snapshots)

    def refs(self) -> list[str]:
        return sorted(self._snapshots)


EMPTY_STORE = PriorStore()


def load_snapshot(image_ref: str, store_path: str | os.PathLike) -> ImageSnapshot | None:
    """Snapshot for ``image_ref`` or ``None`` when the store lacks it."""
    return PriorStore.from_file(store_path).get(image_ref)


def _write_store(path: Path, records: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)


Invoker = Callable[[list[str]], str]


def docker_invoker(args: list[str]) -> str:
    """Run ``docker <args>`` and return its stdout."""
    try:
        proc = subprocess.run(["docker", *args], capture_output=True, text=True, timeout=600)
    except FileNotFoundError as exc:
        raise RuntimeFault("no container runtime: docker is not installed") from exc
    except subprocess.TimeoutExpired as exc:
        raise RuntimeFault(f"docker {' '.join(args[:2])} timed out") from exc
    if proc.returncode != 0:
        raise RuntimeFault(f"docker {' '.join(args[:2])} failed: {proc.stderr.strip()}")
    return proc.stdout


_PROBE = (
    'env; echo "--dockmock--"; '
    'IFS=:; for d in $PATH; do [ -d "$d" ] && ls -1 "$d" 2>/dev/null; done; true'
)


def capture_snapshot(image_ref: str, runtime_invoker: Invoker = docker_invoker,
                     store_path: str | os.PathLike = DEFAULT_STORE) -> ImageSnapshot:
    """Inspect ``image_ref`` with the runtime and upsert it into the store.

    The store is rewritten only after every runtime call succeeded.
    """
    ref = normalize_ref(image_ref)
    config_text = runtime_invoker(["image", "inspect", "--format", "{{json .Config}}", image_ref])
    try:
        config = json.loads(config_text or "{}") or {}
    except ValueError as exc:
        raise RuntimeFault(f"unexpected image config for {image_ref}: {exc}") from exc
    output = runtime_invoker(["run", "--rm", "--entrypoint", "/bin/sh", image_ref, "-c", _PROBE])
    env_part, _, exe_part = output.partition("--dockmock--")
    env = {}
    for line in env_part.splitlines():
        name, eq, value = line.partition("=")
        if eq and name and name not in ("HOSTNAME",):
            env[name] = value
    exes = {line.strip() for line in exe_part.splitlines() if line.strip()}
    snap = ImageSnapshot(
        image_ref=ref,
        env=env,
        executables=frozenset(exes) | SHELL_BUILTINS,
        workdir=config.get("WorkingDir") or "/",
        user=config.get("User") or "root",
        captured_at=_dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat(),
    )
    path = Path(store_path)
    records = {}
    if path.exists():
        try:
            records = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise StoreFault(f"cannot read snapshot store {path}: {exc}") from exc
    records = {normalize_ref(k): v for k, v in records.items()}
    records[ref] = snap.to_record()
    _write_store(path, records)
    log.info("captured %s: %d env vars, %d executables", ref, len(env), len(snap.executables))
    return snap
