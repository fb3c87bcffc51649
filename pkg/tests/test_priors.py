from __future__ import annotations

import json

import pytest

from dockmock.errors import RuntimeFault, StoreFault
from dockmock.priors import (
    EMPTY_STORE,
    ImageSnapshot,
    PriorStore,
    capture_snapshot,
    load_snapshot,
    normalize_ref,
)


@pytest.mark.parametrize("ref,want", [
    ("node", "node:latest"),
    ("node:12", "node:12"),
    ("docker.io/library/node:12", "node:12"),
    ("library/python", "python:latest"),
    ("ghcr.io/org/tool", "ghcr.io/org/tool:latest"),
    ("localhost:5000/img", "localhost:5000/img:latest"),
    ("node@sha256:abc", "node@sha256:abc"),
])
def test_normalize_ref(ref, want):
    assert normalize_ref(ref) == want


def write_store(path, data):
    path.write_text(json.dumps(data))
    return path


def test_store_round_trip(tmp_path):
    path = write_store(tmp_path / "s.json", {
        "docker.io/library/node:12": {"env": {"PATH": "/usr/bin"}, "executables": ["node"],
                                      "workdir": "/", "user": "root"}})
    store = PriorStore.from_file(path)
    snap = store.get("node:12")
    assert snap is not None and "node" in snap.executables
    assert "cd" in snap.executables  # builtins always exist
    assert "node:12" in store and "node:14" not in store
    assert store.refs() == ["node:12"]
    assert load_snapshot("node:12", path) == snap


@pytest.mark.parametrize("record", [
    [],
    {"env": {"A": 1}},
    {"executables": "node"},
    {"workdir": "relative"},
])
def test_malformed_records_raise(tmp_path, record):
    path = write_store(tmp_path / "s.json", {"img:1": record})
    with pytest.raises(StoreFault):
        PriorStore.from_file(path)


def test_missing_and_broken_stores(tmp_path):
    with pytest.raises(StoreFault):
        PriorStore.from_file(tmp_path / "none.json")
    assert len(PriorStore.from_file(tmp_path / "none.json", missing_ok=True)) == 0
    (tmp_path / "bad.json").write_text("{nope")
    with pytest.raises(StoreFault):
        PriorStore.from_file(tmp_path / "bad.json")
    assert len(EMPTY_STORE) == 0


class FakeRuntime:
    def __init__(self, fail_on=None):
        self.calls = []
        self.fail_on = fail_on

    def __call__(self, args):
        self.calls.append(args)
        if self.fail_on and args[0] == self.fail_on:
            raise RuntimeFault("boom")
        if args[0] == "image":
            return json.dumps({"WorkingDir": "/app", "User": "node"})
        return ("PATH=/usr/local/bin:/usr/bin\nHOSTNAME=abc\nNODE_VERSION=12.22\n--dockmock--\n"
                "node\nnpm\nls\n")


def test_capture_writes_snapshot(tmp_path):
    store_path = tmp_path / "store.json"
    runtime = FakeRuntime()
    snap = capture_snapshot("docker.io/library/node:12", runtime, store_path)
    assert snap.image_ref == "node:12"
    assert snap.workdir == "/app" and snap.user == "node"
    assert "HOSTNAME" not in snap.env and snap.env["NODE_VERSION"] == "12.22"
    assert {"node", "npm", "ls"} <= snap.executables
    assert [c[0] for c in runtime.calls] == ["image", "run"]
    assert PriorStore.from_file(store_path).get("node:12").workdir == "/app"


def test_capture_upserts_and_keeps_other_images(tmp_path):
    store_path = write_store(tmp_path / "store.json", {"alpine:3.12": {"executables": ["sh"]}})
    capture_snapshot("node:12", FakeRuntime(), store_path)
    assert PriorStore.from_file(store_path).refs() == ["alpine:3.12", "node:12"]


@pytest.mark.parametrize("stage", ["image", "run"])
def test_capture_failure_leaves_store_untouched(tmp_path, stage):
    store_path = write_store(tmp_path / "store.json", {"alpine:3.12": {"executables": ["sh"]}})
    before = store_path.read_text()
    with pytest.raises(RuntimeFault):
        capture_snapshot("node:12", FakeRuntime(fail_on=stage), store_path)
    assert store_path.read_text() == before


def test_snapshot_record_round_trip():
    snap = ImageSnapshot("x:1", {"A": "b"}, frozenset({"sh"}), "/w", "u", "2026-01-01T00:00:00+00:00")
    again = ImageSnapshot.from_record("x:1", snap.to_record())
    assert again.env == snap.env and again.workdir == "/w" and "sh" in again.executables
