from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dockmock.cli import Config, main
from dockmock.faults import FaultType, MockWarning, Severity

from conftest import CORPUS

BROKEN = CORPUS / "goldens" / "copy-prefix" / "Dockerfile"
FIXED = CORPUS / "goldens" / "copy-prefix-fixed" / "Dockerfile"
PRIORS = str(CORPUS / "priors.json")


def test_check_text_output(capsys):
    assert main(["check", str(BROKEN), "--priors", PRIORS]) == 1
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 2
    assert out[0].startswith(f"{BROKEN}:4: ERROR [outer-file-not-found]")


def test_check_json_output(capsys):
    assert main(["check", str(BROKEN), "--priors", PRIORS, "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert [d["line"] for d in data] == [4, 5]
    assert list(data[0]) == ["file", "line", "severity", "code", "message", "subject"]


def test_clean_file_exits_zero(capsys):
    assert main(["check", str(FIXED), "--priors", PRIORS, "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out) == []


def test_fail_on_threshold(capsys, tmp_path):
    df = tmp_path / "Dockerfile"
    df.write_text("FROM ubuntu:20.04\nRUN apt-get install curl\n")
    assert main(["check", str(df), "--priors", PRIORS]) == 0  # warnings only
    assert main(["check", str(df), "--priors", PRIORS, "--fail-on", "warning"]) == 1
    assert main(["check", str(BROKEN), "--priors", PRIORS, "--fail-on", "never"]) == 0


def test_config_disables_and_overrides(capsys, tmp_path):
    cfg = tmp_path / "dockmock.cfg"
    cfg.write_text("# team defaults\ndisable = outer-file-not-found\n")
    assert main(["check", str(BROKEN), "--priors", PRIORS, "--config", str(cfg)]) == 0
    cfg.write_text("severity.outer-file-not-found = warning\n")
    assert main(["check", str(BROKEN), "--priors", PRIORS, "--config", str(cfg)]) == 0
    assert "WARNING" in capsys.readouterr().out


def test_config_parse_errors():
    with pytest.raises(ValueError, match="2"):
        Config.parse("disable = syntax-mistake\nbogus line\n")
    with pytest.raises(ValueError):
        Config.parse("disable = not-a-fault\n")
    cfg = Config.parse("disable = SyntaxMistake, command-not-found\nseverity.image-version-mismatch = error\n")
    assert cfg.disabled == {FaultType.SYNTAX_MISTAKE, FaultType.COMMAND_NOT_FOUND}
    w = MockWarning(FaultType.IMAGE_VERSION_MISMATCH, 1, "ruby", "m")
    assert cfg.apply("f", [w])[0].severity is Severity.ERROR


def test_workspace_override(capsys, tmp_path):
    df = tmp_path / "Dockerfile"
    df.write_text("FROM node:12\nCOPY myapp/package.json /app/\n")
    ws = str(CORPUS / "goldens" / "copy-prefix")
    assert main(["check", str(df), "--priors", PRIORS]) == 1
    assert main(["check", str(df), "--priors", PRIORS, "--workspace", ws]) == 0


def test_ablation_flags(capsys, tmp_path):
    df = tmp_path / "Dockerfile"
    df.write_text("FROM python:3.8\nRUN javac\n")
    assert main(["check", str(df), "--priors", PRIORS]) == 1
    assert main(["check", str(df), "--priors", PRIORS, "--no-priors"]) == 0


def test_usage_errors(capsys, tmp_path):
    assert main(["check", str(tmp_path / "missing")]) == 2
    assert "usage:" in capsys.readouterr().err
    assert main([]) == 2
    assert main(["check", str(BROKEN), "--format", "xml"]) == 2
    assert main(["check", str(BROKEN), "--priors", str(tmp_path / "none.json")]) == 2


def test_multiple_files(capsys):
    assert main(["check", str(BROKEN), str(FIXED), "--priors", PRIORS, "--format", "json"]) == 1
    data = json.loads(capsys.readouterr().out)
    assert {d["file"] for d in data} == {str(BROKEN)}


def test_bench(capsys):
    assert main(["bench", str(CORPUS / "goldens.json"), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert (data["tp"], data["fp"], data["fn"]) == (3, 0, 0)
    assert "matching" in data


def test_capture_without_runtime_fails_cleanly(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PATH", str(tmp_path))
    assert main(["capture", "node:12", "--priors", str(tmp_path / "s.json")]) == 2
    assert "docker" in capsys.readouterr().err
    assert not (tmp_path / "s.json").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dockmock", "check", str(FIXED), "--priors", PRIORS],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == ""
