from __future__ import annotations

import pytest

from dockmock.ignore import DockerIgnore

RULES = DockerIgnore(["*.log", "!keep.log", "**/tmp", "build/", "# comment", "docs/*.md"])


@pytest.mark.parametrize("path,ignored", [
    ("a.log", True),
    ("keep.log", False),
    ("src/a.log", False),  # `*` does not cross directories
    ("tmp", True),
    ("x/y/tmp", True),
    ("build", True),
    ("build/out/app", True),
    ("docs/a.md", True),
    ("docs/sub/a.md", False),
    ("README.md", False),
])
def test_matching(path, ignored):
    assert RULES.ignored(path) is ignored


def test_missing_file_ignores_nothing(tmp_path):
    assert not DockerIgnore.from_file(tmp_path / ".dockerignore").ignored("anything")
