"""Compiler version pins versus the base image tag.

Versions are compared as sets: an image tag such as ``ruby:2.6`` stands for
every ``2.6.x`` release, a pin such as ``~> 2.7`` for every release it
admits. A mismatch is reported only when the two sets cannot overlap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from dockmock.context import Context, get_node, normalize
from dockmock.faults import OK, FUZZY, FaultType, MockResult, conflict

Version = tuple[int, ...]
_INF: Version = (10**9,)
_NUM = re.compile(r"\d+(?:\.\d+)*")


@dataclass(frozen=True)
class Interval:
    """Half-open ``[lo, hi)`` over version tuples."""

    lo: Version = (0,)
    hi: Version = _INF

    def intersect(self, other: Interval) -> Interval:
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    @property
    def empty(self) -> bool:
        return self.lo >= self.hi


def parse_version(text: str) -> Version | None:
    m = _NUM.search(text)
    if not m:
        return None
    return tuple(int(p) for p in m.group(0).split("."))


def _bump(v: Version) -> Version:
    return v[:-1] + (v[-1] + 1,)


def prefix_interval(v: Version) -> Interval:
    """All releases starting with ``v`` (``2.6`` -> ``[2.6, 2.7)``)."""
    return Interval(v, _bump(v))


def requirement_interval(req: str) -> Interval | None:
    """Interpret a Gemfile-style requirement list (``"~> 2.7, >= 2.7.1"``)."""
    out = Interval()
    for clause in req.split(","):
        clause = clause.strip()
        m = re.match(r"(~>|>=|<=|!=|=|>|<)?\s*(\d+(?:\.\d+)*)", clause)
        if not m:
            return None
        op, v = m.group(1) or "=", tuple(int(p) for p in m.group(2).split("."))
        if op == "=":
            iv = prefix_interval(v)
        elif op == "~>":
            hi = _bump(v[:-1]) if len(v) > 1 else _INF
            iv = Interval(v, hi)
        elif op == ">=":
            iv = Interval(v, _INF)
        elif op == ">":
            iv = Interval(_bump(v), _INF)
        elif op == "<":
            iv = Interval((0,), v)
        elif op == "<=":
            iv = Interval((0,), _bump(v))
        else:
            continue
        out = out.intersect(iv)
    return out


_GEMFILE_RUBY = re.compile(r"""^\s*ruby\s*\(?\s*((?:['"][^'"]+['"]\s*,?\s*)+)""", re.M)
_GOMOD_GO = re.compile(r"^go\s+(\d+(?:\.\d+)*)\s*$", re.M)


def gemfile_ruby(content: str) -> str | None:
    m = _GEMFILE_RUBY.search(content)
    if not m:
        return None
    return ", ".join(re.findall(r"""['"]([^'"]+)['"]""", m.group(1)))


def gomod_go(content: str) -> str | None:
    m = _GOMOD_GO.search(content)
    return m.group(1) if m else None


@dataclass(frozen=True)
class Manager:
    name: str
    manifest: str
    images: tuple[str, ...]
    language: str


MANAGERS = {
    "bundle": Manager("bundle", "Gemfile", ("ruby",), "ruby"),
    "go": Manager("go", "go.mod", ("golang", "go"), "go"),
}


def image_family(image: str | None, manager: Manager) -> Interval | None:
    """Versions an image reference may carry, or ``None`` if unknown."""
    if not image:
        return None
    ref = image.split("@", 1)[0]
    name, _, tag = ref.rpartition(":") if ":" in ref.rsplit("/", 1)[-1] else (ref, "", "")
    name = name.rsplit("/", 1)[-1]
    if name not in manager.images or not tag:
        return None
    m = re.match(r"(\d+(?:\.\d+)*)", tag)
    if not m:
        return None
    return prefix_interval(tuple(int(p) for p in m.group(1).split(".")))


def required_interval(manager: Manager, content: str) -> tuple[str, Interval] | None:
    if manager.name == "bundle":
        pin = gemfile_ruby(content)
        iv = requirement_interval(pin) if pin else None
    else:
        pin = gomod_go(content)
        iv = Interval(tuple(int(p) for p in pin.split(".")), _INF) if pin else None
    if pin is None or iv is None:
        return None
    return pin, iv


def mock_version_check(manager: str, ctx: Context, manifest_dir: str | None = None,
                       in_workspace: bool = False) -> MockResult:
    """Compare the manifest pin in ``manifest_dir`` against ``ctx.image``.

    With ``in_workspace`` the manifest is read from the build context,
    otherwise from the container tree (default directory: the workdir).
    """
    mgr = MANAGERS[manager]
    tree = ctx.workspace if in_workspace else ctx.container
    where = manifest_dir if manifest_dir is not None else ("/" if in_workspace else ctx.workdir)
    node = get_node(tree, normalize(mgr.manifest, where))
    if node is None or node.is_dir:
        return OK
    if node.content is None:
        return FUZZY
    family = image_family(ctx.image, mgr)
    if family is None:
        return FUZZY
    required = required_interval(mgr, node.content)
    if required is None:
        return OK
    pin, iv = required
    if family.intersect(iv).empty:
        tag = ctx.image
        return conflict(
            FaultType.IMAGE_VERSION_MISMATCH, tag,
            f"{mgr.manifest} requires {mgr.language} {pin}, which the base image {tag} does not provide",
        )
    return OK
