"""Dockerfile parsing.

Turns Dockerfile text into a flat list of :class:`Instruction` values in
source order. Fatal problems raise :class:`~dockmock.errors.SyntaxFault`;
recoverable ones (unknown keywords, instructions before the first ``FROM``)
are collected in :attr:`DockerfileAst.problems` so analysis can go on.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass, field

from dockmock.errors import SyntaxFault

log = logging.getLogger(__name__)


class Keyword(enum.Enum):
    FROM = "FROM"
    RUN = "RUN"
    COPY = "COPY"
    ADD = "ADD"
    ENV = "ENV"
    ARG = "ARG"
    WORKDIR = "WORKDIR"
    CMD = "CMD"
    ENTRYPOINT = "ENTRYPOINT"
    EXPOSE = "EXPOSE"
    USER = "USER"
    LABEL = "LABEL"
    VOLUME = "VOLUME"
    HEALTHCHECK = "HEALTHCHECK"
    MAINTAINER = "MAINTAINER"
    ONBUILD = "ONBUILD"
    SHELL = "SHELL"
    STOPSIGNAL = "STOPSIGNAL"
    UNKNOWN = "UNKNOWN"


_KEYWORDS = {k.value: k for k in Keyword if k is not Keyword.UNKNOWN}
# Instructions whose arguments may be written as a JSON array.
_JSON_CAPABLE = {
    Keyword.RUN, Keyword.CMD, Keyword.ENTRYPOINT, Keyword.SHELL,
    Keyword.COPY, Keyword.ADD, Keyword.VOLUME,
}
_FLAGGED = {Keyword.FROM, Keyword.RUN, Keyword.COPY, Keyword.ADD, Keyword.HEALTHCHECK}
_DIRECTIVE_RE = re.compile(r"^#\s*([a-zA-Z][a-zA-Z0-9_-]*)\s*=\s*(.*?)\s*$")


@dataclass(frozen=True)
class Instruction:
    keyword: Keyword
    args: tuple[str, ...]
    line_start: int
    line_end: int
    exec_form: bool = False
    raw_keyword: str = ""
    #: Argument text with leading ``--flag`` options removed. For shell-form
    #: ``RUN``/``CMD``/``ENTRYPOINT`` this is the script handed to ``sh -c``.
    text: str = ""
    flags: dict[str, str] = field(default_factory=dict, compare=False, hash=False)

    @property
    def stage_name(self) -> str | None:
        """Alias declared by ``FROM image AS name``."""
        if self.keyword is Keyword.FROM and len(self.args) == 3 and self.args[1].lower() == "as":
            return self.args[2]
        return None


@dataclass
class DockerfileAst:
    instructions: list[Instruction] = field(default_factory=list)
    comments: list[tuple[int, str]] = field(default_factory=list)
    #: Non-fatal syntax problems as ``(line, reason)``.
    problems: list[tuple[int, str]] = field(default_factory=list)
    directives: dict[str, str] = field(default_factory=dict)
    escape: str = "\\"

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)


def parse_dockerfile(text: str | bytes) -> DockerfileAst:
    """Parse Dockerfile source into a :class:`DockerfileAst`.

    Raises :class:`SyntaxFault` for unparseable input; never raises anything
    else.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SyntaxFault(f"invalid UTF-8 at byte {exc.start}", 1) from None
    if text.startswith("﻿"):
        text = text[1:]
    try:
        return _Parser(text).parse()
    except SyntaxFault:
        raise
    except Exception as exc:  # noqa: BLE001 - parsing must be total
        raise SyntaxFault(f"internal parse error: {exc}") from exc


class _Parser:
    def __init__(self, text: str) -> None:
        self.lines = text.splitlines()
        self.ast = DockerfileAst()

    def parse(self) -> DockerfileAst:
        ast = self.ast
        idx = self._read_directives()
        seen_from = False
        n = len(self.lines)
        while idx < n:
            raw = self.lines[idx]
            stripped = raw.strip()
            if not stripped:
                idx += 1
                continue
            if stripped.startswith("#"):
                ast.comments.append((idx + 1, stripped))
                idx += 1
                continue
            start = idx
            body, idx = self._join(idx)
            instr = self._instruction(body, start + 1, idx)
            if instr.keyword is Keyword.UNKNOWN:
                ast.problems.append((instr.line_start, f"unknown instruction: {instr.raw_keyword}"))
            elif instr.keyword is Keyword.FROM:
                seen_from = True
            elif not seen_from and instr.keyword is not Keyword.ARG:
                ast.problems.append(
                    (instr.line_start, f"{instr.keyword.value} before the first FROM (no build stage)")
                )
            ast.instructions.append(instr)
        return ast

    def _read_directives(self) -> int:
        idx = 0
        while idx < len(self.lines):
            m = _DIRECTIVE_RE.match(self.lines[idx].strip())
            if not m:
                break
            name, value = m.group(1).lower(), m.group(2)
            if name in self.ast.directives:
                break
            self.ast.directives[name] = value
            if name == "escape":
                if value not in ("\\", "`"):
                    raise SyntaxFault(f"invalid escape token {value!r}", idx + 1)
                self.ast.escape = value
            else:
                log.info("parser directive %s=%s noted and ignored", name, value)
            idx += 1
        return idx

    def _continues(self, line: str) -> tuple[bool, str]:
        body = line.rstrip()
        esc = self.ast.escape
        if body.endswith(esc):
            # an escaped escape char is not a continuation
            trailing = len(body) - len(body.rstrip(esc))
            if trailing % 2 == 1:
                return True, body[: -1]
        return False, line

    def _join(self, idx: int) -> tuple[str, int]:
        """Join one logical line starting at ``idx``; return it and the next index."""
        parts = []
        more, text = self._continues(self.lines[idx])
        parts.append(text)
        idx += 1
        while more and idx < len(self.lines):
            line = self.lines[idx]
            stripped = line.strip()
            idx += 1
            if not stripped or stripped.startswith("#"):
                continue
            more, text = self._continues(line)
            parts.append(text)
        return "".join(parts), idx

    def _instruction(self, body: str, line_start: int, line_end: int) -> Instruction:
        body = body.strip()
        head, _, rest = body.partition(" ")
        if "\t" in head:
            head, _, tail = head.partition("\t")
            rest = tail + " " + rest
        rest = rest.strip()
        keyword = _KEYWORDS.get(head.upper(), Keyword.UNKNOWN)
        if not rest:
            raise SyntaxFault(f"{head.upper()} requires at least one argument", line_start)

        flags: dict[str, str] = {}
        if keyword in _FLAGGED:
            rest = self._strip_flags(rest, flags, line_start)
            if not rest:
                raise SyntaxFault(f"{head.upper()} requires at least one argument", line_start)

        exec_form = False
        if keyword in _JSON_CAPABLE and rest.startswith("["):
            parsed = _try_json_array(rest)
            if parsed is not None:
                args = tuple(parsed)
                exec_form = True
            elif re.match(r"^\[\s*\"", rest):
                raise SyntaxFault("malformed or unterminated JSON array", line_start)
            else:
                args = tuple(split_words(rest, self.ast.escape, line_start))
        elif keyword in (Keyword.RUN, Keyword.CMD, Keyword.ENTRYPOINT):
            # shell form: quoting is validated by the shell parser later
            args = tuple(rest.split())
        else:
            args = tuple(split_words(rest, self.ast.escape, line_start))

        if keyword in (Keyword.COPY, Keyword.ADD) and len(args) < 2:
            raise SyntaxFault(f"{keyword.value} requires at least two arguments", line_start)

        return Instruction(
            keyword=keyword,
            args=args,
            line_start=line_start,
            line_end=line_end,
            exec_form=exec_form,
            raw_keyword=head,
            text=rest,
            flags=flags,
        )

    @staticmethod
    def _strip_flags(rest: str, flags: dict[str, str], line: int) -> str:
        while rest.startswith("--"):
            word, _, tail = rest.partition(" ")
            name, eq, value = word[2:].partition("=")
            if not name:
                raise SyntaxFault("empty flag name", line)
            flags[name.lower()] = value if eq else "true"
            rest = tail.strip()
        return rest


def _try_json_array(text: str) -> list[str] | None:
    try:
        value = json.loads(text)
    except ValueError:
        return None
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return value
    return None


def split_words(text: str, escape: str = "\\", line: int = 0) -> list[str]:
    """Split on unquoted whitespace, keeping quotes and escapes in each word."""
    words: list[str] = []
    cur: list[str] = []
    quote = ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == escape and quote != "'" and i + 1 < len(text):
            cur.append(ch + text[i + 1])
            i += 2
            continue
        if quote:
            cur.append(ch)
            if ch == quote:
                quote = ""
        elif ch in "\"'":
            quote = ch
            cur.append(ch)
        elif ch.isspace():
            if cur:
                words.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
        i += 1
    if quote:
        raise SyntaxFault(f"unterminated {quote} quote", line)
    if cur:
        words.append("".join(cur))
    return words


def split_env_args(instr: Instruction) -> list[tuple[str, str | None]]:
    """Normalize ``ENV``/``ARG``/``LABEL`` arguments to ``(name, value)`` pairs.

    Values are returned unexpanded (quotes and ``$`` references intact); an
    ``ARG`` without a default yields ``None``.
    """
    if instr.keyword not in (Keyword.ENV, Keyword.ARG, Keyword.LABEL):
        raise ValueError(f"split_env_args does not apply to {instr.keyword.value}")
    words = list(instr.args)
    if not words:
        raise SyntaxFault(f"{instr.keyword.value} requires at least one argument", instr.line_start)

    if instr.keyword is Keyword.ARG:
        pairs: list[tuple[str, str | None]] = []
        for w in words:
            name, eq, value = w.partition("=")
            if not name:
                raise SyntaxFault(f"malformed ARG {w!r}", instr.line_start)
            pairs.append((name, value if eq else None))
        return pairs

    first = words[0]
    if first.startswith("="):
        raise SyntaxFault(f"malformed {instr.keyword.value} pair {first!r}", instr.line_start)
    if "=" in first:
        pairs = []
        for w in words:
            name, eq, value = w.partition("=")
            if not eq or not name:
                raise SyntaxFault(f"malformed {instr.keyword.value} pair {w!r}", instr.line_start)
            pairs.append((name, value))
        return pairs

    # legacy single-pair form: everything after the name is the value
    if len(words) < 2:
        raise SyntaxFault(f"{instr.keyword.value} {first} is missing a value", instr.line_start)
    value = instr.text.strip()[len(first):].strip()
    return [(first, value)]
