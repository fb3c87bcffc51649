"""POSIX-subset shell parsing and word expansion.

Only simple commands and subshells are modelled in full. Function
definitions, ``if``/``while``/``for``/``case`` and brace groups, here-documents
and similar constructs are kept as :class:`OpaqueNode` with their source text,
so the caller can treat them as having unknown effects.
"""

from __future__ import annotations

import fnmatch
import re
from dataclasses import dataclass, field
from typing import Protocol, Union

from dockmock.errors import SyntaxFault

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ASSIGN_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*=")
_SPECIAL_PARAMS = "@*#?$!-0123456789"
_GLOB_CHARS = "*?["
_METACHARS = " \t\n;&|()<>"

RESERVED = frozenset(
    "if then else elif fi do done case esac while until for in { } ! select function".split()
)
_COMPOUND_OPENERS = {"if": "fi", "while": "done", "until": "done", "for": "done",
                     "select": "done", "case": "esac", "{": "}"}
# after these reserved words the next word starts a command
_CMD_PREFIX_WORDS = frozenset("if then else elif do while until { ! in".split()) - {"in"}


# -- words -------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    text: str

    @property
    def source(self) -> str:
        return self.text


@dataclass(frozen=True)
class Escaped:
    """A backslash-escaped character (never subject to globbing)."""

    char: str

    @property
    def source(self) -> str:
        return "\\" + self.char


@dataclass(frozen=True)
class VarRef:
    name: str
    brace: bool = False
    op: str | None = None
    arg: Word | None = None
    raw: str = ""

    @property
    def source(self) -> str:
        if self.raw:
            return self.raw
        return "${%s}" % self.name if self.brace else "$" + self.name


@dataclass(frozen=True)
class Tilde:
    user: str = ""

    @property
    def source(self) -> str:
        return "~" + self.user


@dataclass(frozen=True)
class CommandSub:
    """``$(...)``, backticks or ``$((...))``: value is never known."""

    raw: str

    @property
    def source(self) -> str:
        return self.raw


@dataclass(frozen=True)
class Quoted:
    quote: str
    parts: tuple[Segment, ...]
    raw: str = ""

    @property
    def source(self) -> str:
        if self.raw:
            return self.raw
        return self.quote + "".join(p.source for p in self.parts) + self.quote


Segment = Union[Literal, Escaped, VarRef, Tilde, CommandSub, Quoted]


@dataclass(frozen=True)
class Word:
    segments: tuple[Segment, ...]

    @property
    def source(self) -> str:
        return "".join(s.source for s in self.segments)

    @property
    def is_literal(self) -> bool:
        """True when the word contains no expansions at all."""
        return not any(_has_expansion(s) for s in self.segments)

    def literal(self) -> str | None:
        """Quote-removed text if the word has no expansions, else ``None``."""
        if not self.is_literal:
            return None
        return "".join(_plain(s) for s in self.segments)

    @classmethod
    def of(cls, text: str) -> Word:
        return cls((Literal(text),))


def _has_expansion(seg: Segment) -> bool:
    if isinstance(seg, (VarRef, Tilde, CommandSub)):
        return True
    if isinstance(seg, Quoted):
        return any(_has_expansion(p) for p in seg.parts)
    return False


def _plain(seg: Segment) -> str:
    if isinstance(seg, Literal):
        return seg.text
    if isinstance(seg, Escaped):
        return seg.char
    if isinstance(seg, Quoted):
        return "".join(_plain(p) for p in seg.parts)
    return ""


# -- syntax tree -------------------------------------------------------------

@dataclass
class Redirect:
    op: str
    target: Word
    fd: int | None = None


@dataclass
class SimpleCommand:
    words: list[Word] = field(default_factory=list)
    assignments: list[tuple[str, Word]] = field(default_factory=list)
    redirects: list[Redirect] = field(default_factory=list)

    @property
    def name(self) -> str | None:
        return self.words[0].literal() if self.words else None


@dataclass
class Subshell:
    body: ShellProgram
    redirects: list[Redirect] = field(default_factory=list)


@dataclass
class OpaqueNode:
    kind: str
    source: str


Command = Union[SimpleCommand, Subshell, OpaqueNode]


@dataclass
class Pipeline:
    commands: list[Command]
    negated: bool = False


@dataclass
class CommandList:
    """An and-or list: pipelines joined by ``&&``/``||``.

    ``terminator`` is the separator that ended the list (``;``, ``&``,
    ``"\\n"``) or ``None`` at end of input.
    """

    pipelines: list[Pipeline]
    operators: list[str] = field(default_factory=list)
    terminator: str | None = None

    @property
    def asynchronous(self) -> bool:
        return self.terminator == "&"


@dataclass
class ShellProgram:
    items: list[CommandList] = field(default_factory=list)

    def commands(self) -> list[Command]:
        """All commands, depth-first, including those inside subshells."""
        out: list[Command] = []
        for item in self.items:
            for pipe in item.pipelines:
                for cmd in pipe.commands:
                    out.append(cmd)
                    if isinstance(cmd, Subshell):
                        out.extend(cmd.body.commands())
        return out


# -- lexer -------------------------------------------------------------------

@dataclass
class _Tok:
    kind: str  # "word", "op", "newline", "eof"
    value: str
    start: int
    end: int
    word: Word | None = None
    fd: int | None = None


_OPERATORS = sorted(
    ["&&", "||", ";;", ";", "&", "|", "(", ")", "<<-", "<<", ">>", "<&", ">&",
     "<>", ">|", "<", ">", "&>>", "&>"],
    key=len, reverse=True,
)
_REDIRECT_OPS = frozenset(["<<-", "<<", ">>", "<&", ">&", "<>", ">|", "<", ">", "&>>", "&>"])


class _Lexer:
    def __init__(self, src: str) -> None:
        self.src = src
        self.pos = 0

    def tokens(self) -> list[_Tok]:
        out: list[_Tok] = []
        src = self.src
        while True:
            self._skip_blanks()
            if self.pos >= len(src):
                out.append(_Tok("eof", "", self.pos, self.pos))
                return out
            ch = src[self.pos]
            start = self.pos
            if ch == "\n":
                self.pos += 1
                out.append(_Tok("newline", "\n", start, self.pos))
                continue
            if ch == "#":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self.pos += 1
                continue
            # IO number: digits directly followed by a redirection operator
            m = re.match(r"\d+(?=[<>])", src[self.pos:])
            if m:
                self.pos += len(m.group(0))
                op = self._match_op()
                out.append(_Tok("op", op, start, self.pos, fd=int(m.group(0))))
                continue
            op = self._match_op()
            if op:
                out.append(_Tok("op", op, start, self.pos))
                continue
            word = self._word()
            out.append(_Tok("word", word.source, start, self.pos, word=word))

    def _skip_blanks(self) -> None:
        src = self.src
        while self.pos < len(src):
            if src[self.pos] in " \t":
                self.pos += 1
            elif src.startswith("\\\n", self.pos):
                self.pos += 2
            else:
                break

    def _match_op(self) -> str:
        for op in _OPERATORS:
            if self.src.startswith(op, self.pos):
                self.pos += len(op)
                return op
        return ""

    def _word(self) -> Word:
        segs = self._segments(stop=_METACHARS, at_word_start=True)
        return Word(tuple(segs))

    def _segments(self, stop: str, at_word_start: bool = False) -> list[Segment]:
        """Lex unquoted word content until an unquoted char in ``stop``."""
        src = self.src
        segs: list[Segment] = []
        buf: list[str] = []

        def flush() -> None:
            if buf:
                segs.append(Literal("".join(buf)))
                buf.clear()

        if at_word_start and self.pos < len(src) and src[self.pos] == "~":
            m = re.match(r"~([A-Za-z0-9_.-]*)", src[self.pos:])
            assert m
            end = self.pos + len(m.group(0))
            if end >= len(src) or src[end] == "/" or src[end] in stop:
                segs.append(Tilde(m.group(1)))
                self.pos = end

        while self.pos < len(src):
            ch = src[self.pos]
            if ch in stop:
                break
            if ch == "\\":
                if self.pos + 1 >= len(src):
                    buf.append("\\")
                    self.pos += 1
                    continue
                nxt = src[self.pos + 1]
                self.pos += 2
                if nxt == "\n":
                    continue
                flush()
                segs.append(Escaped(nxt))
            elif ch == "'":
                flush()
                end = src.find("'", self.pos + 1)
                if end < 0:
                    raise SyntaxFault("unterminated single quote")
                text = src[self.pos + 1:end]
                segs.append(Quoted("'", (Literal(text),) if text else (), src[self.pos:end + 1]))
                self.pos = end + 1
            elif ch == '"':
                flush()
                segs.append(self._double_quoted())
            elif ch == "$":
                flush()
                segs.append(self._dollar())
            elif ch == "`":
                flush()
                segs.append(self._backtick())
            else:
                buf.append(ch)
                self.pos += 1
        flush()
        return segs

    def _double_quoted(self) -> Quoted:
        src = self.src
        start = self.pos
        self.pos += 1
        parts: list[Segment] = []
        buf: list[str] = []

        def flush() -> None:
            if buf:
                parts.append(Literal("".join(buf)))
                buf.clear()

        while True:
            if self.pos >= len(src):
                raise SyntaxFault("unterminated double quote")
            ch = src[self.pos]
            if ch == '"':
                self.pos += 1
                break
            if ch == "\\" and self.pos + 1 < len(src) and src[self.pos + 1] in '$`"\\\n':
                nxt = src[self.pos + 1]
                self.pos += 2
                if nxt != "\n":
                    flush()
                    parts.append(Escaped(nxt))
            elif ch == "$":
                flush()
                parts.append(self._dollar())
            elif ch == "`":
                flush()
                parts.append(self._backtick())
            else:
                buf.append(ch)
                self.pos += 1
        flush()
        return Quoted('"', tuple(parts), src[start:self.pos])

    def _dollar(self) -> Segment:
        src = self.src
        start = self.pos
        nxt = src[self.pos + 1] if self.pos + 1 < len(src) else ""
        if nxt == "(":
            end = _match_paren(src, self.pos + 1)
            if end < 0:
                raise SyntaxFault("unmatched parenthesis in command substitution")
            self.pos = end + 1
            return CommandSub(src[start:self.pos])
        if nxt == "{":
            return self._brace_param()
        if nxt and (nxt.isalpha() or nxt == "_"):
            m = _NAME_RE.match(src, self.pos + 1)
            assert m
            self.pos = m.end()
            return VarRef(m.group(0))
        if nxt and nxt in _SPECIAL_PARAMS:
            self.pos += 2
            return VarRef(nxt)
        self.pos += 1
        return Literal("$")

    def _brace_param(self) -> VarRef:
        src = self.src
        start = self.pos
        end = _match_brace(src, self.pos + 1)
        if end < 0:
            raise SyntaxFault("unterminated ${ parameter expansion")
        inner = src[self.pos + 2:end]
        self.pos = end + 1
        raw = src[start:self.pos]
        if inner.startswith("#") and len(inner) > 1:
            return VarRef(inner[1:], True, "length", None, raw)
        m = _NAME_RE.match(inner) or re.match(r"[@*#?$!\-0-9]", inner)
        if not m:
            raise SyntaxFault(f"bad substitution {raw!r}")
        name = m.group(0)
        rest = inner[m.end():]
        if not rest:
            return VarRef(name, True, None, None, raw)
        for op in (":-", ":=", ":+", ":?", "-", "=", "+", "?", "##", "#", "%%", "%", "//", "/", ":"):
            if rest.startswith(op):
                arg_src = rest[len(op):]
                sub = _Lexer(arg_src)
                arg = Word(tuple(sub._segments(stop="")))
                return VarRef(name, True, op, arg, raw)
        raise SyntaxFault(f"bad substitution {raw!r}")

    def _backtick(self) -> CommandSub:
        src = self.src
        i = self.pos + 1
        while i < len(src):
            if src[i] == "\\":
                i += 2
                continue
            if src[i] == "`":
                raw = src[self.pos:i + 1]
                self.pos = i + 1
                return CommandSub(raw)
            i += 1
        raise SyntaxFault("unterminated backtick")


def _skip_quoted(src: str, i: int) -> int:
    """Index just past the quoted string starting at ``src[i]``; -1 if open."""
    q = src[i]
    if q == "'":
        end = src.find("'", i + 1)
        return -1 if end < 0 else end + 1
    i += 1
    while i < len(src):
        if src[i] == "\\":
            i += 2
            continue
        if src[i] == q:
            return i + 1
        i += 1
    return -1


def _match_paren(src: str, i: int) -> int:
    """Given ``src[i] == '('``, return the index of the matching ``)``."""
    depth = 0
    while i < len(src):
        ch = src[i]
        if ch in "'\"`":
            i = _skip_quoted(src, i)
            if i < 0:
                return -1
            continue
        if ch == "\\":
            i += 2
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return -1


def _match_brace(src: str, i: int) -> int:
    """Given ``src[i] == '{'``, return the index of the matching ``}``."""
    depth = 0
    while i < len(src):
        ch = src[i]
        if ch in "'\"`":
            i = _skip_quoted(src, i)
            if i < 0:
                return -1
            continue
        if ch == "\\":
            i += 2
            continue
        if ch == "$" and src.startswith("$(", i):
            end = _match_paren(src, i + 1)
            if end < 0:
                return -1
            i = end + 1
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return -1


# -- parser ------------------------------------------------------------------

def parse_word(text: str) -> Word:
    """Lex ``text`` as a single word, blanks included.

    Dockerfile instructions other than ``RUN`` substitute variables and
    remove quotes this way, one argument at a time.
    """
    lexer = _Lexer(text)
    return Word(tuple(lexer._segments(stop="")))


def parse_shell(script: str) -> ShellProgram:
    """Parse ``script`` into a :class:`ShellProgram`.

    Raises :class:`SyntaxFault` on unterminated quotes, unmatched parentheses
    and operators missing an operand.
    """
    tokens = _Lexer(script).tokens()
    parser = _Parser(script, tokens)
    program = parser.program(top=True)
    return program


class _Parser:
    def __init__(self, src: str, tokens: list[_Tok]) -> None:
        self.src = src
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def _skip_newlines(self) -> None:
        while self.tok.kind == "newline":
            self.i += 1

    def _is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in ops

    def _reserved(self) -> str | None:
        t = self.tok
        if t.kind == "word" and t.word is not None:
            lit = t.word.literal()
            if lit in RESERVED and t.word.source == lit:
                return lit
        return None

    def program(self, top: bool = False) -> ShellProgram:
        prog = ShellProgram()
        self._skip_newlines()
        while self.tok.kind != "eof":
            if self._is_op(")"):
                if top:
                    raise SyntaxFault("unmatched parenthesis ')'")
                break
            item = self.and_or()
            if self._is_op(";", "&"):
                item.terminator = self._next().value
            elif self.tok.kind == "newline":
                item.terminator = "\n"
            prog.items.append(item)
            self._skip_newlines()
        return prog

    def and_or(self) -> CommandList:
        lst = CommandList([self.pipeline()])
        while self._is_op("&&", "||"):
            lst.operators.append(self._next().value)
            self._skip_newlines()
            lst.pipelines.append(self.pipeline())
        return lst

    def pipeline(self) -> Pipeline:
        negated = False
        if self._reserved() == "!":
            self._next()
            negated = True
        pipe = Pipeline([self.command()], negated)
        while self._is_op("|"):
            self._next()
            self._skip_newlines()
            pipe.commands.append(self.command())
        return pipe

    def command(self) -> Command:
        t = self.tok
        if t.kind == "eof" or t.kind == "newline":
            raise SyntaxFault("unexpected end of command")
        if t.kind == "op":
            if t.value == "(":
                return self.subshell()
            if t.value not in _REDIRECT_OPS:
                raise SyntaxFault(f"syntax error near unexpected token {t.value!r}")
        kw = self._reserved()
        if kw is not None:
            if kw in _COMPOUND_OPENERS:
                return self.compound(kw)
            if kw == "function":
                return self.function_keyword()
            raise SyntaxFault(f"syntax error near unexpected token {kw!r}")
        # NAME ( ) compound-command
        if (
            t.kind == "word"
            and self.toks[self.i + 1].kind == "op" and self.toks[self.i + 1].value == "("
        ):
            return self.function_definition()
        return self.simple_command()

    def subshell(self) -> Command:
        start = self._next().start
        body = self.program()
        if not self._is_op(")"):
            raise SyntaxFault("unmatched parenthesis '('")
        self._next()
        redirects = self._redirects()
        if not body.items:
            raise SyntaxFault("empty subshell", 0)
        del start
        return Subshell(body, redirects)

    def _redirects(self) -> list[Redirect]:
        out = []
        while self.tok.kind == "op" and self.tok.value in _REDIRECT_OPS:
            out.append(self._redirect())
        return out

    def _redirect(self) -> Redirect:
        op_tok = self._next()
        target = self._next()
        if target.kind != "word" or target.word is None:
            raise SyntaxFault(f"missing redirection target after {op_tok.value!r}")
        return Redirect(op_tok.value, target.word, op_tok.fd)

    def simple_command(self) -> Command:
        start = self.tok.start
        cmd = SimpleCommand()
        heredoc = False
        while True:
            t = self.tok
            if t.kind == "op" and t.value in _REDIRECT_OPS:
                r = self._redirect()
                if r.op in ("<<", "<<-"):
                    heredoc = True
                cmd.redirects.append(r)
            elif t.kind == "word" and t.word is not None:
                self._next()
                if not cmd.words and _ASSIGN_RE.match(t.word.source):
                    name, _, _ = t.word.source.partition("=")
                    cmd.assignments.append((name, _strip_prefix(t.word, len(name) + 1)))
                else:
                    cmd.words.append(t.word)
            elif t.kind == "op" and t.value == "(":
                raise SyntaxFault("syntax error near unexpected token '('")
            else:
                break
        if heredoc:
            return OpaqueNode("heredoc", self.src[start:self.toks[self.i - 1].end])
        return cmd

    def _skip_compound(self, opener: str) -> None:
        """Consume tokens up to and including the closer of ``opener``."""
        stack = [_COMPOUND_OPENERS[opener]]
        # words right after for/select/case are operands, not commands
        cmd_pos = opener not in ("for", "select", "case")
        while stack:
            t = self._next()
            if t.kind == "eof":
                raise SyntaxFault(f"unterminated '{opener}' (expected '{stack[-1]}')")
            if t.kind in ("newline", "op"):
                if t.value in _REDIRECT_OPS:
                    self._next()  # redirection target
                    continue
                cmd_pos = True
                continue
            word = t.word.literal() if t.word is not None else None
            is_kw = word is not None and t.word is not None and t.word.source == word
            if cmd_pos and is_kw and word in _COMPOUND_OPENERS:
                stack.append(_COMPOUND_OPENERS[word])
                cmd_pos = word not in ("for", "select", "case")
                continue
            if cmd_pos and is_kw and word == stack[-1]:
                stack.pop()
                cmd_pos = False
                continue
            cmd_pos = bool(is_kw and word in _CMD_PREFIX_WORDS)

    def compound(self, opener: str) -> OpaqueNode:
        start = self.tok.start
        self._next()
        self._skip_compound(opener)
        self._redirects()
        return OpaqueNode(opener, self.src[start:self.toks[self.i - 1].end])

    def function_definition(self) -> OpaqueNode:
        start = self.tok.start
        self._next()  # name
        self._next()  # (
        if not self._is_op(")"):
            raise SyntaxFault("syntax error in function definition")
        self._next()
        self._skip_newlines()
        self._function_body()
        return OpaqueNode("function", self.src[start:self.toks[self.i - 1].end])

    def function_keyword(self) -> OpaqueNode:
        start = self.tok.start
        self._next()  # function
        self._next()  # name
        if self._is_op("("):
            self._next()
            if not self._is_op(")"):
                raise SyntaxFault("syntax error in function definition")
            self._next()
        self._skip_newlines()
        self._function_body()
        return OpaqueNode("function", self.src[start:self.toks[self.i - 1].end])

    def _function_body(self) -> None:
        kw = self._reserved()
        if kw in _COMPOUND_OPENERS:
            self._next()
            self._skip_compound(kw)
        elif self._is_op("("):
            self.subshell()
        else:
            raise SyntaxFault("function body must be a compound command")
        self._redirects()


def _strip_prefix(word: Word, n: int) -> Word:
    """Drop the first ``n`` characters of the word's leading literal text."""
    segs = list(word.segments)
    out: list[Segment] = []
    for seg in segs:
        if n <= 0:
            out.append(seg)
            continue
        if isinstance(seg, Literal):
            if len(seg.text) <= n:
                n -= len(seg.text)
                continue
            out.append(Literal(seg.text[n:]))
            n = 0
        else:
            out.append(seg)
            n = 0
    # a leading ~ after NAME= is a tilde prefix in assignments
    if out and isinstance(out[0], Literal) and out[0].text.startswith("~"):
        m = re.match(r"~([A-Za-z0-9_.-]*)", out[0].text)
        assert m
        tail = out[0].text[m.end():]
        if not tail or tail.startswith("/"):
            out[0:1] = [Tilde(m.group(1))] + ([Literal(tail)] if tail else [])
    return Word(tuple(out))


# -- expansion ---------------------------------------------------------------

class VariableLookup(Protocol):
    def lookup(self, name: str) -> tuple[str | None, bool]:
        """Return ``(value, precise)``; ``value`` is ``None`` when unset."""


@dataclass(frozen=True)
class ExpandedValue:
    text: str
    fuzzy: bool = False
    #: glob pattern (quoted parts escaped) when the word has unquoted glob chars
    pattern: str | None = None


class _Expander:
    def __init__(self, vars: VariableLookup, home: ExpandedValue | None) -> None:
        self.vars = vars
        self.home = home
        self.fuzzy = False

    def value(self, ref: VarRef) -> str:
        if ref.name in _SPECIAL_PARAMS or ref.name.isdigit():
            self.fuzzy = True
            return ""
        val, precise = self.vars.lookup(ref.name)
        op = ref.op
        if op is None:
            if not precise:
                self.fuzzy = True
                return ""
            return val or ""
        if op == "length":
            if not precise:
                self.fuzzy = True
                return ""
            return str(len(val or ""))
        arg_text = ""
        if ref.arg is not None:
            sub = _Expander(self.vars, self.home)
            arg_text = sub.word(ref.arg)
            self.fuzzy |= sub.fuzzy
        if op in (":-", ":=", "-", "="):
            if not precise:
                self.fuzzy = True
                return arg_text
            unset = val is None or (op.startswith(":") and val == "")
            return arg_text if unset else val or ""
        if op in (":+", "+"):
            if not precise:
                self.fuzzy = True
                return ""
            unset = val is None or (op.startswith(":") and val == "")
            return "" if unset else arg_text
        if op in ("#", "##", "%", "%%") and precise:
            return _trim(val or "", op, arg_text)
        self.fuzzy = True
        return ""

    def tilde(self, seg: Tilde) -> str:
        if seg.user:
            self.fuzzy = True
            return ""
        if self.home is not None:
            self.fuzzy |= self.home.fuzzy
            return self.home.text
        val, precise = self.vars.lookup("HOME")
        if not precise:
            self.fuzzy = True
        return val or ""

    def segment(self, seg: Segment) -> str:
        if isinstance(seg, Literal):
            return seg.text
        if isinstance(seg, Escaped):
            return seg.char
        if isinstance(seg, Quoted):
            return "".join(self.segment(p) for p in seg.parts)
        if isinstance(seg, VarRef):
            return self.value(seg)
        if isinstance(seg, Tilde):
            return self.tilde(seg)
        self.fuzzy = True  # command substitution
        return ""

    def word(self, w: Word) -> str:
        return "".join(self.segment(s) for s in w.segments)


def _trim(value: str, op: str, pattern: str) -> str:
    if op in ("#", "##"):
        cuts = range(len(value) + 1) if op == "#" else range(len(value), -1, -1)
        for i in cuts:
            if fnmatch.fnmatchcase(value[:i], pattern):
                return value[i:]
        return value
    cuts = range(len(value), -1, -1) if op == "%" else range(len(value) + 1)
    for i in cuts:
        if fnmatch.fnmatchcase(value[i:], pattern):
            return value[:i]
    return value


def expand_word(w: Word, vars: VariableLookup, home: ExpandedValue | None = None) -> ExpandedValue:
    """Expand a word into a single value without field splitting or globbing.

    Fuzzy or unknown variables expand to the empty string and mark the
    result fuzzy.
    """
    exp = _Expander(vars, home)
    text = exp.word(w)
    if any(isinstance(s, CommandSub) or (isinstance(s, Quoted) and _has_cmdsub(s)) for s in w.segments):
        exp.fuzzy = True
    return ExpandedValue(text, exp.fuzzy, _glob_pattern(w, exp) if _has_glob(w) else None)


def _has_cmdsub(seg: Quoted) -> bool:
    return any(isinstance(p, CommandSub) for p in seg.parts)


def _has_glob(w: Word) -> bool:
    return any(isinstance(s, Literal) and any(c in s.text for c in _GLOB_CHARS) for s in w.segments)


def _escape_glob(text: str) -> str:
    return re.sub(r"([*?\[])", r"[\1]", text)


def _glob_pattern(w: Word, exp: _Expander) -> str:
    probe = _Expander(exp.vars, exp.home)
    parts = []
    for s in w.segments:
        if isinstance(s, Literal):
            parts.append(s.text)
        else:
            parts.append(_escape_glob(probe.segment(s)))
    return "".join(parts)


def expand_fields(w: Word, vars: VariableLookup, home: ExpandedValue | None = None) -> list[ExpandedValue]:
    """Expand a word into argument fields, splitting unquoted expansions.

    Globbing is left to the caller, which knows the relevant file tree; a
    field that needs it carries a ``pattern``.
    """
    exp = _Expander(vars, home)
    fields: list[list[str]] = [[]]
    quoted_any = False
    split_happened = False
    for seg in w.segments:
        if isinstance(seg, (VarRef, CommandSub)):
            text = exp.segment(seg)
            pieces = text.split()
            if not pieces:
                continue
            if text[:1].isspace() and fields[-1]:
                fields.append([])
            for k, piece in enumerate(pieces):
                if k:
                    fields.append([])
                    split_happened = True
                fields[-1].append(piece)
            if text[-1:].isspace():
                fields.append([])
        else:
            if isinstance(seg, Quoted):
                quoted_any = True
            fields[-1].append(exp.segment(seg))
    if any(isinstance(s, CommandSub) for s in w.segments) or any(
        isinstance(s, Quoted) and _has_cmdsub(s) for s in w.segments
    ):
        exp.fuzzy = True
    texts = ["".join(f) for f in fields]
    texts = [t for t in texts if t] or ([""] if (quoted_any or exp.fuzzy) else [])
    pattern = None
    if _has_glob(w) and not split_happened and len(texts) == 1:
        pattern = _glob_pattern(w, exp)
    return [ExpandedValue(t, exp.fuzzy, pattern) for t in texts]
