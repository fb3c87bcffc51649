"""Shadow execution: run random command sequences in the mock and in dash.

Every argument is a literal relative path, so the same text works in both
worlds. ``$R`` names the sandbox root; the mock knows it as ``/sandbox`` and
the real shell as a temporary directory.
"""

from __future__ import annotations

import os
import random
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

from dockmock.context import Context, ExecutableList, VariableMap, directory, get_node
from dockmock.context import DEFAULT_PATH
from dockmock.faults import Status
from dockmock.mocks import run_program
from dockmock.shell import parse_shell

ROOT = "/sandbox"
NAMES = ("a", "b", "c")
SHELL = shutil.which("dash") or "/bin/sh"


def random_path(rng: random.Random) -> str:
    depth = rng.choice((1, 1, 1, 2, 2, 3))
    return "/".join(rng.choice(NAMES) for _ in range(depth))


def random_command(rng: random.Random) -> str:
    p, q = random_path(rng), random_path(rng)
    kind = rng.choice(("mkdir", "mkdir", "cp", "mv", "rm", "cd", "touch", "echo", "echo"))
    if kind == "mkdir":
        return f"mkdir {rng.choice(('', '-p '))}{p}"
    if kind == "cp":
        return f"cp {rng.choice(('', '-r ', '-R '))}{p} {q}"
    if kind == "mv":
        return f"mv {p} {q}"
    if kind == "rm":
        return f"rm {rng.choice(('', '-f ', '-r ', '-rf '))}{p}"
    if kind == "cd":
        # `cd ..` could climb out of the sandbox, where the two worlds differ
        return rng.choice((f"cd {p}", 'cd "$R"'))
    if kind == "touch":
        return f"touch {p}"
    return f"echo {rng.choice(('x', 'y'))} {rng.choice(('>', '>>'))} {p}"


def random_sequence(rng: random.Random, max_len: int = 20) -> list[str]:
    return [random_command(rng) for _ in range(rng.randint(1, max_len))]


def sandbox_context() -> Context:
    vars = VariableMap.precise({"PATH": DEFAULT_PATH, "R": ROOT, "HOME": "/root"})
    return Context(
        vars=vars,
        container=directory({"sandbox": directory({})}),
        executables=ExecutableList(frozenset({"mkdir", "cp", "mv", "rm", "cd", "touch", "echo"})),
        workdir=ROOT,
        autofix=False,
    )


@dataclass
class Run:
    statuses: list[bool]  # True when the command failed
    shape: dict[str, str]
    fuzzy: list[int]  # indexes of commands with a fuzzy result


def run_mock(commands: list[str]) -> Run:
    ctx = sandbox_context()
    failed, fuzzy = [], []
    for k, text in enumerate(commands):
        result, ctx = run_program(parse_shell(text), ctx)
        failed.append(result.status is Status.CONFLICT)
        if result.status is Status.FUZZY:
            fuzzy.append(k)
    node = get_node(ctx.container, ROOT)
    return Run(failed, node.shape() if node is not None else {}, fuzzy)


def run_real(commands: list[str]) -> Run:
    with tempfile.TemporaryDirectory() as tmp:
        root = os.path.join(tmp, "sandbox")
        os.mkdir(root)
        script = ['R="$1"', 'cd "$R"'] + [f'{c}\necho "@$?"' for c in commands]
        proc = subprocess.run([SHELL, "-c", "\n".join(script), "shadow", root],
                              capture_output=True, text=True, timeout=30)
        codes = [line[1:] for line in proc.stdout.splitlines() if line.startswith("@")]
        if len(codes) != len(commands):
            raise RuntimeError(f"shell stopped early: {proc.stderr}")
        shape = {}
        for dirpath, dirnames, filenames in os.walk(root):
            rel = dirpath[len(root):]
            for d in dirnames:
                shape[f"{rel}/{d}"] = "directory"
            for f in filenames:
                shape[f"{rel}/{f}"] = "regular"
        return Run([c != "0" for c in codes], dict(sorted(shape.items())), [])


def compare(commands: list[str]) -> list[str]:
    """Human-readable mismatches between the mock and the real shell."""
    mock, real = run_mock(commands), run_real(commands)
    problems = []
    for k, (m, r) in enumerate(zip(mock.statuses, real.statuses)):
        if k in mock.fuzzy:
            problems.append(f"#{k} {commands[k]!r}: mock result is fuzzy")
        elif m != r:
            problems.append(f"#{k} {commands[k]!r}: mock {'fails' if m else 'succeeds'}, "
                            f"dash {'fails' if r else 'succeeds'}")
    if mock.shape != real.shape:
        problems.append(f"trees differ: mock={mock.shape} dash={real.shape}")
    return problems
