"""Random contexts and command lines for property checks."""

from __future__ import annotations

import random

from dockmock.context import (
    Context,
    ExecutableList,
    VariableMap,
    directory,
    fuzz_path,
    put_node,
    regular,
)
from dockmock.context import DEFAULT_PATH, SHELL_BUILTINS
from dockmock.errors import ConflictFault
from dockmock.mocks import COMMANDS

NAMES = ("a", "b", "src", "app", "package.json", "requirements.txt", "Makefile", "x.tar.gz")
FLAGS = ("-r", "-p", "-f", "-rf", "-y", "-q", "--help", "-v", "-o", "-C", "install", "-R", "-e")


def random_path(rng: random.Random, absolute: bool | None = None) -> str:
    parts = [rng.choice(NAMES) for _ in range(rng.randint(1, 3))]
    path = "/".join(parts)
    if absolute is None:
        absolute = rng.random() < 0.5
    return "/" + path if absolute else path


def random_tree(rng: random.Random):
    tree = directory(fuzzy=rng.random() < 0.3)
    for _ in range(rng.randint(0, 12)):
        path = random_path(rng, absolute=True)
        node = directory() if rng.random() < 0.5 else regular(fuzzy=rng.random() < 0.2)
        try:
            tree = put_node(tree, path, node)
        except ConflictFault:
            pass
    for _ in range(rng.randint(0, 3)):
        tree = fuzz_path(tree, random_path(rng, absolute=True))
    return tree


def random_context(rng: random.Random) -> Context:
    entries = {"PATH": DEFAULT_PATH, "HOME": "/root"}
    for name in ("A", "B", "D"):
        if rng.random() < 0.5:
            entries[name] = random_path(rng)
    vars = VariableMap.precise(entries)
    if rng.random() < 0.4:
        vars = vars.fuzzed()
    exes = set(rng.sample(sorted(COMMANDS.names()), k=rng.randint(0, 30))) | SHELL_BUILTINS
    return Context(
        vars=vars,
        container=random_tree(rng),
        container_fuzzy=rng.random() < 0.5,
        workspace=random_tree(rng),
        executables=ExecutableList(frozenset(exes), fuzzy=rng.random() < 0.3),
        workdir=random_path(rng, absolute=True) if rng.random() < 0.5 else "/",
        workdir_fuzzy=rng.random() < 0.2,
        assume=rng.random() < 0.7,
        autofix=rng.random() < 0.7,
    )


def random_word(rng: random.Random) -> str:
    roll = rng.random()
    if roll < 0.45:
        return random_path(rng)
    if roll < 0.7:
        return rng.choice(FLAGS)
    if roll < 0.8:
        return rng.choice(("$A", "${B}/x", '"$D"', "$UNSET", "~/y"))
    if roll < 0.9:
        return rng.choice(("$(pwd)", "`date`", "*.json", "src/*"))
    return rng.choice(("1", "x", "--", "-"))


def random_command(rng: random.Random) -> str:
    names = sorted(COMMANDS.names())
    name = rng.choice(names) if rng.random() < 0.9 else rng.choice(("frob", "./run.sh", "/bin/x"))
    words = [name] + [random_word(rng) for _ in range(rng.randint(0, 4))]
    if rng.random() < 0.15:
        words += [rng.choice((">", ">>", "2>")), random_path(rng)]
    return " ".join(words)


def random_script(rng: random.Random) -> str:
    parts = [random_command(rng)]
    for _ in range(rng.randint(0, 2)):
        parts += [rng.choice(("&&", "||", ";", "|")), random_command(rng)]
    script = " ".join(parts)
    return f"({script})" if rng.random() < 0.1 else script
