"""Load programs from disk: parse, resolve vocabulary imports, check."""

from __future__ import annotations

import os

from .parser import parse_program
from .semantics import CheckedProgram, check_program
from .vocab import VocabularyRegistry, load_vocabulary


def load_program(
    path: str,
    registry: VocabularyRegistry | None = None,
    groundings: dict | None = None,
) -> CheckedProgram:
    """Parse and check the program at ``path``.

    ``import "x.json"`` lines resolve relative to the program file and add
    their entries to the registry. Callables for keyed entries may be
    supplied up front via ``groundings`` (key -> callable).
    """
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    return check_source(source, path, registry, groundings)


def check_source(
    source: str,
    path: str | None = None,
    registry: VocabularyRegistry | None = None,
    groundings: dict | None = None,
) -> CheckedProgram:
    parsed = parse_program(source, path)
    if registry is None:
        registry = VocabularyRegistry()
    base = os.path.dirname(path) if path else "."
    for rel in parsed.imports:
        vocab_path = rel if os.path.isabs(rel) else os.path.join(base, rel)
        registry.add_all(load_vocabulary(vocab_path))
    if groundings:
        for key, fn in groundings.items():
            registry.register_grounding(key, fn)
    return check_program(parsed, registry, path)
