"""Vocabulary files: named groundings supplied by the host environment.

A vocabulary JSON document has a single top-level key ``vocabulary`` holding
entries. Each entry names a grounding and gives just enough typing to check
programs against it. Entries are either self-grounding (inline ``value`` or
factor ``indices``) or carry a ``key`` that host code binds to a callable
with ``register_grounding``. Typechecking needs only the entry; evaluation
of a keyed entry demands a bound callable.

Entry shapes by kind:

    factor          indices (state components, 0-based)
    feature         value | key   [dim] [domain]
    proposition     value | key   [domain]
    constant        value
    action          value (number or list of numbers)
    policy          key
    effect          key
    learnable_policy  (nothing else)
    attribute_map   attributes: {attr: {type, [indices]}}

Unknown fields anywhere are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DuplicateKeyError, DuplicateNameError, SchemaError

KINDS = frozenset(
    {"factor", "feature", "proposition", "constant", "action", "policy",
     "effect", "learnable_policy", "attribute_map"}
)
ATTR_TYPES = frozenset({"int", "float", "bool"})
DOMAIN_ELEMENTS = ("S", "A", "S'")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    type: str
    indices: tuple[int, ...] | None = None


@dataclass(frozen=True)
class VocabularyEntry:
    name: str
    kind: str
    value: object = None
    indices: tuple[int, ...] | None = None
    key: str | None = None
    domain: frozenset[str] | None = None
    dim: int | None = None
    attributes: dict[str, AttributeSpec] | None = None


def _schema_error(path: str, message: str) -> SchemaError:
    return SchemaError(f"{path}: {message}")


def _require_index_list(raw, path) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw or not all(isinstance(i, int) and not isinstance(i, bool) and i >= 0 for i in raw):
        raise _schema_error(path, "indices must be a non-empty list of non-negative integers")
    return tuple(raw)


def _parse_domain(raw, path) -> frozenset[str]:
    if not isinstance(raw, list) or not raw or any(d not in DOMAIN_ELEMENTS for d in raw):
        raise _schema_error(path, "domain must be a non-empty list drawn from ['S', 'A', \"S'\"]")
    return frozenset(raw)


def _check_value(raw, path):
    # Inline values: bool, number, or (nested) numeric list.
    if isinstance(raw, bool) or isinstance(raw, (int, float)):
        return raw
    if isinstance(raw, list):
        for i, item in enumerate(raw):
            _check_value(item, f"{path}[{i}]")
        return raw
    raise _schema_error(path, "value must be a bool, number, or list of numbers")


_ALLOWED_FIELDS = {
    "factor": {"indices"},
    "feature": {"value", "key", "dim", "domain"},
    "proposition": {"value", "key", "domain"},
    "constant": {"value"},
    "action": {"value"},
    "policy": {"key"},
    "effect": {"key"},
    "learnable_policy": set(),
    "attribute_map": {"attributes"},
}


def parse_entry(raw: dict, path: str) -> VocabularyEntry:
    if not isinstance(raw, dict):
        raise _schema_error(path, "entry must be an object")
    unknown = set(raw) - {"name", "kind"} - set().union(*_ALLOWED_FIELDS.values())
    if unknown:
        raise _schema_error(path, f"unknown field(s): {', '.join(sorted(unknown))}")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise _schema_error(path, "missing or invalid name")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise _schema_error(path, f"unknown kind {kind!r}")
    allowed = _ALLOWED_FIELDS[kind]
    extras = set(raw) - {"name", "kind"} - allowed
    if extras:
        raise _schema_error(path, f"field(s) not allowed for kind {kind}: {', '.join(sorted(extras))}")

    value = None
    indices = None
    key = raw.get("key")
    domain = None
    dim = raw.get("dim")
    attributes = None

    if key is not None and not isinstance(key, str):
        raise _schema_error(path, "key must be a string")
    if dim is not None and (not isinstance(dim, int) or isinstance(dim, bool) or dim < 1):
        raise _schema_error(path, "dim must be a positive integer")
    if "domain" in raw:
        domain = _parse_domain(raw["domain"], f"{path}.domain")
    if "value" in raw:
        value = _check_value(raw["value"], f"{path}.value")
    if "indices" in raw:
        indices = _require_index_list(raw["indices"], f"{path}.indices")

    if kind == "factor" and indices is None:
        raise _schema_error(path, "factor entries require indices")
    if kind in ("feature", "proposition") and (value is None) == (key is None):
        raise _schema_error(path, f"{kind} entries require exactly one of value or key")
    if kind == "constant" and "value" not in raw:
        raise _schema_error(path, "constant entries require a value")
    if kind == "action":
        if "value" not in raw:
            raise _schema_error(path, "action entries require a value")
        v = raw["value"]
        ok = (isinstance(v, (int, float)) and not isinstance(v, bool)) or (
            isinstance(v, list) and v and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
        )
        if not ok:
            raise _schema_error(path, "action value must be a number or list of numbers")
    if kind in ("policy", "effect") and key is None:
        raise _schema_error(path, f"{kind} entries require a key")
    if kind == "proposition" and value is not None and not isinstance(value, bool):
        raise _schema_error(path, "inline proposition values must be booleans")
    if kind == "attribute_map":
        raw_attrs = raw.get("attributes")
        if not isinstance(raw_attrs, dict) or not raw_attrs:
            raise _schema_error(path, "attribute_map entries require a non-empty attributes object")
        attributes = {}
        for attr_name, spec in raw_attrs.items():
            spec_path = f"{path}.attributes.{attr_name}"
            if not isinstance(spec, dict):
                raise _schema_error(spec_path, "attribute spec must be an object")
            bad = set(spec) - {"type", "indices"}
            if bad:
                raise _schema_error(spec_path, f"unknown field(s): {', '.join(sorted(bad))}")
            atype = spec.get("type")
            if atype not in ATTR_TYPES:
                raise _schema_error(spec_path, f"attribute type must be one of {sorted(ATTR_TYPES)}")
            aidx = _require_index_list(spec["indices"], f"{spec_path}.indices") if "indices" in spec else None
            attributes[attr_name] = AttributeSpec(attr_name, atype, aidx)

    return VocabularyEntry(
        name=name, kind=kind, value=value, indices=indices, key=key,
        domain=domain, dim=dim, attributes=attributes,
    )


def load_vocabulary(path: str) -> list[VocabularyEntry]:
    """Parse one vocabulary JSON file into entries (registry-independent)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or set(doc) != {"vocabulary"}:
        raise SchemaError(f"{path}: document must be an object with the single key 'vocabulary'")
    items = doc["vocabulary"]
    if not isinstance(items, list):
        raise SchemaError(f"{path}: 'vocabulary' must be a list")
    return [parse_entry(raw, f"{path}: vocabulary[{i}]") for i, raw in enumerate(items)]


class VocabularyRegistry:
    """Named vocabulary entries plus host callables bound to grounding keys.

    Loading the same files in the same order yields identical registries;
    duplicate names and duplicate keys are rejected outright.
    """

    def __init__(self):
        self.entries: dict[str, VocabularyEntry] = {}
        self._callables: dict[str, object] = {}

    def add(self, entry: VocabularyEntry) -> None:
        if entry.name in self.entries:
            raise DuplicateNameError(f"vocabulary entry {entry.name!r} declared twice")
        self.entries[entry.name] = entry

    def add_all(self, entries) -> None:
        for entry in entries:
            self.add(entry)

    def load(self, path: str) -> None:
        self.add_all(load_vocabulary(path))

    def register_grounding(self, key: str, fn) -> None:
        if key in self._callables:
            raise DuplicateKeyError(f"grounding key {key!r} registered twice")
        self._callables[key] = fn

    def callable_for(self, key: str):
        return self._callables.get(key)

    def get(self, name: str) -> VocabularyEntry | None:
        return self.entries.get(name)
