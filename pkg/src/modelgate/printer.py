"""Canonical text form and content hashing.

The canonical form is what gets stored, displayed, and hashed: one
declaration per line, two-space indent, comments gone, declaration order
untouched. Names print bare when they are plain identifiers and quoted
otherwise, so empty and exotic names survive a round trip.
"""

from __future__ import annotations

import hashlib

from .model import (
    AssocEnd,
    AttrDecl,
    ClassDecl,
    ModelUnit,
    OpDecl,
    is_identifier,
)

_ESCAPE_MAP = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quoted(text: str) -> str:
    return '"' + "".join(_ESCAPE_MAP.get(ch, ch) for ch in text) + '"'


def _name(text: str) -> str:
    return text if is_identifier(text) else _quoted(text)


def _attr_line(attr: AttrDecl) -> str:
    line = f"attr {_name(attr.name)}: {attr.type_ref}"
    if attr.multiplicity is not None:
        m = attr.multiplicity
        line += f" [{m.lower}..{'*' if m.upper is None else m.upper}]"
    return line


def _op_line(op: OpDecl) -> str:
    params = ", ".join(f"{_name(p.name)}: {p.type_ref}" for p in op.params)
    line = f"op {_name(op.name)}({params})"
    if op.return_type is not None:
        line += f": {op.return_type}"
    return line


def _class_lines(cls: ClassDecl) -> list[str]:
    header = "abstract class" if cls.is_abstract else "class"
    header += f" {_name(cls.name)}"
    if cls.supertypes:
        header += " extends " + ", ".join(cls.supertypes)
    lines = [f"  {header} {{"]
    for attr in cls.attributes:
        lines.append(f"    {_attr_line(attr)}")
    for op in cls.operations:
        lines.append(f"    {_op_line(op)}")
    lines.append("  }")
    return lines


def _end_text(end: AssocEnd) -> str:
    return f"{end.class_ref} {_quoted(end.multiplicity.text())}"


def canonical_print(m: ModelUnit) -> str:
    lines = [f"model {m.name} {{"]
    purpose = f"  purpose {_quoted(m.purpose.text)}"
    if m.purpose.keywords:
        purpose += " keywords " + ", ".join(m.purpose.keywords)
    lines.append(purpose)
    for cls in m.classes:
        lines.extend(_class_lines(cls))
    for assoc in m.associations:
        label = f"assoc {assoc.name} " if assoc.name else "assoc "
        lines.append(f"  {label}{_end_text(assoc.end_a)} -- {_end_text(assoc.end_b)}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def content_hash(m: ModelUnit) -> str:
    """Lowercase SHA-256 hex of the canonical text; 64 characters."""
    return hashlib.sha256(canonical_print(m).encode("utf-8")).hexdigest()
