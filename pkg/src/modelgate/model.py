"""AST for the class-model language.

All nodes are frozen dataclasses with tuple-valued children, so structural
equality and hashing come for free and parsed models are safe to share
between threads. Declaration order is always preserved; nothing here sorts.

Element paths (``Song.op.findAll``, ``class[2]``, ``assoc[0].end_a``) are the
addressing scheme used by findings, overrides, and resolution issues. Unnamed
elements fall back to their declaration index so a path stays stable when
unrelated elements are renamed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

BUILTIN_TYPES = frozenset({"String", "Int", "Float", "Bool", "Date"})

KEYWORDS = frozenset(
    {"model", "purpose", "keywords", "abstract", "class", "extends", "attr", "op", "assoc"}
)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def is_identifier(text: str) -> bool:
    """True if ``text`` can appear bare (unquoted) in model source."""
    return bool(_IDENT_RE.fullmatch(text)) and text not in KEYWORDS


@dataclass(frozen=True)
class Multiplicity:
    """Cardinality bounds; ``upper is None`` means unbounded (``*``).

    Bounds with lower > upper are representable on purpose: they are flagged
    by the conformity instrument, not rejected by the parser.
    """

    lower: int
    upper: int | None

    def is_valid(self) -> bool:
        return self.upper is None or self.lower <= self.upper

    def text(self) -> str:
        if self.upper is not None and self.lower == self.upper:
            return str(self.lower)
        return f"{self.lower}..{'*' if self.upper is None else self.upper}"


@dataclass(frozen=True)
class PurposeSpec:
    """Free-text intent of a model plus optional explicit keywords.

    ``keywords`` holds only what the source declared (lowercase, de-duplicated,
    whitespace-free); consumers derive defaults from ``text`` when it is empty.
    """

    text: str
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class Param:
    name: str
    type_ref: str


@dataclass(frozen=True)
class OpDecl:
    name: str
    params: tuple[Param, ...] = ()
    return_type: str | None = None


@dataclass(frozen=True)
class AttrDecl:
    name: str
    type_ref: str
    multiplicity: Multiplicity | None = None


@dataclass(frozen=True)
class ClassDecl:
    """One class declaration. Names may be empty; emptiness is a finding."""

    name: str
    is_abstract: bool = False
    supertypes: tuple[str, ...] = ()
    attributes: tuple[AttrDecl, ...] = ()
    operations: tuple[OpDecl, ...] = ()


@dataclass(frozen=True)
class AssocEnd:
    class_ref: str
    multiplicity: Multiplicity
    role: str | None = None


@dataclass(frozen=True)
class AssocDecl:
    name: str | None
    end_a: AssocEnd
    end_b: AssocEnd


@dataclass(frozen=True)
class ModelUnit:
    name: str
    purpose: PurposeSpec
    classes: tuple[ClassDecl, ...] = ()
    associations: tuple[AssocDecl, ...] = ()


# --- element paths ---------------------------------------------------------


def class_path(cls: ClassDecl, index: int) -> str:
    return cls.name if cls.name else f"class[{index}]"


def member_path(owner: str, kind: str, name: str, index: int) -> str:
    """Path of an attr/op/param under ``owner``; ``kind`` is the segment label."""
    if name:
        return f"{owner}.{kind}.{name}"
    return f"{owner}.{kind}[{index}]"


def assoc_path(assoc: AssocDecl, index: int) -> str:
    return f"assoc.{assoc.name}" if assoc.name else f"assoc[{index}]"


# --- identifier tokenization ------------------------------------------------


def split_identifier(name: str) -> list[str]:
    """Split an identifier into lowercase words.

    Boundaries are camelCase humps (including acronym runs: ``DAOImpl`` gives
    ``dao``, ``impl``), underscores, digits, and any other non-letter
    character; separators are dropped. Empty input gives an empty list.
    """
    tokens: list[str] = []
    word = ""
    for ch in name:
        if not ch.isalpha():
            if word:
                tokens.append(word)
                word = ""
            continue
        if word and ch.isupper() and word[-1].islower():
            tokens.append(word)
            word = ""
        elif len(word) >= 2 and ch.islower() and word[-1].isupper() and word[-2].isupper():
            # end of an acronym run: the last upper starts the next word
            tokens.append(word[:-1])
            word = word[-1]
        word += ch
    if word:
        tokens.append(word)
    return [t.lower() for t in tokens]
