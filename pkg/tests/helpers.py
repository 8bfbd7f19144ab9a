"""Model sources and random generators shared across test modules."""

from __future__ import annotations

import random
from dataclasses import replace
from pathlib import Path

from modelgate.model import (
    AssocDecl,
    AssocEnd,
    AttrDecl,
    ClassDecl,
    ModelUnit,
    Multiplicity,
    OpDecl,
    Param,
    PurposeSpec,
)
from modelgate.printer import canonical_print

FIXTURES = Path(__file__).parent / "fixtures"

# the walkthrough pair: a model with a technology leftover, then the rename
SONG_DAO_V1 = """
model media {
  purpose "Organize songs into playlists" keywords playlist, song
  class SongDAO {
    attr title: String
    attr artist: String
  }
  class Playlist {
    attr name: String
  }
  assoc contains Playlist "1" -- SongDAO "0..*"
}
"""

SONG_V2 = SONG_DAO_V1.replace("SongDAO", "Song")

TINY_CLEAN = """
model tiny {
  purpose "A single counter" keywords counter
  class Counter {
    attr value: Int
  }
}
"""


def defect_fixture(metric_id: str) -> str:
    return (FIXTURES / "defects" / f"{metric_id}.mdl").read_text("utf-8")


def clean_fixtures() -> list[Path]:
    return sorted((FIXTURES / "clean").glob("*.mdl"))


# --- random model generation -------------------------------------------------
#
# Trades realism for coverage: names may repeat or be empty, types may be
# unknown, multiplicities may be inverted, supertypes may form cycles. All
# of it parses (sources are produced by the canonical printer).

CLASS_NAMES = ["Song", "Playlist", "Track", "Album", "Artist", "Library", "Rating", "Tag"]
MEMBER_NAMES = ["title", "name", "length", "year", "rank", "label", "owner", "fooBar", "foo_bar"]
TYPE_NAMES = ["String", "Int", "Float", "Bool", "Date", "Mystery", "Ghost"]
SUFFIXES = ["", "", "", "DAO", "Impl"]


def random_multiplicity(rng: random.Random) -> Multiplicity | None:
    roll = rng.random()
    if roll < 0.6:
        return None
    if roll < 0.7:
        return Multiplicity(rng.randint(2, 5), rng.randint(0, 1))  # lower > upper
    if roll < 0.85:
        return Multiplicity(0, None)
    return Multiplicity(0, rng.randint(1, 9))


def random_attr(rng: random.Random) -> AttrDecl:
    name = "" if rng.random() < 0.05 else rng.choice(MEMBER_NAMES)
    if rng.random() < 0.05:
        name = "type"  # reserved in generated code
    return AttrDecl(name, rng.choice(TYPE_NAMES), random_multiplicity(rng))


def random_op(rng: random.Random) -> OpDecl:
    params = tuple(
        Param(rng.choice(MEMBER_NAMES), rng.choice(TYPE_NAMES))
        for _ in range(rng.randint(0, 5))
    )
    return OpDecl(rng.choice(MEMBER_NAMES), params, rng.choice(TYPE_NAMES))


def random_class(rng: random.Random, peers: list[str]) -> ClassDecl:
    name = rng.choice(CLASS_NAMES) + rng.choice(SUFFIXES)
    if rng.random() < 0.03:
        name = ""
    supertypes = tuple(
        rng.choice(peers) for _ in range(rng.randint(0, 1)) if peers and rng.random() < 0.5
    )
    attrs = tuple(random_attr(rng) for _ in range(rng.randint(0, 4)))
    ops = tuple(random_op(rng) for _ in range(rng.randint(0, 2)))
    return ClassDecl(name, rng.random() < 0.1, supertypes, attrs, ops)


def random_model(rng: random.Random) -> ModelUnit:
    classes: list[ClassDecl] = []
    for _ in range(rng.randint(0, 5)):
        classes.append(random_class(rng, [c.name for c in classes if c.name]))
    names = [c.name for c in classes if c.name] or ["Ghost"]
    assocs = tuple(
        AssocDecl(
            rng.choice([None, "link", "owns"]),
            AssocEnd(rng.choice(names), Multiplicity(0, None)),
            AssocEnd(rng.choice(names + ["Ghost"]), Multiplicity(1, 1)),
        )
        for _ in range(rng.randint(0, 3))
    )
    keywords = tuple(rng.sample(["song", "playlist", "billing", "counter"], rng.randint(0, 2)))
    return ModelUnit(
        "fuzzed", PurposeSpec("Things and stuff", keywords), tuple(classes), tuple(assocs)
    )


def mutate_model(m: ModelUnit, rng: random.Random) -> ModelUnit:
    """One random edit; may be a no-op on empty models."""
    ops = [op for op in ("rename", "add_class", "drop_class", "add_attr", "drop_attr")
           if m.classes or op == "add_class"]
    op = rng.choice(ops)
    classes = list(m.classes)
    if op == "rename" and classes:
        i = rng.randrange(len(classes))
        classes[i] = replace(classes[i], name=rng.choice(CLASS_NAMES) + rng.choice(SUFFIXES))
    elif op == "add_class":
        classes.append(random_class(rng, [c.name for c in classes if c.name]))
    elif op == "drop_class" and classes:
        classes.pop(rng.randrange(len(classes)))
    elif op == "add_attr" and classes:
        i = rng.randrange(len(classes))
        classes[i] = replace(
            classes[i], attributes=classes[i].attributes + (random_attr(rng),)
        )
    elif op == "drop_attr" and classes:
        i = rng.randrange(len(classes))
        if classes[i].attributes:
            attrs = list(classes[i].attributes)
            attrs.pop(rng.randrange(len(attrs)))
            classes[i] = replace(classes[i], attributes=tuple(attrs))
    return replace(m, classes=tuple(classes))


def random_source(rng: random.Random) -> str:
    return canonical_print(random_model(rng))
