"""Grammar coverage, positioned errors, and a no-hang fuzz pass."""

import random
import string
import time

import pytest

from modelgate import ParseError, parse_model
from modelgate.model import Multiplicity

from helpers import SONG_DAO_V1, defect_fixture


FULL = """
// media library, first cut
model media {
  purpose "Organize songs" keywords Playlist, song, playlist
  abstract class Item {
    attr label: String [0..1]
    op describe(): String
  }
  class Song extends Item {
    attr title: String
    attr tags: String [0..*]   // free-form labels
    op rate(stars: Int, by: String): Bool
    op "weird op"(): Int
  }
  class "" {
  }
  assoc contains Song "0..*" -- Item "1"
  assoc Song "*" -- Song "2..4"
}
"""


def test_full_feature_model():
    m = parse_model(FULL)
    assert m.name == "media"
    assert m.purpose.text == "Organize songs"
    # keywords are lowercased and deduplicated in declaration order
    assert m.purpose.keywords == ("playlist", "song")

    item, song, anon = m.classes
    assert item.is_abstract and item.name == "Item"
    assert item.attributes[0].multiplicity == Multiplicity(0, 1)
    assert item.operations[0].params == ()
    assert song.supertypes == ("Item",)
    assert song.attributes[1].multiplicity == Multiplicity(0, None)
    assert song.operations[0].params[1].name == "by"
    assert song.operations[1].name == "weird op"
    assert anon.name == ""

    named, unnamed = m.associations
    assert named.name == "contains"
    assert named.end_a.class_ref == "Song"
    assert named.end_a.multiplicity == Multiplicity(0, None)
    assert unnamed.name is None
    assert unnamed.end_a.multiplicity == Multiplicity(0, None)  # "*"
    assert unnamed.end_b.multiplicity == Multiplicity(2, 4)


def test_comments_do_not_reach_the_model():
    m = parse_model('model m {\n  purpose "p" // trailing\n  // whole line\n}\n')
    assert m.purpose.text == "p"


def test_string_escapes():
    m = parse_model('model m {\n  purpose "a\\"b\\\\c\\nd\\te\\rf"\n}\n')
    assert m.purpose.text == 'a"b\\c\nd\te\rf'


def test_assoc_end_multiplicity_forms():
    src = (
        "model m {\n"
        '  purpose ""\n'
        "  class A {\n  }\n"
        '  assoc A "1" -- A "0..3"\n'
        '  assoc A "2..*" -- A "*"\n'
        "}\n"
    )
    m = parse_model(src)
    a, b = m.associations
    assert a.end_a.multiplicity == Multiplicity(1, 1)
    assert a.end_b.multiplicity == Multiplicity(0, 3)
    assert b.end_a.multiplicity == Multiplicity(2, None)
    assert b.end_b.multiplicity == Multiplicity(0, None)


def test_inverted_bounds_parse_but_flag_invalid():
    m = parse_model('model m {\n  purpose ""\n  class A {\n    attr x: Int [5..2]\n  }\n}\n')
    mult = m.classes[0].attributes[0].multiplicity
    assert mult == Multiplicity(5, 2)
    assert not mult.is_valid()


BAD_SOURCES = [
    ("", 1),
    ("model", 1),
    ("model m {}", 1),  # purpose is mandatory
    ('model m {\n  purpose "p"\n  class A {\n}\n', 5),  # model brace unclosed, EOF
    ('model m {\n  purpose "unterminated\n}\n', 2),
    ('model m {\n  purpose "p"\n  class A {\n    attr x: Int [3]\n  }\n}\n', 4),
    ('model m {\n  purpose "p"\n  class A {\n    attr x Int\n  }\n}\n', 4),
    ('model m {\n  purpose "p"\n  assoc A "x" -- B "1"\n}\n', 3),
    ('model m {\n  purpose "p"\n  class 7 {\n  }\n}\n', 3),
    ('model m {\n  purpose "bad \\q escape"\n}\n', 2),
    ('model m {\n  purpose "p"\n}\ntrailing', 4),
    ('model m {\n  purpose "p"\n  class A extends "B" {\n  }\n}\n', 3),
]


@pytest.mark.parametrize("source,line", BAD_SOURCES)
def test_errors_carry_positions(source, line):
    with pytest.raises(ParseError) as info:
        parse_model(source)
    err = info.value
    assert err.line == line
    assert err.column >= 1
    assert f"{err.line}:{err.column}" in str(err)
    assert err.code == "parse_error"


def test_error_names_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_model('model m {\n  purpose "p"\n  klass A {\n  }\n}\n')
    assert info.value.expected is not None


def _mutate(rng: random.Random, text: str) -> str:
    choice = rng.randrange(4)
    if not text or choice == 0:
        pos = rng.randint(0, len(text))
        return text[:pos] + rng.choice('{}()[]":,*.-x7 \n') + text[pos:]
    if choice == 1:
        pos = rng.randrange(len(text))
        return text[:pos] + text[pos + 1 :]
    if choice == 2:
        return text[: rng.randrange(len(text))]
    pos = rng.randrange(len(text))
    return text[:pos] + rng.choice('{}"\\\x00\xe9') + text[pos + 1 :]


def test_fuzz_never_hangs_and_errors_are_positioned():
    """10,000 adversarial inputs: each one either parses or raises a
    positioned ParseError, and does so within the 100 ms budget."""
    rng = random.Random(1337)
    seeds = [SONG_DAO_V1, defect_fixture("inheritance-cycle"), FULL]
    alphabet = string.printable + '\x00\xe9☃'
    parsed = failed = 0
    for i in range(10_000):
        if i % 2 == 0:
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 120)))
        else:
            text = rng.choice(seeds)
            for _ in range(rng.randint(1, 6)):
                text = _mutate(rng, text)
        started = time.monotonic()
        try:
            parse_model(text)
            parsed += 1
        except ParseError as err:
            failed += 1
            assert isinstance(err.line, int) and err.line >= 1
            assert isinstance(err.column, int) and err.column >= 1
        elapsed = time.monotonic() - started
        assert elapsed < 0.1, f"parser took {elapsed:.3f}s on input #{i}"
    assert parsed > 0 and failed > 0  # the fuzzer exercised both outcomes
