"""Automatic checks: fixture corpus soundness, independent oracles for the
derived measures (inheritance depth, purpose overlap), threshold
monotonicity, and fingerprint stability."""

import hashlib
import random
from dataclasses import replace

import pytest

from modelgate import Thresholds, check_medium, check_strong, check_weak_heuristics, parse_model, resolve
from modelgate.instruments import (
    MEDIUM_METRICS,
    STRONG_METRICS,
    inheritance_depths,
    purpose_keywords,
    purpose_overlap,
)
from modelgate.model import ClassDecl, ModelUnit, PurposeSpec

from helpers import FIXTURES, clean_fixtures, random_model
from test_split_identifier import oracle_split

DEFAULTS = Thresholds()


def all_findings(m, t=DEFAULTS):
    table = resolve(m)
    return check_strong(m, table, t) + check_medium(m, table, t) + check_weak_heuristics(m, t)


def metric_set(m, t=DEFAULTS):
    return {f.metric_id for f in all_findings(m, t)}


# --- fixture corpus ----------------------------------------------------------

# fixtures whose seeded defect necessarily drags in a second metric
COFINDINGS = {
    # an op with an unknown type is also, by itself, an unresolved reference
    "untypable-operation": {"unresolved-type-ref"},
}

DEFECT_FIXTURES = sorted(p.stem for p in (FIXTURES / "defects").glob("*.mdl"))


def test_corpus_covers_every_automatic_metric():
    assert set(DEFECT_FIXTURES) >= STRONG_METRICS | MEDIUM_METRICS


@pytest.mark.parametrize("metric_id", DEFECT_FIXTURES)
def test_defect_fixture_yields_exactly_its_metric(metric_id):
    source = (FIXTURES / "defects" / f"{metric_id}.mdl").read_text("utf-8")
    expected = {metric_id} | COFINDINGS.get(metric_id, set())
    assert metric_set(parse_model(source)) == expected


@pytest.mark.parametrize("path", clean_fixtures(), ids=lambda p: p.stem)
def test_clean_corpus_has_zero_findings(path):
    assert all_findings(parse_model(path.read_text("utf-8"))) == []


# --- inheritance depth vs longest-path oracle -------------------------------


def oracle_depths(m, table):
    """Longest supertype chain per class, by naive path enumeration.

    Edges inside a cycle (mutually reachable endpoints) do not count, the
    same exclusion the measured value applies; what remains is acyclic, so
    plain recursion terminates.
    """
    edges = {
        name: [s for s in cls.supertypes if s in table.classes]
        for name, cls in table.classes.items()
    }

    def reachable(start):
        seen, stack = set(), list(edges.get(start, []))
        while stack:
            node = stack.pop()
            if node not in seen:
                seen.add(node)
                stack.extend(edges.get(node, []))
        return seen

    reach = {n: reachable(n) for n in edges}

    def depth(u):
        best = 0
        for v in edges[u]:
            if u in reach[v] and v in reach[u]:
                continue  # intra-cycle edge
            best = max(best, 1 + depth(v))
        return best

    return {n: depth(n) for n in edges}


def random_hierarchy(rng):
    names = [f"C{i}" for i in range(rng.randint(1, 9))]
    classes = tuple(
        ClassDecl(
            name,
            False,
            tuple(rng.choice(names) for _ in range(rng.randint(0, 2))),
            (),
            (),
        )
        for name in names
    )
    return ModelUnit("h", PurposeSpec(""), classes, ())


def test_inheritance_depth_matches_longest_path_oracle():
    rng = random.Random(4242)
    for _ in range(300):
        m = random_hierarchy(rng)
        table = resolve(m)
        assert inheritance_depths(m, table) == oracle_depths(m, table)


def test_depth_on_known_shapes():
    src = (
        "model m {\n"
        '  purpose ""\n'
        "  class A {\n  }\n"
        "  class B extends A {\n  }\n"
        "  class C extends B, A {\n  }\n"  # diamond-ish: longest path wins
        "  class D extends D {\n  }\n"  # self-cycle contributes nothing
        "  class E extends D {\n  }\n"  # edge into a cycle still counts
        "}\n"
    )
    m = parse_model(src)
    depths = inheritance_depths(m, resolve(m))
    assert depths == {"A": 0, "B": 1, "C": 2, "D": 0, "E": 1}


# --- purpose overlap vs set-intersection oracle -------------------------------


def oracle_overlap(m):
    stopwords = {"a", "an", "the", "of", "for", "and", "or", "to", "in", "on", "with", "is", "are"}
    if m.purpose.keywords:
        keywords = []
        for k in m.purpose.keywords:
            k = k.lower()
            if k not in keywords:
                keywords.append(k)
    else:
        keywords = []
        word = ""
        for ch in m.purpose.text + " ":
            if ch.isalpha():
                word += ch
            else:
                for token in oracle_split(word):
                    if token not in stopwords and token not in keywords:
                        keywords.append(token)
                word = ""
    if not keywords:
        return 1.0
    names = set()
    for cls in m.classes:
        names.update(oracle_split(cls.name))
        for attr in cls.attributes:
            names.update(oracle_split(attr.name))
        for op in cls.operations:
            names.update(oracle_split(op.name))
    return len(set(keywords) & names) / len(keywords)


def test_overlap_matches_set_intersection_oracle():
    rng = random.Random(99)
    for _ in range(400):
        m = random_model(rng)
        assert purpose_overlap(m.purpose, m) == pytest.approx(oracle_overlap(m))


def test_overlap_known_values():
    m = parse_model(
        "model m {\n"
        '  purpose "Organize songs" keywords playlist, song, billing, invoice\n'
        "  class Playlist {\n    attr song: String\n  }\n"
        "}\n"
    )
    assert purpose_overlap(m.purpose, m) == pytest.approx(0.5)

    vacuous = parse_model('model m {\n  purpose ""\n  class A {\n  }\n}\n')
    assert purpose_overlap(vacuous.purpose, vacuous) == 1.0


def test_derived_keywords_skip_stopwords_and_split_camel_case():
    p = PurposeSpec("Flags for the playlistSong index", ())
    assert purpose_keywords(p) == ["flags", "playlist", "song", "index"]


# --- threshold monotonicity ------------------------------------------------------

COUNT_FIELDS = [
    "max_classes",
    "max_params",
    "max_dit",
    "max_fanout",
    "max_elements",
    "max_attrs_per_class",
]


def fingerprints(m, t):
    return {f.fingerprint for f in all_findings(m, t)}


def corpus_models():
    models = [
        parse_model((FIXTURES / "defects" / f"{name}.mdl").read_text("utf-8"))
        for name in DEFECT_FIXTURES
    ]
    models += [parse_model(p.read_text("utf-8")) for p in clean_fixtures()]
    rng = random.Random(7)
    models += [random_model(rng) for _ in range(40)]
    return models


@pytest.mark.parametrize("field", COUNT_FIELDS)
def test_count_thresholds_are_monotone(field):
    """Raising a limit by one never creates findings; lowering never heals."""
    for m in corpus_models():
        base = getattr(DEFAULTS, field)
        tighter = replace(DEFAULTS, **{field: base - 1})
        looser = replace(DEFAULTS, **{field: base + 1})
        assert fingerprints(m, looser) <= fingerprints(m, DEFAULTS) <= fingerprints(m, tighter)


def test_overlap_threshold_is_monotone_the_other_way():
    for m in corpus_models():
        lower = replace(DEFAULTS, purpose_min_overlap=0.25)
        higher = replace(DEFAULTS, purpose_min_overlap=0.75)
        assert fingerprints(m, lower) <= fingerprints(m, DEFAULTS) <= fingerprints(m, higher)


# --- fingerprints and rule details --------------------------------------------


def test_fingerprint_is_hash_of_metric_and_path():
    for m in corpus_models():
        for f in all_findings(m):
            raw = f"{f.metric_id}\x00{f.element_path}".encode("utf-8")
            assert f.fingerprint == hashlib.sha256(raw).hexdigest()


def test_fingerprint_survives_unrelated_edits():
    before = parse_model(
        'model m {\n  purpose ""\n  class SongDAO {\n    attr title: String\n  }\n}\n'
    )
    after = parse_model(
        "model m {\n"
        '  purpose ""\n'
        "  class SongDAO {\n    attr title: String\n    attr year: Int\n  }\n"
        "  class Album extends SongDAO {\n  }\n"
        "}\n"
    )
    fp = lambda model: {
        f.fingerprint for f in all_findings(model) if f.metric_id == "technology-leftover-name"
    }
    assert fp(before) == fp(after) != set()


def test_leftover_suffix_must_be_proper():
    flagged = parse_model('model m {\n  purpose ""\n  class SongDAO {\n  }\n}\n')
    bare = parse_model('model m {\n  purpose ""\n  class DAO {\n  }\n}\n')
    wrong_case = parse_model('model m {\n  purpose ""\n  class SongDao {\n  }\n}\n')
    assert "technology-leftover-name" in metric_set(flagged)
    assert "technology-leftover-name" not in metric_set(bare)
    assert "technology-leftover-name" not in metric_set(wrong_case)


def test_leftover_suffixes_are_configurable():
    t = replace(DEFAULTS, leftover_suffixes=("Repo",))
    m = parse_model('model m {\n  purpose ""\n  class SongRepo {\n  }\n}\n')
    assert "technology-leftover-name" in {f.metric_id for f in all_findings(m, t)}
    assert "technology-leftover-name" not in metric_set(m)


def test_reserved_words_are_configurable_and_case_sensitive():
    m = parse_model('model m {\n  purpose ""\n  class Box {\n    attr Type: String\n  }\n}\n')
    assert "reserved-word-name" not in metric_set(m)  # 'Type' != 'type'
    t = replace(DEFAULTS, reserved_words=("Type",))
    assert "reserved-word-name" in {f.metric_id for f in all_findings(m, t)}


def test_operation_overloads_are_not_duplicates():
    same_sig = parse_model(
        "model m {\n"
        '  purpose ""\n'
        "  class A {\n    op f(x: Int): Int\n    op f(y: Int): Bool\n  }\n"
        "}\n"
    )
    overload = parse_model(
        "model m {\n"
        '  purpose ""\n'
        "  class A {\n    op f(x: Int): Int\n    op f(x: String): Int\n  }\n"
        "}\n"
    )
    assert "duplicate-member-name" in metric_set(same_sig)  # param names don't differ a signature
    assert "duplicate-member-name" not in metric_set(overload)


def test_collision_needs_distinct_raw_names():
    same_name = parse_model(
        "model m {\n"
        '  purpose ""\n'
        "  class A {\n    op f(x: Int): Int\n    op f(x: String): Int\n  }\n"
        "}\n"
    )
    # two declarations of the same raw name are a duplication matter, not a collision
    assert "generated-name-collision" not in metric_set(same_name)


def test_empty_names_are_not_duplicates():
    m = parse_model(
        'model m {\n  purpose ""\n  class "" {\n  }\n  class "" {\n  }\n}\n'
    )
    metrics = metric_set(m)
    assert "duplicate-class-name" not in metrics
    assert "empty-class-name" in metrics


def test_self_association_counts_both_ends_for_fanout():
    lines = ["model m {", '  purpose ""', "  class Hub {", "  }"]
    lines += [f'  assoc Hub "1" -- Hub "1"' for _ in range(4)]
    lines.append("}")
    m = parse_model("\n".join(lines) + "\n")
    # 4 self-associations touch Hub with 8 ends: over the limit of 7
    assert "high-fanout" in metric_set(m)


def test_assoc_multiplicity_bounds_are_checked():
    m = parse_model(
        'model m {\n  purpose ""\n  class A {\n  }\n  assoc A "3..1" -- A "1"\n}\n'
    )
    assert "bad-multiplicity" in metric_set(m)


def test_single_class_is_never_disconnected():
    m = parse_model('model m {\n  purpose ""\n  class Loner {\n  }\n}\n')
    assert "disconnected-model" not in metric_set(m)


def test_duplicate_classes_collapse_into_one_graph_node():
    m = parse_model(
        'model m {\n  purpose ""\n  class Box {\n  }\n  class Box {\n  }\n}\n'
    )
    assert "disconnected-model" not in metric_set(m)


def test_findings_are_ordered_and_unique():
    for m in corpus_models():
        found = all_findings(m)
        prints = [f.fingerprint for f in found]
        assert len(prints) == len(set(prints))
        strong = [f for f in found if f.metric_id in STRONG_METRICS]
        assert strong == sorted(strong, key=lambda f: (f.metric_id, f.element_path))
