"""Assessment orchestration: deltas, caching, rendering, events."""

import json
import random

import pytest

from modelgate import (
    AssessmentReport,
    AttributeStatus,
    Engine,
    LibraryStore,
    QualityAttribute,
    Stage,
    evaluate_stage,
)
from modelgate.printer import canonical_print

from helpers import SONG_DAO_V1, SONG_V2, TINY_CLEAN, mutate_model, random_model

WEAK = ("semantic_validity", "completeness", "purpose_extraction", "appeal")


def attest_all(engine, entry_id):
    for attr in WEAK:
        _, report = engine.attest(entry_id, attr, "pass", "alice")
    return report


# --- deltas -------------------------------------------------------------------


def test_first_assessment_reports_everything_as_new(engine):
    _, report = engine.create_entry("media", SONG_DAO_V1)
    assert report.delta_new == report.findings
    assert report.delta_resolved == ()
    assert [f.metric_id for f in report.findings] == ["technology-leftover-name"]


def test_reassessment_without_changes_is_quiet(engine):
    engine.create_entry("media", SONG_DAO_V1)
    first = engine.assess("media")
    second = engine.assess("media")
    assert second.delta_new == second.delta_resolved == ()
    assert second.stage is first.stage
    assert second.findings == first.findings


def test_rename_moves_the_finding_into_resolved(engine):
    _, before = engine.create_entry("media", SONG_DAO_V1)
    leftover = before.findings[0]
    _, after = engine.commit("media", SONG_V2)
    assert leftover.fingerprint in {f.fingerprint for f in after.delta_resolved}
    assert leftover.fingerprint not in {f.fingerprint for f in after.findings}


def test_delta_equation_over_random_edit_sequences(engine):
    """current = previous minus resolved plus new, with no overlap."""
    rng = random.Random(31)
    for seq in range(30):
        entry_id = f"seq{seq}"
        m = random_model(rng)
        _, report = engine.create_entry(entry_id, canonical_print(m))
        prev = {f.fingerprint for f in report.findings}
        for _ in range(5):
            m = mutate_model(m, rng)
            result, report = engine.commit(entry_id, canonical_print(m))
            if report is None:
                continue  # mutation happened to be content-neutral
            current = {f.fingerprint for f in report.findings}
            new = {f.fingerprint for f in report.delta_new}
            resolved = {f.fingerprint for f in report.delta_resolved}
            assert new.isdisjoint(prev)
            assert resolved <= prev
            assert current == (prev - resolved) | new
            prev = current


def test_stage_always_equals_the_gate_evaluation(engine):
    rng = random.Random(32)
    for seq in range(10):
        entry_id = f"e{seq}"
        _, report = engine.create_entry(entry_id, canonical_print(random_model(rng)))
        assert report.stage is evaluate_stage(report.statuses, engine.config)


# --- persistence ------------------------------------------------------------------


def test_cached_report_survives_a_process_restart(library_root):
    engine = Engine(LibraryStore(library_root))
    engine.create_entry("media", SONG_DAO_V1)
    first = engine.assess("media")

    reopened = Engine(LibraryStore(library_root))
    loaded = reopened.last_report("media")
    assert loaded == first


def test_report_json_round_trip(engine):
    engine.create_entry("media", SONG_DAO_V1)
    engine.add_review("media", "black", "check the cardinalities")
    report = engine.assess("media")
    assert AssessmentReport.from_json_dict(report.to_json_dict()) == report


def test_full_report_assesses_entries_never_assessed(library_root):
    store = LibraryStore(library_root)
    store.create_entry("media", SONG_DAO_V1)  # store-level: no assessment ran
    engine = Engine(store)
    text = engine.full_report("media")
    assert "stage:" in text


# --- human inputs through the engine ------------------------------------------------


def test_attested_clean_model_reaches_fine(engine):
    _, report = engine.create_entry("tiny", TINY_CLEAN)
    assert report.stage is Stage.VAGUE  # weak attributes still pending
    pending = [a for a, s in report.statuses.items() if s is AttributeStatus.PENDING_HUMAN]
    assert len(pending) == 4
    report = attest_all(engine, "tiny")
    assert report.stage is Stage.FINE
    assert report.stage.color == "green"


def test_commit_invalidates_attestations_and_demotes(engine):
    engine.create_entry("tiny", TINY_CLEAN)
    report = attest_all(engine, "tiny")
    assert report.stage is Stage.FINE

    _, report = engine.commit("tiny", TINY_CLEAN.replace("value: Int", "value: Int [0..1]"))
    assert report.stage < Stage.FINE
    assert report.transition.demoted
    assert report.statuses[QualityAttribute.COMPLETENESS] is AttributeStatus.PENDING_HUMAN


def test_override_carries_across_snapshots_until_revoked(engine):
    _, report = engine.create_entry("media", SONG_DAO_V1)
    assert report.statuses[QualityAttribute.MAINTAINABILITY] is AttributeStatus.VIOLATED

    _, report = engine.add_override(
        "media", "technology-leftover-name", "SongDAO", "wrapping a legacy table", "bob"
    )
    assert report.statuses[QualityAttribute.MAINTAINABILITY] is AttributeStatus.SATISFIED

    # unrelated edit: the override still matches the same metric and path
    edited = SONG_DAO_V1.replace('attr title: String', "attr title: String\n    attr year: Int")
    _, report = engine.commit("media", edited)
    assert report.statuses[QualityAttribute.MAINTAINABILITY] is AttributeStatus.SATISFIED

    _, report = engine.revoke_override("media", "technology-leftover-name", "SongDAO")
    assert report.statuses[QualityAttribute.MAINTAINABILITY] is AttributeStatus.VIOLATED


def test_black_hat_forces_vague_until_done(engine):
    engine.create_entry("tiny", TINY_CLEAN)
    attest_all(engine, "tiny")
    review, report = engine.add_review("tiny", "black", "units unclear")
    assert report.stage is Stage.VAGUE
    assert report.transition.demoted

    _, report = engine.set_review_status(review.review_id, "done")
    assert report.stage is Stage.FINE

    _, report = engine.set_review_status(review.review_id, "reopened")
    assert report.stage is Stage.VAGUE


# --- rendering ------------------------------------------------------------------------


def test_text_report_shape(engine):
    engine.create_entry("media", SONG_DAO_V1)
    engine.add_override("media", "technology-leftover-name", "SongDAO", "legacy", "bob")
    engine.commit("media", SONG_V2)
    text = engine.full_report("media", "text")
    lines = text.splitlines()
    assert lines[0] == "entry: media"
    assert lines[1] == "snapshot: 2"
    assert any(line.startswith("stage: ") for line in lines)
    assert "  defect_freeness" in text
    assert "resolved since previous (1):" in text
    assert "  technology-leftover-name at SongDAO" in text


def test_text_report_groups_findings_by_attribute(engine):
    src = (
        "model m {\n"
        '  purpose ""\n'
        "  class SongDAO {\n    attr x: Ghost\n  }\n"
        "}\n"
    )
    engine.create_entry("mixed", src)
    text = engine.full_report("mixed", "text")
    conf = text.index("meta_model_conformity:")
    maint = text.index("maintainability:")
    assert conf < maint
    assert text.count("suggestion:") == 2


def test_fine_entry_header_says_green(engine):
    engine.create_entry("tiny", TINY_CLEAN)
    attest_all(engine, "tiny")
    assert "stage: fine (green)" in engine.full_report("tiny", "text")


def test_json_report_is_valid_json_with_the_same_content(engine):
    engine.create_entry("media", SONG_DAO_V1)
    payload = json.loads(engine.full_report("media", "json"))
    assert payload["entry_id"] == "media"
    assert payload["stage"] == "vague"
    assert payload["findings"][0]["metric_id"] == "technology-leftover-name"


def test_unknown_render_format_is_rejected(engine):
    engine.create_entry("media", SONG_DAO_V1)
    with pytest.raises(ValueError):
        engine.full_report("media", "yaml")


# --- events ------------------------------------------------------------------------


def test_one_event_per_mutation_in_commit_order(engine):
    events = []
    cancel = engine.subscribe(events.append)

    engine.create_entry("media", SONG_DAO_V1)
    engine.commit("media", SONG_V2)
    engine.commit("media", SONG_V2)  # no-op: silent
    review, _ = engine.add_review("media", "yellow", "nice")
    engine.set_review_status(review.review_id, "done")
    engine.attest("media", "appeal", "pass")
    engine.add_override("media", "high-fanout", "X", "fine here")
    engine.revoke_override("media", "high-fanout", "X")

    mutations = [e["type"] for e in events if e["type"] != "assessment"]
    assert mutations == ["snapshot", "snapshot", "review", "review",
                         "attestation", "override", "override"]
    # every mutation is followed by its assessment
    assert [e["type"] for e in events].count("assessment") == 7

    cancel()
    engine.assess("media")
    assert len(events) == 14  # unchanged after unsubscribe


def test_noop_commit_emits_nothing(engine):
    engine.create_entry("media", SONG_DAO_V1)
    events = []
    engine.subscribe(events.append)
    result, report = engine.commit("media", SONG_DAO_V1)
    assert not result.created and report is None
    assert events == []
