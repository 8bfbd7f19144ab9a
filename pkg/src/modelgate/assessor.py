"""Assessment orchestration.

Every change to an entry (snapshot, review, attestation, override) is
followed by a fresh assessment of the head snapshot: run the instruments,
fold in the human records, evaluate the stage, and diff the finding set
against the previously cached report so consumers see only what moved.
Reports are cached in the entry's meta.json, which makes the delta survive
process restarts and keeps GET handlers stateless.

The :class:`Engine` is the single orchestration point used by the CLI, the
watch loop, and the HTTP server. It pairs each store mutation with the
re-assessment it implies and notifies subscribers, one event per committed
mutation plus one per new assessment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable

from .gates import (
    Attestation,
    AttributeStatus,
    Override,
    QualityModelConfig,
    Stage,
    StageTransition,
    attribute_status,
    load_quality_config,
    recompute_on_change,
)
from .instruments import (
    CharacteristicClass,
    Finding,
    QualityAttribute,
    check_medium,
    check_strong,
    check_weak_heuristics,
)
from .parser import parse_model
from .resolver import resolve
from .store import (
    QUALITY_CONFIG_NAME,
    CommitResult,
    Hat,
    LibraryEntry,
    LibraryStore,
    Review,
    ReviewStatus,
    Snapshot,
)

_STATUS_BY_LABEL = {s.label: s for s in AttributeStatus}


def _finding_row(f: Finding) -> dict:
    return {
        "fingerprint": f.fingerprint,
        "metric_id": f.metric_id,
        "attribute": f.attribute.value,
        "characteristic": f.characteristic.value,
        "element_path": f.element_path,
        "message": f.message,
        "suggestion": f.suggestion,
    }


def _finding_from_row(row: dict) -> Finding:
    return Finding(
        fingerprint=row["fingerprint"],
        metric_id=row["metric_id"],
        attribute=QualityAttribute(row["attribute"]),
        characteristic=CharacteristicClass(row["characteristic"]),
        element_path=row["element_path"],
        message=row["message"],
        suggestion=row["suggestion"],
    )


def snapshot_row(s: Snapshot, include_text: bool = False) -> dict:
    row = {
        "seq_no": s.seq_no,
        "content_hash": s.content_hash,
        "author": s.author,
        "created_at": s.created_at,
    }
    if include_text:
        row["source_text"] = s.source_text
    return row


def review_row(r: Review) -> dict:
    return {
        "review_id": r.review_id,
        "hat": r.hat.value,
        "text": r.text,
        "status": r.status.value,
        "snapshot_ref": r.snapshot_ref,
        "created_at": r.created_at,
        "updated_at": r.updated_at,
    }


def attestation_row(a: Attestation) -> dict:
    return {
        "attribute": a.attribute.value,
        "content_hash": a.content_hash,
        "reviewer": a.reviewer,
        "verdict": a.verdict,
        "created_at": a.created_at,
    }


def override_row(o: Override) -> dict:
    return {
        "metric_id": o.metric_id,
        "element_path": o.element_path,
        "justification": o.justification,
        "author": o.author,
        "created_at": o.created_at,
        "revoked": o.revoked,
    }


@dataclass(frozen=True)
class AssessmentReport:
    entry_id: str
    seq_no: int
    content_hash: str
    stage: Stage
    statuses: dict[QualityAttribute, AttributeStatus]
    findings: tuple[Finding, ...]
    delta_new: tuple[Finding, ...]
    delta_resolved: tuple[Finding, ...]
    transition: StageTransition
    generated_at: str

    def to_json_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "seq_no": self.seq_no,
            "content_hash": self.content_hash,
            "stage": self.stage.label,
            "color": self.stage.color,
            "previous_stage": None if self.transition.old is None else self.transition.old.label,
            "demoted": self.transition.demoted,
            "statuses": {attr.value: st.label for attr, st in self.statuses.items()},
            "findings": [_finding_row(f) for f in self.findings],
            "delta": {
                "new": [_finding_row(f) for f in self.delta_new],
                "resolved": [_finding_row(f) for f in self.delta_resolved],
            },
            "generated_at": self.generated_at,
        }

    @classmethod
    def from_json_dict(cls, row: dict) -> "AssessmentReport":
        stage = Stage.from_label(row["stage"])
        prev = row.get("previous_stage")
        return cls(
            entry_id=row["entry_id"],
            seq_no=row["seq_no"],
            content_hash=row["content_hash"],
            stage=stage,
            statuses={
                QualityAttribute(a): _STATUS_BY_LABEL[s] for a, s in row["statuses"].items()
            },
            findings=tuple(_finding_from_row(r) for r in row["findings"]),
            delta_new=tuple(_finding_from_row(r) for r in row["delta"]["new"]),
            delta_resolved=tuple(_finding_from_row(r) for r in row["delta"]["resolved"]),
            transition=StageTransition(
                old=None if prev is None else Stage.from_label(prev),
                new=stage,
                demoted=row["demoted"],
            ),
            generated_at=row["generated_at"],
        )


def run_instruments(model, cfg: QualityModelConfig) -> list[Finding]:
    """All automatic checks over one model, in characteristic order."""
    symtab = resolve(model)
    t = cfg.thresholds
    return (
        check_strong(model, symtab, t)
        + check_medium(model, symtab, t)
        + check_weak_heuristics(model, t)
    )


def assess_snapshot(
    store: LibraryStore, entry_id: str, cfg: QualityModelConfig, save: bool = True
) -> AssessmentReport:
    """Assess the head snapshot and cache the report on the entry.

    The previous cached report (if any) supplies the stage to demote from
    and the fingerprint set to diff against. ``save=False`` computes the
    same report without touching the store (a pure read, no lock taken).
    """
    head = store.head_snapshot(entry_id)
    model = parse_model(head.source_text)  # canonical text, parses by construction
    findings = run_instruments(model, cfg)

    open_blacks = store.open_black_hat_count(entry_id)
    attestations = store.valid_attestations(entry_id)
    overrides = [o for o in store.overrides(entry_id) if not o.revoked]
    statuses = {
        attr: attribute_status(attr, findings, overrides, attestations, open_blacks)
        for attr in QualityAttribute
    }

    prev = store.load_last_assessment(entry_id)
    prev_stage = None if prev is None else Stage.from_label(prev["stage"])
    transition = recompute_on_change(prev_stage, statuses, cfg)

    current = {f.fingerprint for f in findings}
    prev_rows = [] if prev is None else prev["findings"]
    previous = {r["fingerprint"] for r in prev_rows}
    delta_new = tuple(f for f in findings if f.fingerprint not in previous)
    delta_resolved = tuple(
        _finding_from_row(r) for r in prev_rows if r["fingerprint"] not in current
    )

    report = AssessmentReport(
        entry_id=entry_id,
        seq_no=head.seq_no,
        content_hash=head.content_hash,
        stage=transition.new,
        statuses=statuses,
        findings=tuple(findings),
        delta_new=delta_new,
        delta_resolved=delta_resolved,
        transition=transition,
        generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )
    if save:
        store.save_last_assessment(entry_id, report.to_json_dict())
    return report


def render_text(report: AssessmentReport) -> str:
    """Plain-text report: header, per-attribute statuses, findings grouped
    by attribute, then the delta against the previous assessment."""
    lines = [
        f"entry: {report.entry_id}",
        f"snapshot: {report.seq_no}",
        f"hash: {report.content_hash}",
        f"stage: {report.stage.label} ({report.stage.color})",
    ]
    if report.transition.demoted:
        assert report.transition.old is not None
        lines.append(f"demoted: from {report.transition.old.label}")
    lines.append("attributes:")
    width = max(len(a.value) for a in report.statuses)
    for attr in QualityAttribute:
        lines.append(f"  {attr.value.ljust(width)}  {report.statuses[attr].label}")

    lines.append(f"findings ({len(report.findings)}):")
    by_attr: dict[QualityAttribute, list[Finding]] = {}
    for f in report.findings:
        by_attr.setdefault(f.attribute, []).append(f)
    for attr in QualityAttribute:
        group = by_attr.get(attr)
        if not group:
            continue
        lines.append(f"  {attr.value}:")
        for f in group:
            lines.append(f"    {f.metric_id} at {f.element_path}")
            lines.append(f"      {f.message}")
            lines.append(f"      suggestion: {f.suggestion}")

    lines.append(f"new since previous ({len(report.delta_new)}):")
    for f in report.delta_new:
        lines.append(f"  {f.metric_id} at {f.element_path}")
    lines.append(f"resolved since previous ({len(report.delta_resolved)}):")
    for f in report.delta_resolved:
        lines.append(f"  {f.metric_id} at {f.element_path}")
    return "\n".join(lines) + "\n"


def render_json(report: AssessmentReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2) + "\n"


EventCallback = Callable[[dict], None]


class Engine:
    """Store mutations paired with re-assessment and event notification.

    Events are plain dicts ``{"type", "entry_id", "data"}`` with type one of
    snapshot, assessment, review, attestation, override. Subscribers are
    called synchronously in mutation order, so a subscriber that records
    events sees exactly one per committed mutation, in commit order.
    """

    def __init__(self, store: LibraryStore, config: QualityModelConfig | None = None):
        self.store = store
        if config is None:
            config = load_quality_config(store.root / QUALITY_CONFIG_NAME)
        self.config = config
        self._subscribers: list[EventCallback] = []

    def subscribe(self, fn: EventCallback) -> Callable[[], None]:
        self._subscribers.append(fn)

        def cancel() -> None:
            if fn in self._subscribers:
                self._subscribers.remove(fn)

        return cancel

    def _emit(self, event_type: str, entry_id: str, data: dict) -> None:
        event = {"type": event_type, "entry_id": entry_id, "data": data}
        for fn in list(self._subscribers):
            fn(event)

    # --- reads ------------------------------------------------------------

    def assess(self, entry_id: str) -> AssessmentReport:
        report = assess_snapshot(self.store, entry_id, self.config)
        self._emit("assessment", entry_id, report.to_json_dict())
        return report

    def last_report(self, entry_id: str) -> AssessmentReport:
        """Cached report, assessing once for entries never assessed."""
        cached = self.store.load_last_assessment(entry_id)
        if cached is None:
            return self.assess(entry_id)
        return AssessmentReport.from_json_dict(cached)

    def full_report(self, entry_id: str, format: str = "text") -> str:
        report = self.last_report(entry_id)
        if format == "json":
            return render_json(report)
        if format == "text":
            return render_text(report)
        raise ValueError(f"unknown report format {format!r}")

    # --- mutations (each one re-assesses) -----------------------------------

    def create_entry(self, entry_id: str, source_text: str, author: str = ""):
        entry = self.store.create_entry(entry_id, source_text, author)
        self._emit("snapshot", entry_id, snapshot_row(entry.head))
        report = self.assess(entry_id)
        return entry, report

    def commit(self, entry_id: str, source_text: str, author: str = ""):
        """Returns (CommitResult, report). Identical content is a no-op:
        nothing is written, no events fire, and report is None."""
        result = self.store.commit_snapshot(entry_id, source_text, author)
        if not result.created:
            return result, None
        self._emit("snapshot", entry_id, snapshot_row(result.snapshot))
        return result, self.assess(entry_id)

    def add_review(self, entry_id: str, hat: Hat | str, text: str):
        review = self.store.add_review(entry_id, hat, text)
        self._emit("review", entry_id, {"action": "added", **review_row(review)})
        return review, self.assess(entry_id)

    def set_review_status(self, review_id: str, status: ReviewStatus | str):
        entry_id = self.store.entry_of_review(review_id)
        review = self.store.set_review_status(review_id, status)
        self._emit("review", entry_id, {"action": "status_changed", **review_row(review)})
        return review, self.assess(entry_id)

    def attest(self, entry_id: str, attribute, verdict: str, reviewer: str = ""):
        attestation = self.store.record_attestation(entry_id, attribute, verdict, reviewer)
        self._emit("attestation", entry_id, attestation_row(attestation))
        return attestation, self.assess(entry_id)

    def add_override(
        self, entry_id: str, metric_id: str, element_path: str, justification: str, author: str = ""
    ):
        override = self.store.record_override(
            entry_id, metric_id, element_path, justification, author
        )
        self._emit("override", entry_id, {"action": "added", **override_row(override)})
        return override, self.assess(entry_id)

    def revoke_override(self, entry_id: str, metric_id: str, element_path: str):
        override = self.store.revoke_override(entry_id, metric_id, element_path)
        self._emit("override", entry_id, {"action": "revoked", **override_row(override)})
        return override, self.assess(entry_id)
