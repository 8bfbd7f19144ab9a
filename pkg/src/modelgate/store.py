"""Disk-backed model library.

Layout, per library root:

    <root>/modelgate.json                  marker written by init
    <root>/.lock                           writer lock (flock)
    <root>/quality-model.json              optional gate/threshold overrides
    <root>/<entry_id>/snapshots/<n>.mdl    canonical model text, append-only
    <root>/<entry_id>/meta.json            index: snapshots, reviews,
                                           attestations, overrides, cached
                                           last assessment

Snapshots form the entry's evolution sequence, numbered 1..n with no gaps
and no rewrites. The store keeps canonical text only; whatever whitespace or
comments the editor had are not the library's business. Committing text
whose canonical form equals the head is a no-op so the sequence stays
meaningful.

Writes follow a single-writer discipline guarded by an flock on
``<root>/.lock`` (held for the whole process lifetime by a running server,
per mutation otherwise), and every file lands via write-to-temp-then-rename
so a crash leaves either the old state or the new one, never shreds.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import ModelGateError
from .gates import Attestation, Override
from .instruments import ATTRIBUTE_CLASS, MEDIUM_METRICS, CharacteristicClass, QualityAttribute
from .parser import parse_model
from .printer import canonical_print, content_hash

try:
    import fcntl
except ImportError:  # non-POSIX: cross-process exclusion degrades to in-process
    fcntl = None

MARKER_NAME = "modelgate.json"
QUALITY_CONFIG_NAME = "quality-model.json"
META_FORMAT = 1

_ENTRY_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_-]*")


class NotALibrary(ModelGateError):
    code = "not_a_library"


class DuplicateEntry(ModelGateError):
    code = "duplicate_entry"


class UnknownEntry(ModelGateError):
    code = "unknown_entry"


class UnknownReview(ModelGateError):
    code = "unknown_review"


class UnknownOverride(ModelGateError):
    code = "unknown_override"


class IllegalTransition(ModelGateError):
    code = "illegal_transition"


class NotWeakAttribute(ModelGateError):
    code = "not_weak_attribute"


class NotMediumMetric(ModelGateError):
    code = "not_medium_metric"


class EmptyJustification(ModelGateError):
    code = "empty_justification"


class BadEntryId(ModelGateError):
    code = "bad_entry_id"


class LibraryLocked(ModelGateError):
    code = "locked"


class Hat(Enum):
    YELLOW = "yellow"  # good points
    BLACK = "black"  # bad points; model needs patching
    WHITE = "white"  # information
    GREEN = "green"  # ideas and improvements
    RED = "red"  # likes and dislikes


class ReviewStatus(Enum):
    OPEN = "open"
    DONE = "done"
    REOPENED = "reopened"


# the only legal lifecycle edges
REVIEW_TRANSITIONS = frozenset(
    {
        (ReviewStatus.OPEN, ReviewStatus.DONE),
        (ReviewStatus.DONE, ReviewStatus.REOPENED),
        (ReviewStatus.REOPENED, ReviewStatus.DONE),
    }
)

OPEN_STATUSES = frozenset({ReviewStatus.OPEN, ReviewStatus.REOPENED})


@dataclass(frozen=True)
class Snapshot:
    seq_no: int
    content_hash: str
    source_text: str
    author: str
    created_at: str


@dataclass(frozen=True)
class Review:
    review_id: str
    hat: Hat
    text: str
    status: ReviewStatus
    snapshot_ref: int
    created_at: str
    updated_at: str

    @property
    def is_open(self) -> bool:
        return self.status in OPEN_STATUSES


@dataclass(frozen=True)
class CommitResult:
    snapshot: Snapshot
    created: bool  # False when the canonical text matched the head (no-op)


@dataclass(frozen=True)
class LibraryEntry:
    entry_id: str
    created_at: str
    snapshots: tuple[Snapshot, ...]

    @property
    def head(self) -> Snapshot:
        return self.snapshots[-1]


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class _RootLock:
    """Re-entrant exclusive lock over the library root.

    flock gives cross-process exclusion; the depth counter lets a server
    hold the lock for its lifetime while its own handlers re-enter freely.
    """

    def __init__(self, path: Path):
        self._path = path
        self._fd: int | None = None
        self._depth = 0
        self._mutex = threading.RLock()

    def acquire(self) -> None:
        with self._mutex:
            if self._depth == 0:
                fd = os.open(self._path, os.O_RDWR | os.O_CREAT, 0o644)
                if fcntl is not None:
                    try:
                        fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
                    except OSError:
                        os.close(fd)
                        raise LibraryLocked(
                            f"library is locked by another process ({self._path})"
                        ) from None
                self._fd = fd
            self._depth += 1

    def release(self) -> None:
        with self._mutex:
            if self._depth == 0:
                raise RuntimeError("lock released more often than acquired")
            self._depth -= 1
            if self._depth == 0 and self._fd is not None:
                if fcntl is not None:
                    fcntl.flock(self._fd, fcntl.LOCK_UN)
                os.close(self._fd)
                self._fd = None

    def __enter__(self) -> "_RootLock":
        self.acquire()
        return self

    def __exit__(self, *exc) -> None:
        self.release()


class LibraryStore:
    """All reads and writes for one library root.

    Reads load from disk on every call so concurrent readers (and a second,
    read-only server) always see fully committed state and nothing else.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        if not (self.root / MARKER_NAME).is_file():
            raise NotALibrary(f"{self.root} is not a model library (run init first)")
        self.lock = _RootLock(self.root / ".lock")

    @classmethod
    def init(cls, root: Path | str) -> "LibraryStore":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        marker = root / MARKER_NAME
        if marker.exists():
            raise ModelGateError(f"{root} is already a model library")
        _atomic_write(marker, json.dumps({"format": META_FORMAT}, indent=2) + "\n")
        return cls(root)

    # --- paths and low-level io ----------------------------------------------

    def _entry_dir(self, entry_id: str) -> Path:
        return self.root / entry_id

    def _meta_path(self, entry_id: str) -> Path:
        return self._entry_dir(entry_id) / "meta.json"

    def _snapshot_path(self, entry_id: str, seq_no: int) -> Path:
        return self._entry_dir(entry_id) / "snapshots" / f"{seq_no}.mdl"

    def _load_meta(self, entry_id: str) -> dict:
        path = self._meta_path(entry_id)
        if not path.is_file():
            raise UnknownEntry(f"no entry named {entry_id!r}")
        return json.loads(path.read_text("utf-8"))

    def _write_meta(self, entry_id: str, meta: dict) -> None:
        _atomic_write(self._meta_path(entry_id), json.dumps(meta, indent=2) + "\n")

    # --- entries and snapshots ------------------------------------------------

    def entry_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if p.is_dir() and (p / "meta.json").is_file()
        )

    def has_entry(self, entry_id: str) -> bool:
        return self._meta_path(entry_id).is_file()

    def create_entry(self, entry_id: str, source_text: str, author: str = "") -> LibraryEntry:
        if not _ENTRY_ID_RE.fullmatch(entry_id):
            raise BadEntryId(
                f"entry id {entry_id!r} must be URL-safe (letters, digits, '-', '_')"
            )
        model = parse_model(source_text)  # nothing persisted on parse failure
        with self.lock:
            if self.has_entry(entry_id):
                raise DuplicateEntry(f"entry {entry_id!r} already exists")
            now = _utcnow()
            snapshot = Snapshot(1, content_hash(model), canonical_print(model), author, now)
            (self._entry_dir(entry_id) / "snapshots").mkdir(parents=True, exist_ok=True)
            _atomic_write(self._snapshot_path(entry_id, 1), snapshot.source_text)
            meta = {
                "format": META_FORMAT,
                "entry_id": entry_id,
                "created_at": now,
                "snapshots": [self._snapshot_row(snapshot)],
                "reviews": [],
                "attestations": [],
                "overrides": [],
                "last_assessment": None,
            }
            self._write_meta(entry_id, meta)
        return self.get_entry(entry_id)

    @staticmethod
    def _snapshot_row(s: Snapshot) -> dict:
        return {
            "seq_no": s.seq_no,
            "content_hash": s.content_hash,
            "author": s.author,
            "created_at": s.created_at,
        }

    def _snapshot_from_row(self, entry_id: str, row: dict) -> Snapshot:
        text = self._snapshot_path(entry_id, row["seq_no"]).read_text("utf-8")
        return Snapshot(
            seq_no=row["seq_no"],
            content_hash=row["content_hash"],
            source_text=text,
            author=row.get("author", ""),
            created_at=row["created_at"],
        )

    def get_entry(self, entry_id: str) -> LibraryEntry:
        meta = self._load_meta(entry_id)
        snapshots = tuple(self._snapshot_from_row(entry_id, r) for r in meta["snapshots"])
        return LibraryEntry(entry_id, meta["created_at"], snapshots)

    def head_snapshot(self, entry_id: str) -> Snapshot:
        meta = self._load_meta(entry_id)
        return self._snapshot_from_row(entry_id, meta["snapshots"][-1])

    def commit_snapshot(self, entry_id: str, source_text: str, author: str = "") -> CommitResult:
        model = parse_model(source_text)
        text = canonical_print(model)
        digest = content_hash(model)
        with self.lock:
            meta = self._load_meta(entry_id)
            head_row = meta["snapshots"][-1]
            if head_row["content_hash"] == digest:
                return CommitResult(self._snapshot_from_row(entry_id, head_row), created=False)
            snapshot = Snapshot(head_row["seq_no"] + 1, digest, text, author, _utcnow())
            _atomic_write(self._snapshot_path(entry_id, snapshot.seq_no), text)
            meta["snapshots"].append(self._snapshot_row(snapshot))
            self._write_meta(entry_id, meta)
        return CommitResult(snapshot, created=True)

    # --- reviews ---------------------------------------------------------------

    @staticmethod
    def _review_from_row(row: dict) -> Review:
        return Review(
            review_id=row["review_id"],
            hat=Hat(row["hat"]),
            text=row["text"],
            status=ReviewStatus(row["status"]),
            snapshot_ref=row["snapshot_ref"],
            created_at=row["created_at"],
            updated_at=row["updated_at"],
        )

    def reviews(self, entry_id: str) -> list[Review]:
        meta = self._load_meta(entry_id)
        return [self._review_from_row(r) for r in meta["reviews"]]

    def open_black_hat_count(self, entry_id: str) -> int:
        return sum(1 for r in self.reviews(entry_id) if r.hat is Hat.BLACK and r.is_open)

    def add_review(self, entry_id: str, hat: Hat | str, text: str) -> Review:
        hat = Hat(hat) if isinstance(hat, str) else hat
        if not text.strip():
            raise ModelGateError("review text must not be empty")
        with self.lock:
            meta = self._load_meta(entry_id)
            now = _utcnow()
            review = Review(
                review_id=f"{entry_id}:r{len(meta['reviews']) + 1}",
                hat=hat,
                text=text,
                status=ReviewStatus.OPEN,
                snapshot_ref=meta["snapshots"][-1]["seq_no"],
                created_at=now,
                updated_at=now,
            )
            meta["reviews"].append(
                {
                    "review_id": review.review_id,
                    "hat": review.hat.value,
                    "text": review.text,
                    "status": review.status.value,
                    "snapshot_ref": review.snapshot_ref,
                    "created_at": review.created_at,
                    "updated_at": review.updated_at,
                }
            )
            self._write_meta(entry_id, meta)
        return review

    def entry_of_review(self, review_id: str) -> str:
        entry_id = review_id.rsplit(":", 1)[0]
        if not entry_id or not self.has_entry(entry_id):
            raise UnknownReview(f"no review named {review_id!r}")
        return entry_id

    def set_review_status(self, review_id: str, new_status: ReviewStatus | str) -> Review:
        new_status = ReviewStatus(new_status) if isinstance(new_status, str) else new_status
        entry_id = self.entry_of_review(review_id)
        with self.lock:
            meta = self._load_meta(entry_id)
            for row in meta["reviews"]:
                if row["review_id"] == review_id:
                    old = ReviewStatus(row["status"])
                    if (old, new_status) not in REVIEW_TRANSITIONS:
                        raise IllegalTransition(
                            f"review cannot go from {old.value} to {new_status.value}"
                        )
                    row["status"] = new_status.value
                    row["updated_at"] = _utcnow()
                    self._write_meta(entry_id, meta)
                    return self._review_from_row(row)
        raise UnknownReview(f"no review named {review_id!r}")

    # --- attestations ------------------------------------------------------------

    def attestations(self, entry_id: str) -> list[Attestation]:
        meta = self._load_meta(entry_id)
        return [
            Attestation(
                attribute=QualityAttribute(r["attribute"]),
                content_hash=r["content_hash"],
                reviewer=r["reviewer"],
                verdict=r["verdict"],
                created_at=r["created_at"],
            )
            for r in meta["attestations"]
        ]

    def record_attestation(
        self, entry_id: str, attribute: QualityAttribute | str, verdict: str, reviewer: str = ""
    ) -> Attestation:
        if isinstance(attribute, str):
            try:
                attribute = QualityAttribute(attribute)
            except ValueError:
                raise NotWeakAttribute(f"unknown quality attribute {attribute!r}") from None
        if ATTRIBUTE_CLASS[attribute] is not CharacteristicClass.WEAK:
            raise NotWeakAttribute(
                f"{attribute.value} is measured automatically and cannot be attested"
            )
        if verdict not in ("pass", "fail"):
            raise ModelGateError(f"verdict must be 'pass' or 'fail', got {verdict!r}")
        with self.lock:
            meta = self._load_meta(entry_id)
            attestation = Attestation(
                attribute=attribute,
                content_hash=meta["snapshots"][-1]["content_hash"],
                reviewer=reviewer,
                verdict=verdict,
                created_at=_utcnow(),
            )
            meta["attestations"].append(
                {
                    "attribute": attestation.attribute.value,
                    "content_hash": attestation.content_hash,
                    "reviewer": attestation.reviewer,
                    "verdict": attestation.verdict,
                    "created_at": attestation.created_at,
                }
            )
            self._write_meta(entry_id, meta)
        return attestation

    def valid_attestations(self, entry_id: str) -> list[Attestation]:
        """Attestations whose hash matches the head snapshot."""
        meta = self._load_meta(entry_id)
        head_hash = meta["snapshots"][-1]["content_hash"]
        return [a for a in self.attestations(entry_id) if a.content_hash == head_hash]

    # --- overrides -----------------------------------------------------------------

    def overrides(self, entry_id: str) -> list[Override]:
        meta = self._load_meta(entry_id)
        return [
            Override(
                metric_id=r["metric_id"],
                element_path=r["element_path"],
                justification=r["justification"],
                author=r["author"],
                created_at=r["created_at"],
                revoked=r["revoked"],
            )
            for r in meta["overrides"]
        ]

    def record_override(
        self,
        entry_id: str,
        metric_id: str,
        element_path: str,
        justification: str,
        author: str = "",
    ) -> Override:
        if metric_id not in MEDIUM_METRICS:
            raise NotMediumMetric(f"{metric_id!r} is not an overridable (medium) metric")
        if not justification.strip():
            raise EmptyJustification("an override needs a written justification")
        with self.lock:
            meta = self._load_meta(entry_id)
            override = Override(
                metric_id=metric_id,
                element_path=element_path,
                justification=justification,
                author=author,
                created_at=_utcnow(),
                revoked=False,
            )
            # one record per (metric, path): re-recording replaces, and
            # re-recording a revoked override reactivates it
            meta["overrides"] = [
                r
                for r in meta["overrides"]
                if (r["metric_id"], r["element_path"]) != override.key
            ]
            meta["overrides"].append(
                {
                    "metric_id": override.metric_id,
                    "element_path": override.element_path,
                    "justification": override.justification,
                    "author": override.author,
                    "created_at": override.created_at,
                    "revoked": override.revoked,
                }
            )
            self._write_meta(entry_id, meta)
        return override

    def revoke_override(self, entry_id: str, metric_id: str, element_path: str) -> Override:
        with self.lock:
            meta = self._load_meta(entry_id)
            for row in meta["overrides"]:
                if row["revoked"]:
                    continue
                if (row["metric_id"], row["element_path"]) == (metric_id, element_path):
                    row["revoked"] = True
                    self._write_meta(entry_id, meta)
                    return Override(
                        metric_id=row["metric_id"],
                        element_path=row["element_path"],
                        justification=row["justification"],
                        author=row["author"],
                        created_at=row["created_at"],
                        revoked=True,
                    )
        raise UnknownOverride(f"no active override for {metric_id!r} at {element_path!r}")

    # --- assessment cache -------------------------------------------------------

    def load_last_assessment(self, entry_id: str) -> dict | None:
        return self._load_meta(entry_id).get("last_assessment")

    def save_last_assessment(self, entry_id: str, report: dict) -> None:
        with self.lock:
            meta = self._load_meta(entry_id)
            meta["last_assessment"] = report
            self._write_meta(entry_id, meta)
