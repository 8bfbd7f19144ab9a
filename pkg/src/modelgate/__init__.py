"""Quality-gated library for evolving class models.

Models live in a versioned library; every change is assessed against a
staged quality model (vague, decent, fine) built from ten attributes, and
humans feed in reviews, attestations, and overrides where judgment is
needed. See README.md for the tour.
"""

from .assessor import AssessmentReport, Engine, assess_snapshot, render_json, render_text
from .errors import ModelGateError
from .gates import (
    Attestation,
    AttributeStatus,
    Override,
    QualityModelConfig,
    Stage,
    StageTransition,
    attribute_status,
    evaluate_stage,
    load_quality_config,
    recompute_on_change,
)
from .instruments import (
    CharacteristicClass,
    Finding,
    QualityAttribute,
    Thresholds,
    check_medium,
    check_strong,
    check_weak_heuristics,
    fingerprint_of,
)
from .model import ModelUnit, split_identifier
from .parser import ParseError, parse_model
from .printer import canonical_print, content_hash
from .resolver import SymbolTable, resolve
from .store import (
    BadEntryId,
    CommitResult,
    DuplicateEntry,
    EmptyJustification,
    Hat,
    IllegalTransition,
    LibraryEntry,
    LibraryLocked,
    LibraryStore,
    NotALibrary,
    NotMediumMetric,
    NotWeakAttribute,
    Review,
    ReviewStatus,
    Snapshot,
    UnknownEntry,
    UnknownOverride,
    UnknownReview,
)
from .watch import ParseFailureEvent, ReportEvent, TerminalEvent, WatchSession, watch

__version__ = "0.1.0"

__all__ = [
    "AssessmentReport",
    "Attestation",
    "AttributeStatus",
    "BadEntryId",
    "CharacteristicClass",
    "CommitResult",
    "DuplicateEntry",
    "EmptyJustification",
    "Engine",
    "Finding",
    "Hat",
    "IllegalTransition",
    "LibraryEntry",
    "LibraryLocked",
    "LibraryStore",
    "ModelGateError",
    "NotALibrary",
    "NotMediumMetric",
    "NotWeakAttribute",
    "ModelUnit",
    "Override",
    "ParseError",
    "ParseFailureEvent",
    "QualityAttribute",
    "QualityModelConfig",
    "ReportEvent",
    "Review",
    "ReviewStatus",
    "Snapshot",
    "Stage",
    "StageTransition",
    "SymbolTable",
    "TerminalEvent",
    "Thresholds",
    "UnknownEntry",
    "UnknownOverride",
    "UnknownReview",
    "WatchSession",
    "assess_snapshot",
    "attribute_status",
    "canonical_print",
    "check_medium",
    "check_strong",
    "check_weak_heuristics",
    "content_hash",
    "evaluate_stage",
    "fingerprint_of",
    "load_quality_config",
    "parse_model",
    "recompute_on_change",
    "render_json",
    "render_text",
    "resolve",
    "split_identifier",
    "watch",
]
