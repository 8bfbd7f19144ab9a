"""Stages, quality gates, and the evaluation rules.

A model sits at one of three stages: vague (red), decent (yellow), fine
(green). Each quality attribute is gated at the lowest stage that requires
it; gates are cumulative, so fine demands everything decent demands and
more. Evaluation is stateless: the stage is recomputed from scratch on every
change, which makes demotion automatic rather than an extra rule.

Human records enter here in two shapes:

* Attestation: a pass/fail verdict on a weak attribute, bound to the exact
  content hash it judged. Any content change silently invalidates it.
* Override: a justified dismissal of one medium finding, keyed by
  (metric id, element path), carried across snapshots until revoked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from enum import IntEnum
from pathlib import Path

from .errors import ModelGateError
from .instruments import (
    ATTRIBUTE_CLASS,
    CharacteristicClass,
    Finding,
    QualityAttribute,
    Thresholds,
)


class ConfigError(ModelGateError):
    code = "config_error"


class Stage(IntEnum):
    VAGUE = 0
    DECENT = 1
    FINE = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def color(self) -> str:
        return {Stage.VAGUE: "red", Stage.DECENT: "yellow", Stage.FINE: "green"}[self]

    @classmethod
    def from_label(cls, label: str) -> "Stage":
        try:
            return cls[label.upper()]
        except KeyError:
            raise ConfigError(f"unknown stage {label!r}") from None


class AttributeStatus(IntEnum):
    VIOLATED = 0
    PENDING_HUMAN = 1
    SATISFIED = 2

    @property
    def label(self) -> str:
        return {
            AttributeStatus.VIOLATED: "violated",
            AttributeStatus.PENDING_HUMAN: "pending_human",
            AttributeStatus.SATISFIED: "satisfied",
        }[self]


@dataclass(frozen=True)
class Attestation:
    attribute: QualityAttribute
    content_hash: str
    reviewer: str
    verdict: str  # "pass" | "fail"
    created_at: str


@dataclass(frozen=True)
class Override:
    metric_id: str
    element_path: str
    justification: str
    author: str
    created_at: str
    revoked: bool = False

    @property
    def key(self) -> tuple[str, str]:
        return (self.metric_id, self.element_path)


# Default gate placement. Decent asks for well-formedness, basic
# understandability, and a human nod on semantic validity; fine adds
# generation-readiness and the remaining human judgments.
DEFAULT_GATES: dict[QualityAttribute, Stage] = {
    QualityAttribute.DEFECT_FREENESS: Stage.DECENT,
    QualityAttribute.META_MODEL_CONFORMITY: Stage.DECENT,
    QualityAttribute.UNDERSTANDABILITY: Stage.DECENT,
    QualityAttribute.CONFINEMENT: Stage.DECENT,
    QualityAttribute.SEMANTIC_VALIDITY: Stage.DECENT,
    QualityAttribute.TRANSFORMABILITY: Stage.FINE,
    QualityAttribute.MAINTAINABILITY: Stage.FINE,
    QualityAttribute.COMPLETENESS: Stage.FINE,
    QualityAttribute.PURPOSE_EXTRACTION: Stage.FINE,
    QualityAttribute.APPEAL: Stage.FINE,
}


@dataclass(frozen=True)
class QualityModelConfig:
    """Attribute → gate mapping plus the instrument thresholds."""

    gate_of: dict[QualityAttribute, Stage] = field(default_factory=lambda: dict(DEFAULT_GATES))
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        missing = set(QualityAttribute) - set(self.gate_of)
        if missing:
            names = ", ".join(sorted(a.value for a in missing))
            raise ConfigError(f"gate mapping misses attributes: {names}")
        for attr, stage in self.gate_of.items():
            if stage not in (Stage.DECENT, Stage.FINE):
                raise ConfigError(
                    f"attribute {attr.value!r} must be gated at decent or fine, got {stage.label!r}"
                )


def load_quality_config(path: Path | str | None) -> QualityModelConfig:
    """Read the quality-model JSON file; a missing file means defaults.

    Schema: ``{"gates": {"<attribute>": "decent"|"fine"}, "thresholds": {...}}``.
    Both sections are partial overrides over the defaults. Unknown attribute
    or threshold names are load errors, not silently ignored.
    """
    if path is None:
        return QualityModelConfig()
    path = Path(path)
    if not path.exists():
        return QualityModelConfig()
    try:
        raw = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid quality-model config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"quality-model config {path} must be a JSON object")
    unknown_sections = set(raw) - {"gates", "thresholds"}
    if unknown_sections:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown_sections))}")

    gates = dict(DEFAULT_GATES)
    by_value = {a.value: a for a in QualityAttribute}
    for name, stage_label in raw.get("gates", {}).items():
        if name not in by_value:
            raise ConfigError(f"unknown quality attribute {name!r}")
        if not isinstance(stage_label, str):
            raise ConfigError(f"gate for {name!r} must be a string")
        gates[by_value[name]] = Stage.from_label(stage_label)

    threshold_fields = {f.name for f in fields(Thresholds)}
    overrides = raw.get("thresholds", {})
    unknown = set(overrides) - threshold_fields
    if unknown:
        raise ConfigError(f"unknown threshold names: {', '.join(sorted(unknown))}")
    try:
        thresholds = Thresholds(**overrides)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad threshold value: {exc}") from exc
    return QualityModelConfig(gate_of=gates, thresholds=thresholds)


def attribute_status(
    attr: QualityAttribute,
    findings: list[Finding],
    overrides: list[Override],
    attestations: list[Attestation],
    open_black_hats: int = 0,
) -> AttributeStatus:
    """Status of one attribute given the snapshot's findings and human records.

    ``attestations`` must already be filtered to the snapshot under
    evaluation (hash-valid ones only); stale attestations never apply.
    """
    characteristic = ATTRIBUTE_CLASS[attr]
    mapped = [f for f in findings if f.attribute is attr]

    if characteristic is CharacteristicClass.STRONG:
        return AttributeStatus.VIOLATED if mapped else AttributeStatus.SATISFIED

    if characteristic is CharacteristicClass.MEDIUM:
        active = {o.key for o in overrides if not o.revoked}
        for finding in mapped:
            if (finding.metric_id, finding.element_path) not in active:
                return AttributeStatus.VIOLATED
        return AttributeStatus.SATISFIED

    # weak: metrics only advise; humans decide
    if attr is QualityAttribute.SEMANTIC_VALIDITY and open_black_hats > 0:
        return AttributeStatus.VIOLATED
    verdict = None
    for att in attestations:  # latest record wins
        if att.attribute is attr:
            verdict = att.verdict
    if verdict == "pass":
        return AttributeStatus.SATISFIED
    if verdict == "fail":
        return AttributeStatus.VIOLATED
    return AttributeStatus.PENDING_HUMAN


def evaluate_stage(
    statuses: dict[QualityAttribute, AttributeStatus], cfg: QualityModelConfig
) -> Stage:
    """Highest stage whose cumulative gate is fully satisfied.

    Pending human judgment blocks a gate exactly like a violation: an
    unverified attribute must not pass.
    """
    stage = Stage.VAGUE
    for candidate in (Stage.DECENT, Stage.FINE):
        for attr, gate in cfg.gate_of.items():
            if gate <= candidate and statuses[attr] is not AttributeStatus.SATISFIED:
                return stage
        stage = candidate
    return stage


@dataclass(frozen=True)
class StageTransition:
    old: Stage | None
    new: Stage
    demoted: bool


def recompute_on_change(
    prev_stage: Stage | None,
    statuses: dict[QualityAttribute, AttributeStatus],
    cfg: QualityModelConfig,
) -> StageTransition:
    """Stateless re-evaluation after any change; demotion falls out for free."""
    new = evaluate_stage(statuses, cfg)
    demoted = prev_stage is not None and new < prev_stage
    return StageTransition(prev_stage, new, demoted)
