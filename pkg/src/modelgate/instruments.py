"""Quality measurement instruments.

Three families of checks, by how much the verdict can be trusted:

* strong: precise, never suppressible (defect-freeness, conformity,
  transformability)
* medium: thresholded smells; each finding can be overridden with a
  justification (understandability, confinement, maintainability)
* weak: advisory heuristics only; humans decide the attribute
  (the purpose-overlap check is the one heuristic here)

Every violation becomes a Finding that names the offending element, states
the cause, and suggests a fix. Fingerprints are pure functions of
(metric id, element path), so the same violation keeps the same identity
across snapshots and renames of unrelated elements.
"""

from __future__ import annotations

import hashlib
import re
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum

import networkx as nx

from .model import (
    ClassDecl,
    ModelUnit,
    PurposeSpec,
    assoc_path,
    class_path,
    member_path,
    split_identifier,
)
from .resolver import ASSOC_END, PARAM_TYPE, RETURN_TYPE, SymbolTable


class CharacteristicClass(Enum):
    STRONG = "strong"
    MEDIUM = "medium"
    WEAK = "weak"


class QualityAttribute(Enum):
    DEFECT_FREENESS = "defect_freeness"
    META_MODEL_CONFORMITY = "meta_model_conformity"
    TRANSFORMABILITY = "transformability"
    CONFINEMENT = "confinement"
    UNDERSTANDABILITY = "understandability"
    MAINTAINABILITY = "maintainability"
    SEMANTIC_VALIDITY = "semantic_validity"
    COMPLETENESS = "completeness"
    PURPOSE_EXTRACTION = "purpose_extraction"
    APPEAL = "appeal"


ATTRIBUTE_CLASS: dict[QualityAttribute, CharacteristicClass] = {
    QualityAttribute.DEFECT_FREENESS: CharacteristicClass.STRONG,
    QualityAttribute.META_MODEL_CONFORMITY: CharacteristicClass.STRONG,
    QualityAttribute.TRANSFORMABILITY: CharacteristicClass.STRONG,
    QualityAttribute.CONFINEMENT: CharacteristicClass.MEDIUM,
    QualityAttribute.UNDERSTANDABILITY: CharacteristicClass.MEDIUM,
    QualityAttribute.MAINTAINABILITY: CharacteristicClass.MEDIUM,
    QualityAttribute.SEMANTIC_VALIDITY: CharacteristicClass.WEAK,
    QualityAttribute.COMPLETENESS: CharacteristicClass.WEAK,
    QualityAttribute.PURPOSE_EXTRACTION: CharacteristicClass.WEAK,
    QualityAttribute.APPEAL: CharacteristicClass.WEAK,
}

WEAK_ATTRIBUTES = frozenset(
    a for a, c in ATTRIBUTE_CLASS.items() if c is CharacteristicClass.WEAK
)

METRIC_ATTRIBUTE: dict[str, QualityAttribute] = {
    # defect-freeness: intra-element well-formedness
    "empty-class-name": QualityAttribute.DEFECT_FREENESS,
    "empty-member-name": QualityAttribute.DEFECT_FREENESS,
    "duplicate-class-name": QualityAttribute.DEFECT_FREENESS,
    "duplicate-member-name": QualityAttribute.DEFECT_FREENESS,
    # meta-model conformity: cross-reference rules
    "unresolved-type-ref": QualityAttribute.META_MODEL_CONFORMITY,
    "inheritance-cycle": QualityAttribute.META_MODEL_CONFORMITY,
    "bad-multiplicity": QualityAttribute.META_MODEL_CONFORMITY,
    "dangling-assoc-end": QualityAttribute.META_MODEL_CONFORMITY,
    # transformability: code-generation dry run
    "reserved-word-name": QualityAttribute.TRANSFORMABILITY,
    "generated-name-collision": QualityAttribute.TRANSFORMABILITY,
    "untypable-operation": QualityAttribute.TRANSFORMABILITY,
    # understandability
    "too-many-classes": QualityAttribute.UNDERSTANDABILITY,
    "too-many-attributes": QualityAttribute.UNDERSTANDABILITY,
    # confinement
    "disconnected-model": QualityAttribute.CONFINEMENT,
    "too-many-elements": QualityAttribute.CONFINEMENT,
    # maintainability
    "long-parameter-list": QualityAttribute.MAINTAINABILITY,
    "deep-inheritance": QualityAttribute.MAINTAINABILITY,
    "high-fanout": QualityAttribute.MAINTAINABILITY,
    "technology-leftover-name": QualityAttribute.MAINTAINABILITY,
    # weak heuristics (advisory only)
    "purpose-mismatch": QualityAttribute.PURPOSE_EXTRACTION,
}

STRONG_METRICS = frozenset(
    m
    for m, a in METRIC_ATTRIBUTE.items()
    if ATTRIBUTE_CLASS[a] is CharacteristicClass.STRONG
)
MEDIUM_METRICS = frozenset(
    m
    for m, a in METRIC_ATTRIBUTE.items()
    if ATTRIBUTE_CLASS[a] is CharacteristicClass.MEDIUM
)

STOPWORDS = frozenset(
    {"a", "an", "the", "of", "for", "and", "or", "to", "in", "on", "with", "is", "are"}
)


@dataclass(frozen=True)
class Finding:
    fingerprint: str
    metric_id: str
    attribute: QualityAttribute
    characteristic: CharacteristicClass
    element_path: str
    message: str
    suggestion: str


def fingerprint_of(metric_id: str, element_path: str) -> str:
    return hashlib.sha256(f"{metric_id}\x00{element_path}".encode("utf-8")).hexdigest()


def make_finding(metric_id: str, element_path: str, message: str, suggestion: str) -> Finding:
    attribute = METRIC_ATTRIBUTE[metric_id]
    return Finding(
        fingerprint=fingerprint_of(metric_id, element_path),
        metric_id=metric_id,
        attribute=attribute,
        characteristic=ATTRIBUTE_CLASS[attribute],
        element_path=element_path,
        message=message,
        suggestion=suggestion,
    )


@dataclass(frozen=True)
class Thresholds:
    """Tunable limits for the medium smells plus the shared word lists.

    Suffix matching is case-sensitive. All max_* limits are inclusive: a
    value above the limit is a finding, the limit itself is not.
    """

    max_classes: int = 30
    max_params: int = 4
    max_dit: int = 5
    max_fanout: int = 7
    max_elements: int = 50
    max_attrs_per_class: int = 10
    leftover_suffixes: tuple[str, ...] = ("DAO", "Impl", "Bean", "EJB")
    purpose_min_overlap: float = 0.5
    reserved_words: tuple[str, ...] = ("class", "type", "new", "return")

    def __post_init__(self):
        for name in ("max_classes", "max_dit", "max_fanout", "max_elements", "max_attrs_per_class"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_params < 0:
            raise ValueError("max_params must be non-negative")
        if not 0.0 <= self.purpose_min_overlap <= 1.0:
            raise ValueError("purpose_min_overlap must be within [0, 1]")
        object.__setattr__(self, "leftover_suffixes", tuple(self.leftover_suffixes))
        object.__setattr__(self, "reserved_words", tuple(self.reserved_words))


def _sorted(findings: list[Finding]) -> list[Finding]:
    # duplicate class names can map two declarations to one path; keep one
    unique = {f.fingerprint: f for f in findings}
    return sorted(unique.values(), key=lambda f: (f.metric_id, f.element_path))


def _named_members(cls: ClassDecl, cpath: str):
    """(path, name) for every attr, op, and param of ``cls``, source order."""
    for ai, attr in enumerate(cls.attributes):
        yield member_path(cpath, "attr", attr.name, ai), attr.name
    for oi, op in enumerate(cls.operations):
        opath = member_path(cpath, "op", op.name, oi)
        yield opath, op.name
        for pi, param in enumerate(op.params):
            yield member_path(opath, "param", param.name, pi), param.name


def _supertype_graph(m: ModelUnit, symtab: SymbolTable) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(symtab.classes)
    for cls in m.classes:
        if not cls.name:
            continue
        for sup in cls.supertypes:
            if sup in symtab.classes and sup != cls.name:
                graph.add_edge(cls.name, sup)
    return graph


def _cycle_classes(m: ModelUnit, symtab: SymbolTable) -> set[str]:
    graph = _supertype_graph(m, symtab)
    on_cycle = {n for scc in nx.strongly_connected_components(graph) if len(scc) > 1 for n in scc}
    # self-extension is a cycle of length one
    for cls in m.classes:
        if cls.name and cls.name in cls.supertypes:
            on_cycle.add(cls.name)
    return on_cycle


def inheritance_depths(m: ModelUnit, symtab: SymbolTable) -> dict[str, int]:
    """Longest supertype chain per class, counted in edges.

    Edges inside inheritance cycles are cut before measuring; the cycle
    itself is a conformity finding, depth stays well-defined either way.
    """
    graph = _supertype_graph(m, symtab)
    scc_of: dict[str, int] = {}
    for i, scc in enumerate(nx.strongly_connected_components(graph)):
        for n in scc:
            scc_of[n] = i
    depths: dict[str, int] = {}

    def depth(name: str) -> int:
        if name in depths:
            return depths[name]
        best = 0
        for sup in graph.successors(name):
            if scc_of[sup] != scc_of[name]:
                best = max(best, 1 + depth(sup))
        depths[name] = best
        return best

    for name in graph.nodes:
        depth(name)
    return depths


def check_strong(m: ModelUnit, symtab: SymbolTable, t: Thresholds | None = None) -> list[Finding]:
    """Precise checks: naming defects, reference conformity, generation viability.

    ``t`` supplies the reserved-word list; findings here are never
    overridable, but the word list itself is configuration.
    """
    t = t or Thresholds()
    out: list[Finding] = []

    # -- defect-freeness
    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        if cls.name == "":
            out.append(
                make_finding(
                    "empty-class-name",
                    cpath,
                    f"class #{ci + 1} has no name",
                    "give the class a descriptive name",
                )
            )
        for path, name in _named_members(cls, cpath):
            if name == "":
                out.append(
                    make_finding(
                        "empty-member-name",
                        path,
                        f"{path} has no name",
                        "name the member after what it holds or does",
                    )
                )

    by_name: dict[str, int] = defaultdict(int)
    for cls in m.classes:
        if cls.name:
            by_name[cls.name] += 1
    for name, count in by_name.items():
        if count > 1:
            out.append(
                make_finding(
                    "duplicate-class-name",
                    name,
                    f"{count} classes are named '{name}'",
                    "merge the duplicates or rename all but one",
                )
            )

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        attr_names: dict[str, int] = defaultdict(int)
        for attr in cls.attributes:
            if attr.name:
                attr_names[attr.name] += 1
        for name, count in attr_names.items():
            if count > 1:
                out.append(
                    make_finding(
                        "duplicate-member-name",
                        f"{cpath}.attr.{name}",
                        f"class '{cls.name}' declares {count} attributes named '{name}'",
                        "remove or rename the duplicates",
                    )
                )
        op_sigs: dict[tuple[str, tuple[str, ...]], int] = defaultdict(int)
        for op in cls.operations:
            if op.name:
                op_sigs[(op.name, tuple(p.type_ref for p in op.params))] += 1
        for (name, sig), count in op_sigs.items():
            if count > 1:
                shown = ", ".join(sig)
                out.append(
                    make_finding(
                        "duplicate-member-name",
                        f"{cpath}.op.{name}",
                        f"class '{cls.name}' declares {count} operations '{name}({shown})'",
                        "remove the duplicates or change their parameter types",
                    )
                )

    # -- meta-model conformity
    for issue in symtab.issues:
        if issue.kind == ASSOC_END:
            out.append(
                make_finding(
                    "dangling-assoc-end",
                    issue.path,
                    f"association end references undeclared class '{issue.ref}'",
                    f"declare class '{issue.ref}' or point the end at an existing class",
                )
            )
        else:
            out.append(
                make_finding(
                    "unresolved-type-ref",
                    issue.path,
                    f"reference to unknown type '{issue.ref}'",
                    f"declare '{issue.ref}' or use a builtin type",
                )
            )

    on_cycle = _cycle_classes(m, symtab)
    for ci, cls in enumerate(m.classes):
        if cls.name and cls.name in on_cycle:
            out.append(
                make_finding(
                    "inheritance-cycle",
                    class_path(cls, ci),
                    f"class '{cls.name}' inherits from itself through its supertype chain",
                    "break the cycle by removing one extends link",
                )
            )

    def bad_mult(path: str, lower: int, upper: int) -> Finding:
        return make_finding(
            "bad-multiplicity",
            path,
            f"multiplicity lower bound {lower} exceeds upper bound {upper}",
            f"swap the bounds or widen the upper bound to at least {lower}",
        )

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        for ai, attr in enumerate(cls.attributes):
            mult = attr.multiplicity
            if mult is not None and not mult.is_valid():
                out.append(bad_mult(member_path(cpath, "attr", attr.name, ai), mult.lower, mult.upper))
    for xi, assoc in enumerate(m.associations):
        xpath = assoc_path(assoc, xi)
        for side, end in (("end_a", assoc.end_a), ("end_b", assoc.end_b)):
            if not end.multiplicity.is_valid():
                out.append(bad_mult(f"{xpath}.{side}", end.multiplicity.lower, end.multiplicity.upper))

    # -- transformability (would generated code compile?)
    reserved = set(t.reserved_words)
    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        candidates = [(cpath, cls.name)] + list(_named_members(cls, cpath))
        for path, name in candidates:
            if name in reserved:
                out.append(
                    make_finding(
                        "reserved-word-name",
                        path,
                        f"'{name}' is a reserved word in generated code",
                        "pick a name that is not a reserved word",
                    )
                )

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        mangled: dict[str, list[str]] = defaultdict(list)
        for member_name in [a.name for a in cls.attributes] + [o.name for o in cls.operations]:
            key = "_".join(split_identifier(member_name))
            if key:
                mangled[key].append(member_name)
        for key, names in mangled.items():
            if len(set(names)) > 1:
                shown = ", ".join(f"'{n}'" for n in dict.fromkeys(names))
                out.append(
                    make_finding(
                        "generated-name-collision",
                        f"{cpath}.generated.{key}",
                        f"members {shown} all map to generated name '{key}'",
                        "rename the members so their generated names differ",
                    )
                )

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        for oi, op in enumerate(cls.operations):
            unresolved = [p.type_ref for p in op.params if not symtab.resolves(p.type_ref)]
            if op.return_type is not None and not symtab.resolves(op.return_type):
                unresolved.append(op.return_type)
            if unresolved:
                opath = member_path(cpath, "op", op.name, oi)
                shown = ", ".join(f"'{t}'" for t in dict.fromkeys(unresolved))
                out.append(
                    make_finding(
                        "untypable-operation",
                        opath,
                        f"operation cannot be generated: unknown type(s) {shown}",
                        "declare the missing types or switch to builtin types",
                    )
                )

    return _sorted(out)


def _class_link_graph(m: ModelUnit, symtab: SymbolTable) -> nx.Graph:
    """Undirected class graph: inheritance and association edges, nodes by name."""
    graph = nx.Graph()
    graph.add_nodes_from(symtab.classes)
    for cls in m.classes:
        if not cls.name:
            continue
        for sup in cls.supertypes:
            if sup in symtab.classes:
                graph.add_edge(cls.name, sup)
    for assoc in m.associations:
        a, b = assoc.end_a.class_ref, assoc.end_b.class_ref
        if a in symtab.classes and b in symtab.classes:
            graph.add_edge(a, b)
    return graph


def check_medium(m: ModelUnit, symtab: SymbolTable, t: Thresholds) -> list[Finding]:
    """Thresholded smells; every finding here is overridable."""
    out: list[Finding] = []

    if len(m.classes) > t.max_classes:
        out.append(
            make_finding(
                "too-many-classes",
                m.name,
                f"model declares {len(m.classes)} classes (limit {t.max_classes})",
                "split the model into smaller, focused models",
            )
        )

    for ci, cls in enumerate(m.classes):
        if len(cls.attributes) > t.max_attrs_per_class:
            out.append(
                make_finding(
                    "too-many-attributes",
                    class_path(cls, ci),
                    f"class '{cls.name}' has {len(cls.attributes)} attributes "
                    f"(limit {t.max_attrs_per_class})",
                    "extract cohesive attribute groups into their own classes",
                )
            )

    graph = _class_link_graph(m, symtab)
    if graph.number_of_nodes() > 1:
        components = nx.number_connected_components(graph)
        if components > 1:
            out.append(
                make_finding(
                    "disconnected-model",
                    m.name,
                    f"class graph splits into {components} unconnected parts",
                    "link the parts with associations or inheritance, or split the model",
                )
            )

    element_count = (
        len(m.classes)
        + sum(len(c.attributes) + len(c.operations) for c in m.classes)
        + len(m.associations)
    )
    if element_count > t.max_elements:
        out.append(
            make_finding(
                "too-many-elements",
                m.name,
                f"model contains {element_count} elements (limit {t.max_elements})",
                "trim the model to what its purpose needs",
            )
        )

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        for oi, op in enumerate(cls.operations):
            if len(op.params) > t.max_params:
                out.append(
                    make_finding(
                        "long-parameter-list",
                        member_path(cpath, "op", op.name, oi),
                        f"operation takes {len(op.params)} parameters (limit {t.max_params})",
                        "group related parameters into a parameter object",
                    )
                )

    depths = inheritance_depths(m, symtab)
    for ci, cls in enumerate(m.classes):
        dit = depths.get(cls.name, 0)
        if cls.name and dit > t.max_dit:
            out.append(
                make_finding(
                    "deep-inheritance",
                    class_path(cls, ci),
                    f"inheritance depth {dit} exceeds limit {t.max_dit}",
                    "flatten the hierarchy or favor composition",
                )
            )

    end_counts: dict[str, int] = defaultdict(int)
    for assoc in m.associations:
        for end in (assoc.end_a, assoc.end_b):
            if end.class_ref in symtab.classes:
                end_counts[end.class_ref] += 1
    for ci, cls in enumerate(m.classes):
        count = end_counts.get(cls.name, 0)
        if count > t.max_fanout:
            out.append(
                make_finding(
                    "high-fanout",
                    class_path(cls, ci),
                    f"class '{cls.name}' is touched by {count} association ends "
                    f"(limit {t.max_fanout})",
                    "split responsibilities so fewer associations converge here",
                )
            )

    for ci, cls in enumerate(m.classes):
        for suffix in t.leftover_suffixes:
            if cls.name.endswith(suffix) and cls.name != suffix:
                out.append(
                    make_finding(
                        "technology-leftover-name",
                        class_path(cls, ci),
                        f"class name '{cls.name}' ends with technology suffix '{suffix}'",
                        f"rename to '{cls.name[: -len(suffix)]}'",
                    )
                )
                break

    return _sorted(out)


_WORD_RE = re.compile(r"[A-Za-z]+")


def purpose_keywords(p: PurposeSpec) -> list[str]:
    """Effective keyword set: explicit keywords, else purpose text minus stopwords.

    Keywords are compared case-insensitively against name tokens, which
    split_identifier lowercases, so everything is normalized to lowercase
    here; duplicates collapse so each keyword counts once in the overlap.
    """
    if p.keywords:
        explicit: list[str] = []
        for k in p.keywords:
            k = k.lower()
            if k not in explicit:
                explicit.append(k)
        return explicit
    derived: list[str] = []
    for word in _WORD_RE.findall(p.text):
        for token in split_identifier(word):
            if token not in STOPWORDS and token not in derived:
                derived.append(token)
    return derived


def model_name_tokens(m: ModelUnit) -> set[str]:
    tokens: set[str] = set()
    for cls in m.classes:
        tokens.update(split_identifier(cls.name))
        for attr in cls.attributes:
            tokens.update(split_identifier(attr.name))
        for op in cls.operations:
            tokens.update(split_identifier(op.name))
    return tokens


def purpose_overlap(p: PurposeSpec, m: ModelUnit) -> float:
    """Fraction of purpose keywords that appear in model element names.

    An empty keyword set scores 1.0: nothing was promised, nothing is missing.
    """
    keywords = purpose_keywords(p)
    if not keywords:
        return 1.0
    names = model_name_tokens(m)
    hit = sum(1 for k in keywords if k in names)
    return hit / len(keywords)


def check_weak_heuristics(m: ModelUnit, t: Thresholds) -> list[Finding]:
    """Advisory hints for the human-judged attributes; never decide status."""
    score = purpose_overlap(m.purpose, m)
    if score >= t.purpose_min_overlap:
        return []
    keywords = purpose_keywords(m.purpose)
    names = model_name_tokens(m)
    missing = [k for k in keywords if k not in names]
    shown = ", ".join(f"'{k}'" for k in missing)
    return [
        make_finding(
            "purpose-mismatch",
            f"{m.name}.purpose",
            f"only {score:.2f} of the purpose keywords appear in element names "
            f"(minimum {t.purpose_min_overlap:.2f}); missing: {shown}",
            "cover the missing keywords in class, attribute, or operation names, "
            "or adjust the stated purpose",
        )
    ]
