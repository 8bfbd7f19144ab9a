"""Reference resolution over a parsed model.

Every type_ref, supertype, and association class_ref either resolves to a
declared class or a builtin type, or becomes a ResolutionIssue. Issues are
data for the instruments, never exceptions: a model full of dangling
references still resolves, it just resolves badly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import BUILTIN_TYPES, ClassDecl, ModelUnit, assoc_path, class_path, member_path

# issue kinds, by reference site
ATTR_TYPE = "attr_type"
PARAM_TYPE = "param_type"
RETURN_TYPE = "return_type"
SUPERTYPE = "supertype"
ASSOC_END = "assoc_end"


@dataclass(frozen=True)
class ResolutionIssue:
    path: str
    ref: str
    kind: str


@dataclass
class SymbolTable:
    """Name → declaration map plus the issues found while building it.

    On duplicate class names the first declaration wins; the duplication
    itself is reported by the defect-freeness instrument, not here.
    """

    classes: dict[str, ClassDecl] = field(default_factory=dict)
    issues: list[ResolutionIssue] = field(default_factory=list)

    def is_declared(self, name: str) -> bool:
        return name in self.classes

    def resolves(self, name: str) -> bool:
        return name in self.classes or name in BUILTIN_TYPES


def resolve(m: ModelUnit) -> SymbolTable:
    table = SymbolTable()
    for cls in m.classes:
        if cls.name and cls.name not in table.classes:
            table.classes[cls.name] = cls

    def check(ref: str, path: str, kind: str) -> None:
        if not table.resolves(ref):
            table.issues.append(ResolutionIssue(path, ref, kind))

    for ci, cls in enumerate(m.classes):
        cpath = class_path(cls, ci)
        for si, sup in enumerate(cls.supertypes):
            if sup not in table.classes:
                table.issues.append(
                    ResolutionIssue(f"{cpath}.supertypes[{si}]", sup, SUPERTYPE)
                )
        for ai, attr in enumerate(cls.attributes):
            apath = member_path(cpath, "attr", attr.name, ai)
            check(attr.type_ref, f"{apath}.type", ATTR_TYPE)
        for oi, op in enumerate(cls.operations):
            opath = member_path(cpath, "op", op.name, oi)
            for pi, param in enumerate(op.params):
                ppath = member_path(opath, "param", param.name, pi)
                check(param.type_ref, ppath, PARAM_TYPE)
            if op.return_type is not None:
                check(op.return_type, f"{opath}.return", RETURN_TYPE)

    for xi, assoc in enumerate(m.associations):
        xpath = assoc_path(assoc, xi)
        for side, end in (("end_a", assoc.end_a), ("end_b", assoc.end_b)):
            if not table.is_declared(end.class_ref):
                table.issues.append(
                    ResolutionIssue(f"{xpath}.{side}", end.class_ref, ASSOC_END)
                )
    return table
