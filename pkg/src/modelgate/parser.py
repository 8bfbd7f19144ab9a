"""Tokenizer and recursive-descent parser for ``.mdl`` sources.

Grammar (EBNF):

    model        = "model" IDENT "{" purpose { class | assoc } "}" ;
    purpose      = "purpose" STRING [ "keywords" IDENT { "," IDENT } ] ;
    class        = [ "abstract" ] "class" NAME [ "extends" IDENT { "," IDENT } ]
                   "{" { attr | op } "}" ;
    attr         = "attr" NAME ":" TYPE [ mult ] ;
    op           = "op" NAME "(" [ param { "," param } ] ")" [ ":" TYPE ] ;
    param        = NAME ":" TYPE ;
    assoc        = "assoc" [ IDENT ] end "--" end ;
    end          = IDENT STRING            (* class ref + multiplicity string *)
    mult         = "[" NAT ".." ( NAT | "*" ) "]" ;
    NAME         = IDENT | STRING          (* STRING permits empty name "" *)

``//`` starts a line comment. TYPE is an IDENT (builtin or class name). The
multiplicity string of an association end accepts ``"n"``, ``"n..m"``,
``"n..*"``, and ``"*"``.

The parser never repairs input: any malformed source raises ParseError with
the offending line/column and a hint naming the expected tokens. Ill-formed
*content* (empty names, lower > upper bounds) parses fine; those are matters
for the instruments, not the grammar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ModelGateError
from .model import (
    KEYWORDS,
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


class ParseError(ModelGateError):
    """Positioned syntax error; ``expected`` hints at the tokens that would fit."""

    code = "parse_error"

    def __init__(self, message: str, line: int, column: int, expected: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"parse error at {line}:{column}: {message}{hint}")


@dataclass(frozen=True)
class _Token:
    kind: str  # keyword text, punctuation literal, or 'ident' | 'string' | 'nat' | 'eof'
    text: str
    value: object
    line: int
    col: int


_PUNCT = {"{", "}", "(", ")", ":", ",", "[", "]", "*"}
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def err(msg: str, ln: int, cl: int, expected: str | None = None) -> ParseError:
        return ParseError(msg, ln, cl, expected)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = text if text in KEYWORDS else "ident"
            tokens.append(_Token(kind, text, text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            text = source[i:j]
            tokens.append(_Token("nat", text, int(text), start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            col += 1
            out: list[str] = []
            while True:
                if j >= n or source[j] == "\n":
                    raise err("unterminated string", start_line, start_col, "closing '\"'")
                c = source[j]
                if c == '"':
                    j += 1
                    col += 1
                    break
                if c == "\\":
                    if j + 1 >= n or source[j + 1] not in _ESCAPES:
                        raise err("unknown escape sequence", line, col, r'\" \\ \n \t or \r')
                    out.append(_ESCAPES[source[j + 1]])
                    j += 2
                    col += 2
                    continue
                out.append(c)
                j += 1
                col += 1
            tokens.append(_Token("string", source[i:j], "".join(out), start_line, start_col))
            i = j
            continue
        if source.startswith("..", i):
            tokens.append(_Token("..", "..", "..", start_line, start_col))
            i += 2
            col += 2
            continue
        if source.startswith("--", i):
            tokens.append(_Token("--", "--", "--", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise err(f"unexpected character {ch!r}", start_line, start_col)

    tokens.append(_Token("eof", "", None, line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def at(self, *kinds: str) -> bool:
        return self.peek().kind in kinds

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"unexpected {found}", tok.line, tok.col, expected)

    def expect(self, kind: str, expected: str | None = None) -> _Token:
        if not self.at(kind):
            raise self.fail(expected or f"'{kind}'")
        return self.advance()

    # --- grammar ------------------------------------------------------------

    def model(self) -> ModelUnit:
        self.expect("model", "'model'")
        name = self.expect("ident", "model name").value
        self.expect("{")
        purpose = self.purpose()
        classes: list[ClassDecl] = []
        assocs: list[AssocDecl] = []
        while not self.at("}"):
            if self.at("class", "abstract"):
                classes.append(self.class_decl())
            elif self.at("assoc"):
                assocs.append(self.assoc_decl())
            else:
                raise self.fail("'class', 'abstract', 'assoc', or '}'")
        self.expect("}")
        if not self.at("eof"):
            raise self.fail("end of input")
        return ModelUnit(str(name), purpose, tuple(classes), tuple(assocs))

    def purpose(self) -> PurposeSpec:
        self.expect("purpose", "'purpose'")
        text = self.expect("string", "purpose text string").value
        keywords: list[str] = []
        if self.at("keywords"):
            self.advance()
            keywords.append(str(self.expect("ident", "keyword").value).lower())
            while self.at(","):
                self.advance()
                keywords.append(str(self.expect("ident", "keyword").value).lower())
        deduped = list(dict.fromkeys(keywords))
        return PurposeSpec(str(text), tuple(deduped))

    def name(self) -> str:
        if self.at("ident", "string"):
            return str(self.advance().value)
        raise self.fail("identifier or string name")

    def class_decl(self) -> ClassDecl:
        is_abstract = False
        if self.at("abstract"):
            self.advance()
            is_abstract = True
        self.expect("class", "'class'")
        name = self.name()
        supertypes: list[str] = []
        if self.at("extends"):
            self.advance()
            supertypes.append(str(self.expect("ident", "supertype name").value))
            while self.at(","):
                self.advance()
                supertypes.append(str(self.expect("ident", "supertype name").value))
        self.expect("{")
        attrs: list[AttrDecl] = []
        ops: list[OpDecl] = []
        while not self.at("}"):
            if self.at("attr"):
                attrs.append(self.attr_decl())
            elif self.at("op"):
                ops.append(self.op_decl())
            else:
                raise self.fail("'attr', 'op', or '}'")
        self.expect("}")
        return ClassDecl(name, is_abstract, tuple(supertypes), tuple(attrs), tuple(ops))

    def attr_decl(self) -> AttrDecl:
        self.expect("attr")
        name = self.name()
        self.expect(":")
        type_ref = str(self.expect("ident", "type name").value)
        mult = None
        if self.at("["):
            mult = self.bracket_mult()
        return AttrDecl(name, type_ref, mult)

    def bracket_mult(self) -> Multiplicity:
        self.expect("[")
        lower = int(self.expect("nat", "lower bound").value)
        self.expect("..", "'..'")
        if self.at("*"):
            self.advance()
            upper: int | None = None
        else:
            upper = int(self.expect("nat", "upper bound or '*'").value)
        self.expect("]")
        return Multiplicity(lower, upper)

    def op_decl(self) -> OpDecl:
        self.expect("op")
        name = self.name()
        self.expect("(")
        params: list[Param] = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        return_type = None
        if self.at(":"):
            self.advance()
            return_type = str(self.expect("ident", "return type name").value)
        return OpDecl(name, tuple(params), return_type)

    def param(self) -> Param:
        name = self.name()
        self.expect(":")
        type_ref = str(self.expect("ident", "parameter type name").value)
        return Param(name, type_ref)

    def assoc_decl(self) -> AssocDecl:
        self.expect("assoc")
        name: str | None = None
        # "assoc Foo A ..." names the association; "assoc A "1" ..." does not
        if self.at("ident") and self.peek(1).kind == "ident":
            name = str(self.advance().value)
        end_a = self.assoc_end()
        self.expect("--", "'--'")
        end_b = self.assoc_end()
        return AssocDecl(name, end_a, end_b)

    def assoc_end(self) -> AssocEnd:
        class_ref = str(self.expect("ident", "class name").value)
        mult_tok = self.expect("string", "multiplicity string")
        return AssocEnd(class_ref, self.mult_from_text(str(mult_tok.value), mult_tok))

    def mult_from_text(self, text: str, tok: _Token) -> Multiplicity:
        body = text.strip()
        if body == "*":
            return Multiplicity(0, None)
        lower_s, sep, upper_s = body.partition("..")
        if lower_s.isdigit():
            if not sep:
                return Multiplicity(int(lower_s), int(lower_s))
            if upper_s == "*":
                return Multiplicity(int(lower_s), None)
            if upper_s.isdigit():
                return Multiplicity(int(lower_s), int(upper_s))
        raise ParseError(
            f"invalid multiplicity {text!r}",
            tok.line,
            tok.col,
            "\"n\", \"n..m\", \"n..*\", or \"*\"",
        )


def parse_model(source: str) -> ModelUnit:
    """Parse ``source`` into a ModelUnit or raise ParseError."""
    return _Parser(_tokenize(source)).model()
