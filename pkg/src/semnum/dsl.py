"""The ``.sns`` text format.

Example::

    cao dec {
      entities: c0, c1, c2;
      op a: L (c0/10) -> (c1*1);
      op b: L (c1/10) -> (c2*1);
      init: c0=234;
    }

Operands are ``entity/radix``, images ``entity*rate``. An operator may end
with ``kind delta``, ``kind fact`` or ``kind fn NAME`` (``kind #`` is the
default and is never printed). ``#`` starts a comment except directly after
``) kind``. Keywords are contextual, so ``op`` or ``init`` are legal
entity names.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .model import (
    CAO,
    Family,
    Form,
    Kind,
    OperatorKind,
    OperatorSpec,
    RADIX_EXCESS_FACT,
    RADIX_EXCESS_VALUE,
    RADIX_MULTIPLICITY,
    default_fact_remainder,
    validate_cao,
    EntityName,
)

__all__ = [
    "SourceSpan",
    "ParseError",
    "DSLError",
    "HOOKS",
    "register_hook",
    "parse",
    "serialize",
    "load",
]

HOOKS: dict[str, OperatorKind] = {}


def register_hook(name: str, carry, remainder) -> OperatorKind:
    """Make ``kind fn NAME`` resolvable by `parse`."""
    if not _IDENT.fullmatch(name):
        raise ValueError(f"hook name {name!r} is not an identifier")
    kind = OperatorKind.function(name, carry, remainder)
    HOOKS[name] = kind
    return kind


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int
    byte_start: int
    byte_end: int

    @classmethod
    def at(cls, text: str, start: int, end: int) -> "SourceSpan":
        line = text.count("\n", 0, start) + 1
        column = start - (text.rfind("\n", 0, start) + 1) + 1
        b0 = len(text[:start].encode("utf-8"))
        return cls(line, column, start, end, b0, b0 + len(text[start:end].encode("utf-8")))


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    expected: str | None = None

    def __str__(self):
        hint = f" (expected {self.expected})" if self.expected else ""
        return f"{self.span.line}:{self.span.column}: {self.message}{hint}"


class DSLError(ValueError):
    def __init__(self, errors: list[ParseError]):
        self.errors = list(errors)
        super().__init__("\n".join(map(str, self.errors)))


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<nat>[0-9]+)"
    r"|(?P<arrow>->)|(?P<punct>[{}:;,()/*=])|(?P<hash>\#)"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident, nat, punct text, "#", "eof"
    text: str
    start: int
    end: int


class _Fail(Exception):
    def __init__(self, error: ParseError):
        self.error = error


def _lex(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise _Fail(ParseError(SourceSpan.at(text, pos, pos + 1), f"unexpected character {text[pos]!r}"))
        kind = m.lastgroup
        if kind == "hash":
            if len(toks) >= 2 and toks[-1].kind == "ident" and toks[-1].text == "kind" and toks[-2].kind == ")":
                toks.append(_Tok("#", "#", pos, pos + 1))
                pos += 1
                continue
            nl = text.find("\n", pos)
            pos = len(text) if nl < 0 else nl
            continue
        if kind != "ws":
            t = m.group()
            toks.append(_Tok(t if kind in ("punct", "arrow") else kind, t, m.start(), m.end()))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text), len(text)))
    return toks


_FORMS = {"L": Form.L, "D": Form.D, "F": Form.F, "M": Form.M}


class _Parser:
    def __init__(self, text: str, hooks: Mapping[str, OperatorKind]):
        self.text = text
        self.hooks = hooks
        self.toks = _lex(text)
        self.i = 0
        self.errors: list[ParseError] = []
        # spans kept for mapping validation failures back to the source
        self.entity_decl: dict[str, list[_Tok]] = {}
        self.op_decl: dict[str, list[_Tok]] = {}
        self.op_refs: dict[tuple[str, str], list[tuple[_Tok, _Tok]]] = {}
        self.init_refs: dict[str, list[_Tok]] = {}
        self.name_tok: _Tok | None = None

    def span(self, tok: _Tok) -> SourceSpan:
        return SourceSpan.at(self.text, tok.start, tok.end)

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, expected: str, tok: _Tok | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise _Fail(ParseError(self.span(tok), f"unexpected {found}", expected))

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            self.fail(what or repr(kind))
        self.i += 1
        return tok

    def keyword(self, word: str) -> _Tok:
        tok = self.tok
        if tok.kind != "ident" or tok.text != word:
            self.fail(repr(word))
        self.i += 1
        return tok

    def at_keyword(self, word: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text == word

    def error(self, tok: _Tok, message: str, expected: str | None = None):
        self.errors.append(ParseError(self.span(tok), message, expected))

    def parse_cao(self):
        self.keyword("cao")
        self.name_tok = self.expect("ident", "CAO name")
        self.expect("{")
        entities = self.parse_entities()
        ops = []
        while self.at_keyword("op"):
            ops.append(self.parse_op())
        init = []
        if self.at_keyword("init"):
            init = self.parse_init()
        if self.tok.kind != "}":
            self.fail("'op', 'init' or '}'")
        self.i += 1
        self.expect("eof", "end of input")
        return self.name_tok.text, entities, ops, init

    def parse_entities(self) -> list[str]:
        self.keyword("entities")
        self.expect(":")
        names = []
        if self.tok.kind == ";":
            self.i += 1
            return names
        while True:
            tok = self.expect("ident", "entity name")
            self.entity_decl.setdefault(tok.text, []).append(tok)
            names.append(tok.text)
            if self.tok.kind == ",":
                self.i += 1
                continue
            self.expect(";", "',' or ';'")
            return names

    def parse_op(self) -> OperatorSpec:
        self.keyword("op")
        id_tok = self.expect("ident", "operator id")
        op_id = id_tok.text
        self.op_decl.setdefault(op_id, []).append(id_tok)
        self.expect(":")
        form_tok = self.expect("ident", "form L, D, F or M")
        if form_tok.text not in _FORMS:
            self.fail("form L, D, F or M", form_tok)
        form = _FORMS[form_tok.text]
        operands, op_toks, op_close = self.parse_list("/", op_id)
        self.expect("->", "'->'")
        images, img_toks, img_close = self.parse_list("*", op_id)
        kind = RADIX_MULTIPLICITY
        if self.at_keyword("kind"):
            self.i += 1
            kind = self.parse_kind()
        self.expect(";", "'kind' or ';'")
        self.check_valence(form, form_tok, op_toks, op_close, img_toks, img_close)
        return OperatorSpec(op_id, form, tuple(operands), tuple(images), kind)

    def parse_list(self, sep: str, op_id: str):
        self.expect("(")
        items, toks = [], []
        while True:
            name = self.expect("ident", "entity name")
            self.expect(sep, repr(sep))
            num = self.expect("nat", "natural number")
            items.append((name.text, int(num.text)))
            toks.append(name)
            self.op_refs.setdefault((op_id, name.text), []).append((name, num))
            if self.tok.kind == ",":
                self.i += 1
                continue
            close = self.expect(")", "',' or ')'")
            return items, toks, close

    def parse_kind(self) -> OperatorKind:
        tok = self.tok
        if tok.kind == "#":
            self.i += 1
            return RADIX_MULTIPLICITY
        if tok.kind == "ident" and tok.text == "delta":
            self.i += 1
            return RADIX_EXCESS_VALUE
        if tok.kind == "ident" and tok.text == "fact":
            self.i += 1
            return RADIX_EXCESS_FACT
        if tok.kind == "ident" and tok.text == "fn":
            self.i += 1
            name = self.expect("ident", "function name")
            if name.text not in self.hooks:
                self.error(name, f"unknown function {name.text}")
                return RADIX_MULTIPLICITY
            return self.hooks[name.text]
        self.fail("'#', 'delta', 'fact' or 'fn'")

    def check_valence(self, form, form_tok, op_toks, op_close, img_toks, img_close):
        w, v = len(op_toks), len(img_toks)
        if form in (Form.L, Form.D) and w > 1:
            self.error(op_toks[1], f"form {form.value} requires exactly one operand")
        if form is Form.F and w < 2:
            self.error(op_close, "form F requires at least two operands")
        if form in (Form.L, Form.F) and v > 1:
            self.error(img_toks[1], f"form {form.value} requires exactly one image")
        if form is Form.D and v < 2:
            self.error(img_close, "form D requires at least two images")

    def parse_init(self):
        self.keyword("init")
        self.expect(":")
        pairs = []
        while True:
            name = self.expect("ident", "entity name")
            self.expect("=", "'='")
            num = self.expect("nat", "natural number")
            pairs.append((name.text, int(num.text)))
            self.init_refs.setdefault(name.text, []).append(name)
            if self.tok.kind == ",":
                self.i += 1
                continue
            self.expect(";", "',' or ';'")
            return pairs

    def locate(self, violation) -> _Tok:
        """Best source token for a validation failure."""
        e, op = violation.entity, violation.op_id
        code = violation.code
        if code == "duplicate-entity":
            return self.entity_decl[e][-1]
        if code == "duplicate-operator":
            return self.op_decl[op][-1]
        if code in ("duplicate-init", "cardinal") or (code == "unknown-entity" and op is None):
            return self.init_refs[e][-1]
        if op is not None and e is not None and (op, e) in self.op_refs:
            refs = self.op_refs[(op, e)]
            name, num = refs[-1]
            return num if code in ("radix", "rate") else name
        if op is not None and op in self.op_decl:
            return self.op_decl[op][0]
        return self.name_tok


def parse(text: str, hooks: Mapping[str, OperatorKind] | None = None) -> CAO:
    """Parse and validate; raises `DSLError` carrying every `ParseError` found."""
    table = dict(HOOKS)
    if hooks:
        table.update(hooks)
    try:
        p = _Parser(text, table)
        name, entities, ops, init = p.parse_cao()
    except _Fail as exc:
        raise DSLError([exc.error]) from None
    # build without new_cao so init order and violations stay attributable
    order = {e: i for i, e in enumerate(entities)}
    init_sorted = sorted(init, key=lambda kv: order.get(kv[0], len(order)))
    cao = CAO(name, tuple(EntityName(e) for e in entities), tuple(ops), tuple(init_sorted))
    errors = list(p.errors)
    for v in validate_cao(cao):
        if v.code == "form":
            continue  # reported with a better span by the parser
        errors.append(ParseError(p.span(p.locate(v)), v.message))
    if errors:
        errors.sort(key=lambda e: e.span.start)
        raise DSLError(errors)
    return cao


def load(path, hooks: Mapping[str, OperatorKind] | None = None) -> CAO:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), hooks)


def _kind_text(kind: OperatorKind) -> str | None:
    if kind.tag is Kind.RADIX_MULTIPLICITY:
        return None
    if kind.tag is Kind.RADIX_EXCESS_VALUE:
        return "delta"
    if kind.tag is Kind.RADIX_EXCESS_FACT:
        if kind.remainder_hook is not default_fact_remainder:
            raise ValueError("only the default excess-fact remainder has a text form")
        return "fact"
    if not kind.hook_name or not _IDENT.fullmatch(kind.hook_name):
        raise ValueError("arbitrary-function kinds need an identifier hook_name to serialize")
    return f"fn {kind.hook_name}"


def _ident(name: str, what: str) -> str:
    if not _IDENT.fullmatch(name):
        raise ValueError(f"{what} {name!r} cannot be written as an identifier")
    return name


def serialize(cao: CAO) -> str:
    """Canonical text; `parse` of the result rebuilds an equal CAO."""
    lines = [f"cao {_ident(cao.name, 'CAO name')} {{"]
    lines.append("  entities: " + ", ".join(_ident(e.key, "entity") for e in cao.entities) + ";")
    for op in cao.operators:
        if op.family is not Family.TRANSFORMING:
            raise ValueError(f"operator {op.op_id} is {op.family.value}; only transforming operators have a text form")
        if op.form not in _FORMS.values():
            raise ValueError(f"form {op.form.value} has no text form")
        ins = ", ".join(f"{e}/{n}" for e, n in op.operands)
        outs = ", ".join(f"{e}*{r}" for e, r in op.images)
        line = f"  op {_ident(op.op_id, 'operator id')}: {op.form.value} ({ins}) -> ({outs})"
        kind = _kind_text(op.kind)
        if kind:
            line += f" kind {kind}"
        lines.append(line + ";")
    if cao.init:
        lines.append("  init: " + ", ".join(f"{k}={v}" for k, v in cao.init) + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"
