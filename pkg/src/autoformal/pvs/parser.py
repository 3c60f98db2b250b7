"""Recursive-descent parser for the PVS subset.

Recovers from the documented LLM defect shapes (keyword-first theory
header, IMPORTING before BEGIN, END name mismatch) into a best-effort AST
plus fixable diagnostics. Out-of-subset declarations are captured as
opaque text rather than rejected, so foreign constructs survive printing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .diagnostics import Diagnostic, make_diagnostic
from .lexer import FORMULA_CLASSES, Token, TokenKind, lex
from .nodes import (
    BindingGroup,
    Declaration,
    DeclKind,
    ExprKind,
    ExprNode,
    Importing,
    TheoryAst,
    TypeExpr,
    TypeKind,
)

__all__ = ["ParseResult", "parse_theory"]


@dataclass
class ParseResult:
    ast: Optional[TheoryAst]
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.ast is not None and not any(d.code == "E_PARSE" for d in self.diagnostics)


class _ParseFail(Exception):
    pass


_BINDERS = {"FORALL": ExprKind.FORALL, "EXISTS": ExprKind.EXISTS, "LAMBDA": ExprKind.LAMBDA}

# operator table: canonical name, precedence, right-associative?
_OP_ALIASES = {"&": "AND", "=>": "IMPLIES", "<=>": "IFF"}
_PREC = {
    "IFF": 10,
    "IMPLIES": 20,
    "OR": 30,
    "AND": 40,
    # NOT sits at 50 (handled as a prefix rule)
    "=": 60, "/=": 60, "<": 60, "<=": 60, ">": 60, ">=": 60,
    "+": 70, "-": 70,
    "*": 80, "/": 80,
}
_RIGHT_ASSOC = {"IMPLIES"}
# prefix NOT binds looser than comparisons, tighter than AND
_NOT_PREC = 50


class _Parser:
    def __init__(self, text: str):
        self.text = text
        all_tokens, lex_diags = lex(text)
        self.tokens = [t for t in all_tokens if t.kind is not TokenKind.COMMENT]
        self.diags: list[Diagnostic] = list(lex_diags)
        self.pos = 0

    # --- token plumbing -------------------------------------------------

    def peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_keyword(self, word: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.text.upper() == word

    def at_punct(self, ch: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is TokenKind.PUNCT and tok.text == ch

    def at_op(self, ch: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is TokenKind.OP and tok.text == ch

    def expect_punct(self, ch: str) -> Token:
        if not self.at_punct(ch):
            raise _ParseFail(f"expected {ch!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.IDENT:
            raise _ParseFail("expected identifier")
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise _ParseFail(f"expected {word}")
        return self.advance()

    def error(self, code: str, start: int, end: int, message: str, **data) -> None:
        self.diags.append(make_diagnostic(self.text, code, start, end, message, data=data))

    def line_start_token(self, tok: Token) -> bool:
        """True when only whitespace precedes tok on its source line."""
        i = self.text.rfind("\n", 0, tok.start) + 1
        return self.text[i : tok.start].strip() == ""

    # --- theory ----------------------------------------------------------

    def parse(self) -> ParseResult:
        try:
            ast = self._theory()
        except _ParseFail as exc:
            tok = self.peek() or (self.tokens[-1] if self.tokens else None)
            start = tok.start if tok else 0
            end = tok.end if tok else 0
            self.error("E_PARSE", start, end, f"not a recognizable theory: {exc}")
            return ParseResult(None, self.diags)
        return ParseResult(ast, self.diags)

    def _theory(self) -> TheoryAst:
        if not self.tokens:
            raise _ParseFail("empty input")
        name_tok, formals = self._header()
        importings: list[Importing] = []

        # recovery: IMPORTING clauses between the header and BEGIN
        pre_begin: list[tuple[int, int, list[Importing]]] = []
        while self.at_keyword("IMPORTING"):
            start = self.peek().start
            imps = self._importing_clause()
            pre_begin.append((start, imps[-1].span[1], imps))
            importings.extend(imps)

        begin_tok = self.expect_keyword("BEGIN")
        for start, end, imps in pre_begin:
            self.error(
                "E_IMPORT_BEFORE_BEGIN",
                start,
                end,
                "IMPORTING must appear after BEGIN",
                import_start=start,
                import_end=end,
                begin_start=begin_tok.start,
                begin_end=begin_tok.end,
                names=[im.name for im in imps],
            )

        declarations: list[Declaration] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise _ParseFail("missing END")
            if self.at_keyword("END"):
                break
            if self.at_keyword("IMPORTING"):
                importings.extend(self._importing_clause())
                continue
            declarations.append(self._declaration())

        self.expect_keyword("END")
        end_tok = self.expect_ident()
        name = name_tok.text
        if end_tok.text != name:
            self.error(
                "E_END_NAME_MISMATCH",
                end_tok.start,
                end_tok.end,
                f"END name {end_tok.text!r} does not match theory name {name!r}",
                found=end_tok.text,
                expected=name,
            )
        return TheoryAst(
            name=name,
            formals=formals,
            importings=importings,
            declarations=declarations,
            end_name=end_tok.text,
            span=(name_tok.start, end_tok.end),
            source=self.text,
        )

    def _header(self) -> tuple[Token, list[BindingGroup]]:
        # recovery: `theory Name` written keyword-first
        if self.at_keyword("THEORY"):
            kw = self.advance()
            name_tok = self.expect_ident()
            formals, formals_end = self._theory_formals()
            formals_text = self.text[name_tok.end : formals_end] if formals else ""
            header_end = formals_end if formals else name_tok.end
            # tolerate a stray `: THEORY` tail after the recovered form,
            # folding it into the span the repair rule will rewrite
            if self.at_punct(":") and self.at_keyword("THEORY", 1):
                self.advance()
                header_end = self.advance().end
            self.error(
                "E_THEORY_HEADER",
                kw.start,
                header_end,
                f"theory header must read '{name_tok.text}: THEORY'",
                name=name_tok.text,
                formals_text=formals_text,
            )
            return name_tok, formals

        name_tok = self.expect_ident()
        formals, _ = self._theory_formals()
        self.expect_punct(":")
        self.expect_keyword("THEORY")
        return name_tok, formals

    def _theory_formals(self) -> tuple[list[BindingGroup], int]:
        if not self.at_punct("["):
            tok = self.peek(-1)
            return [], tok.end if tok else 0
        self.advance()
        groups = self._binding_groups_until("]")
        close = self.expect_punct("]")
        return groups, close.end

    def _importing_clause(self) -> list[Importing]:
        self.expect_keyword("IMPORTING")
        imports = [self._import_name()]
        while self.at_punct(","):
            self.advance()
            imports.append(self._import_name())
        return imports

    def _import_name(self) -> Importing:
        tok = self.expect_ident()
        name = tok.text
        end = tok.end
        if self.at_punct("["):
            # theory actuals kept verbatim: scan to the matching bracket
            depth = 0
            while True:
                nxt = self.peek()
                if nxt is None:
                    raise _ParseFail("unterminated theory actuals")
                self.advance()
                if nxt.kind is TokenKind.PUNCT and nxt.text == "[":
                    depth += 1
                elif nxt.kind is TokenKind.PUNCT and nxt.text == "]":
                    depth -= 1
                    if depth == 0:
                        end = nxt.end
                        break
            name = self.text[tok.start : end]
        return Importing(name=name, span=(tok.start, end))

    # --- declarations ----------------------------------------------------

    def _declaration(self) -> Declaration:
        start_pos = self.pos
        tok = self.peek()
        try:
            return self._structured_declaration()
        except _ParseFail:
            self.pos = start_pos
            return self._opaque_declaration(tok)

    def _structured_declaration(self) -> Declaration:
        name_tok = self.expect_ident()
        params: list[BindingGroup] = []
        if self.at_punct("("):
            self.advance()
            params = self._binding_groups_until(")")
            self.expect_punct(")")
        self.expect_punct(":")

        if self.at_keyword("TYPE"):
            self.advance()
            if params:
                raise _ParseFail("type declarations take no parameters")
            if self.at_op("="):
                self.advance()
                value = self._type_expr()
                return Declaration(
                    DeclKind.TYPE_DECL,
                    name_tok.text,
                    signature=value,
                    span=(name_tok.start, value.span[1]),
                )
            return Declaration(
                DeclKind.UNINTERPRETED_TYPE,
                name_tok.text,
                span=(name_tok.start, self.tokens[self.pos - 1].end),
            )

        if self.at_keyword("VAR"):
            self.advance()
            if params:
                raise _ParseFail("variable declarations take no parameters")
            sig = self._type_expr()
            return Declaration(
                DeclKind.VAR_DECL,
                name_tok.text,
                signature=sig,
                span=(name_tok.start, sig.span[1]),
            )

        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.KEYWORD and tok.text.upper() in FORMULA_CLASSES:
            self.advance()
            if params:
                raise _ParseFail("formula declarations take no parameters")
            body = self._expr()
            return Declaration(
                DeclKind.FORMULA_DECL,
                name_tok.text,
                formula_class=tok.text.upper(),
                body=body,
                span=(name_tok.start, body.span[1]),
            )

        sig = self._type_expr()
        if self.at_op("="):
            self.advance()
            body = self._expr()
            return Declaration(
                DeclKind.DEF_DECL,
                name_tok.text,
                params=params,
                signature=sig,
                body=body,
                span=(name_tok.start, body.span[1]),
            )
        if params:
            raise _ParseFail("parameterized declaration requires a definition body")
        return Declaration(
            DeclKind.CONST_DECL,
            name_tok.text,
            signature=sig,
            span=(name_tok.start, sig.span[1]),
        )

    def _opaque_declaration(self, first: Token) -> Declaration:
        # swallow tokens until the next line-start declaration head,
        # IMPORTING, or END; keep the covered source verbatim
        self.advance()
        end = first.end
        while True:
            tok = self.peek()
            if tok is None:
                break
            if self.at_keyword("END") or self.at_keyword("IMPORTING"):
                break
            if (
                tok.kind is TokenKind.IDENT
                and self.line_start_token(tok)
                and tok.start > end
                and self._looks_like_decl_head()
            ):
                break
            self.advance()
            end = tok.end
        name = first.text if first.kind is TokenKind.IDENT else None
        return Declaration(
            DeclKind.OPAQUE,
            name,
            text=self.text[first.start : end],
            span=(first.start, end),
        )

    def _looks_like_decl_head(self) -> bool:
        if self.at_punct(":", 1):
            return True
        if self.at_punct("(", 1):
            depth = 0
            i = 1
            while True:
                tok = self.peek(i)
                if tok is None:
                    return False
                if tok.kind is TokenKind.PUNCT and tok.text == "(":
                    depth += 1
                elif tok.kind is TokenKind.PUNCT and tok.text == ")":
                    depth -= 1
                    if depth == 0:
                        nxt = self.peek(i + 1)
                        return nxt is not None and nxt.kind is TokenKind.PUNCT and nxt.text == ":"
                i += 1
        return False

    def _binding_groups_until(self, close: str) -> list[BindingGroup]:
        groups: list[BindingGroup] = []
        while True:
            names = [self.expect_ident().text]
            while self.at_punct(","):
                # lookahead: comma may separate names or whole groups
                nxt = self.peek(1)
                if nxt is None or nxt.kind is not TokenKind.IDENT:
                    raise _ParseFail("expected identifier after ','")
                after = self.peek(2)
                if after is not None and after.kind is TokenKind.PUNCT and after.text in (",", ":"):
                    self.advance()
                    names.append(self.expect_ident().text)
                else:
                    break
            self.expect_punct(":")
            ty = self._type_expr()
            groups.append(BindingGroup(names=names, type=ty))
            if self.at_punct(","):
                self.advance()
                continue
            if self.at_punct(close) or close == "":
                return groups
            raise _ParseFail(f"expected ',' or {close!r} in bindings")

    # --- types -----------------------------------------------------------

    def _type_expr(self) -> TypeExpr:
        tok = self.peek()
        if tok is None:
            raise _ParseFail("expected type")
        if tok.kind is TokenKind.PUNCT and tok.text == "[":
            open_tok = self.advance()
            parts = [self._type_expr()]
            while self.at_punct(","):
                self.advance()
                parts.append(self._type_expr())
            if self.at_op("->"):
                self.advance()
                rng = self._type_expr()
                close = self.expect_punct("]")
                return TypeExpr(
                    TypeKind.FUNCTION, args=parts + [rng], span=(open_tok.start, close.end)
                )
            close = self.expect_punct("]")
            if len(parts) < 2:
                raise _ParseFail("tuple type needs at least two components")
            return TypeExpr(TypeKind.TUPLE, args=parts, span=(open_tok.start, close.end))
        if tok.kind in (TokenKind.IDENT, TokenKind.KEYWORD):
            # TYPE appears as a formal-parameter kind: `[T: TYPE]`
            if tok.kind is TokenKind.KEYWORD and tok.text.upper() != "TYPE":
                raise _ParseFail(f"unexpected keyword {tok.text!r} in type")
            self.advance()
            name = tok.canon if tok.kind is TokenKind.KEYWORD else tok.text
            end = tok.end
            args: list[TypeExpr] = []
            if self.at_punct("["):
                self.advance()
                args.append(self._type_expr())
                while self.at_punct(","):
                    self.advance()
                    args.append(self._type_expr())
                close = self.expect_punct("]")
                end = close.end
            return TypeExpr(TypeKind.NAMED, name=name, args=args, span=(tok.start, end))
        raise _ParseFail(f"unexpected token {tok.text!r} in type")

    # --- expressions -----------------------------------------------------

    def _expr(self) -> ExprNode:
        return self._binary(0)

    def _binary(self, min_prec: int) -> ExprNode:
        left = self._operand()
        while True:
            tok = self.peek()
            if tok is None:
                return left
            op = None
            if tok.kind is TokenKind.KEYWORD and tok.text.upper() in ("AND", "OR", "IMPLIES", "IFF"):
                op = tok.text.upper()
            elif tok.kind is TokenKind.OP:
                op = _OP_ALIASES.get(tok.text, tok.text)
                if op not in _PREC:
                    return left
            else:
                return left
            prec = _PREC.get(op)
            if prec is None or prec < min_prec:
                return left
            self.advance()
            next_min = prec if op in _RIGHT_ASSOC else prec + 1
            right = self._binary(next_min)
            left = ExprNode(
                ExprKind.BINARY_OP,
                children=[left, right],
                atom=op,
                span=(left.span[0], right.span[1]),
            )

    def _operand(self) -> ExprNode:
        if self.at_keyword("NOT"):
            kw = self.advance()
            # operand covers comparison chains: NOT a = b reads NOT(a = b)
            operand = self._binary(_NOT_PREC + 1)
            fn = ExprNode(ExprKind.NAME_REF, atom="NOT", span=(kw.start, kw.end))
            return ExprNode(
                ExprKind.APPLICATION,
                children=[fn, operand],
                span=(kw.start, operand.span[1]),
            )
        return self._application()

    def _application(self) -> ExprNode:
        node = self._atom()
        while self.at_punct("("):
            if node.node_kind not in (
                ExprKind.NAME_REF,
                ExprKind.APPLICATION,
                ExprKind.PARENTHESIZED,
            ):
                return node
            self.advance()
            args = [self._expr()]
            while self.at_punct(","):
                self.advance()
                args.append(self._expr())
            close = self.expect_punct(")")
            node = ExprNode(
                ExprKind.APPLICATION,
                children=[node] + args,
                span=(node.span[0], close.end),
            )
        return node

    def _atom(self) -> ExprNode:
        tok = self.peek()
        if tok is None:
            raise _ParseFail("expected expression")
        if tok.kind is TokenKind.KEYWORD and tok.text.upper() in _BINDERS:
            return self._binder()
        if tok.kind is TokenKind.IDENT:
            self.advance()
            return ExprNode(ExprKind.NAME_REF, atom=tok.text, span=(tok.start, tok.end))
        if tok.kind is TokenKind.NUMBER:
            self.advance()
            return ExprNode(ExprKind.NUMBER_LITERAL, atom=tok.text, span=(tok.start, tok.end))
        if tok.kind is TokenKind.PUNCT and tok.text == "(":
            open_tok = self.advance()
            first = self._expr()
            if self.at_punct(","):
                elements = [first]
                while self.at_punct(","):
                    self.advance()
                    elements.append(self._expr())
                close = self.expect_punct(")")
                return ExprNode(
                    ExprKind.TUPLE, children=elements, span=(open_tok.start, close.end)
                )
            close = self.expect_punct(")")
            return ExprNode(
                ExprKind.PARENTHESIZED, children=[first], span=(open_tok.start, close.end)
            )
        if tok.kind is TokenKind.PUNCT and tok.text == "{":
            open_tok = self.advance()
            names = [self.expect_ident().text]
            while self.at_punct(","):
                self.advance()
                names.append(self.expect_ident().text)
            self.expect_punct(":")
            ty = self._type_expr()
            self.expect_punct("|")
            pred = self._expr()
            close = self.expect_punct("}")
            return ExprNode(
                ExprKind.SET_COMPREHENSION,
                children=[pred],
                bindings=[BindingGroup(names=names, type=ty)],
                span=(open_tok.start, close.end),
            )
        raise _ParseFail(f"unexpected token {tok.text!r} in expression")

    def _binder(self) -> ExprNode:
        kw = self.advance()
        kind = _BINDERS[kw.text.upper()]
        self.expect_punct("(")
        groups = self._binding_groups_until(")")
        self.expect_punct(")")
        self.expect_punct(":")
        body = self._expr()
        return ExprNode(
            kind,
            children=[body],
            bindings=groups,
            span=(kw.start, body.span[1]),
        )


def parse_theory(text: str) -> ParseResult:
    return _Parser(text).parse()
