"""Recursive-descent parser for the C-like subject language (``.rg`` files).

The grammar is documented in ``docs/grammar.md``. Top-level statements
outside any function are gathered into an implicit ``main`` whose
parameters are the top-level declarations without initializer, so a
snippet like ``int a, b; ... return e;`` parses on its own.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import (
    Assign, AugAssign, BinOp, Block, BoolOp, CallExpr, CallStmt, Compare, Decl,
    DoWhile, Expr, For, FunctionDecl, If, Index, Name, Neg, Not, Num, Param,
    Program, Rand, Return, Stmt, While,
)

TYPES = {"int", "bool", "uint", "void", "unsigned"}
UNSUPPORTED_TYPES = {"float", "double", "char", "long", "short", "struct", "string"}
UNSUPPORTED_KW = {"break", "continue", "switch", "case", "goto", "new", "delete"}
KEYWORDS = TYPES | {"if", "else", "while", "do", "for", "return", "true", "false"}


class ParseError(Exception):
    """Syntax error or unsupported construct, with a source position."""

    def __init__(self, message: str, line: int, col: int, expected: str | None = None):
        self.line = line
        self.col = col
        self.expected = expected
        where = f"line {line}, column {col}"
        text = f"{where}: {message}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class UnsupportedConstruct(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<lcomment>//[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<float>\d+\.\d*|\.\d+)
  | (?P<hex>0[xX][0-9a-fA-F]+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\+\+|--|\+=|-=|\*=|/=|%=|\^=|&=|\|=|<=|>=|==|!=|&&|\|\||[-+*/%^&|<>=!~()\[\]{},;])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "float":
            raise UnsupportedConstruct("floating-point literal", line, col)
        if kind == "num":
            tokens.append(Token("num", chunk, line, col))
        elif kind == "hex":
            tokens.append(Token("num", str(int(chunk, 16)), line, col))
        elif kind in ("ident", "op"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# binary operator precedence, C ordering
_BINARY = [
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.sid = 0

    # -- token helpers -------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "ident")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"unexpected {self.describe(self.tok)}", expected=repr(text))
        return self.advance()

    def expect_ident(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            self.error(f"unexpected {self.describe(t)}", expected="identifier")
        self.advance()
        return t.text

    @staticmethod
    def describe(t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def error(self, msg: str, expected: str | None = None, tok: Token | None = None):
        t = tok or self.tok
        raise ParseError(msg, t.line, t.col, expected)

    def check_supported(self):
        t = self.tok
        if t.kind == "ident" and t.text in UNSUPPORTED_TYPES:
            raise UnsupportedConstruct(f"type {t.text!r} is not supported", t.line, t.col)
        if t.kind == "ident" and t.text in UNSUPPORTED_KW:
            raise UnsupportedConstruct(f"{t.text!r} is not supported", t.line, t.col)

    def next_sid(self) -> int:
        self.sid += 1
        return self.sid

    # -- program -------------------------------------------------------
    def parse_program(self) -> Program:
        functions = []
        top: list[Stmt] = []
        first_top_line = None
        while self.tok.kind != "eof":
            self.check_supported()
            if self.is_type() and self.peek().kind == "ident" and self.peek(2).text == "(":
                functions.append(self.parse_function())
            else:
                if first_top_line is None:
                    first_top_line = self.tok.line
                top.extend(self.parse_stmt())
        if top:
            params = []
            body = []
            for s in top:
                if isinstance(s, Decl) and s.init is None:
                    params.append(Param(s.name, s.type, False, s.is_array))
                else:
                    body.append(s)
            functions.append(FunctionDecl(
                "main", "int", tuple(params),
                Block(stmts=tuple(body), line=first_top_line, sid=0),
                first_top_line,
            ))
        return Program(tuple(functions))

    def is_type(self) -> bool:
        return self.tok.kind == "ident" and self.tok.text in TYPES

    def parse_type(self) -> str:
        t = self.advance().text
        if t == "unsigned":
            if self.at("int"):
                self.advance()
            return "uint"
        return t

    def parse_function(self) -> FunctionDecl:
        line = self.tok.line
        rtype = self.parse_type()
        name = self.expect_ident()
        self.expect("(")
        params = []
        if self.at("void") and self.peek().text == ")":
            self.advance()
        while not self.at(")"):
            self.check_supported()
            if not self.is_type():
                self.error(f"unexpected {self.describe(self.tok)}", expected="parameter type")
            ptype = self.parse_type()
            by_ref = False
            if self.at("&"):
                self.advance()
                by_ref = True
            pname = self.expect_ident()
            is_array = False
            if self.at("["):
                self.advance()
                self.expect("]")
                is_array = True
            params.append(Param(pname, ptype, by_ref, is_array))
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        if self.at(";"):
            # prototype: the definition must appear elsewhere
            self.advance()
            return FunctionDecl(name, rtype, tuple(params), Block(line=line), line)
        body = self.parse_block()
        return FunctionDecl(name, rtype, tuple(params), body, line)

    # -- statements ----------------------------------------------------
    def parse_block(self) -> Block:
        t = self.expect("{")
        sid = self.next_sid()
        stmts: list[Stmt] = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unexpected end of input", expected="'}'")
            stmts.extend(self.parse_stmt())
        self.expect("}")
        return Block(stmts=tuple(stmts), line=t.line, sid=sid)

    def parse_body(self) -> Block:
        """A loop/branch body: a block, or a single statement wrapped in one."""
        if self.at("{"):
            return self.parse_block()
        line = self.tok.line
        sid = self.next_sid()
        return Block(stmts=tuple(self.parse_stmt()), line=line, sid=sid)

    def parse_stmt(self) -> list[Stmt]:
        self.check_supported()
        t = self.tok
        if self.at("{"):
            return [self.parse_block()]
        if self.at(";"):
            self.advance()
            return []
        if self.is_type():
            stmts = self.parse_decl()
            self.expect(";")
            return stmts
        if self.at("if"):
            return [self.parse_if()]
        if self.at("while"):
            sid = self.next_sid()
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_body()
            return [While(cond, body, line=t.line, sid=sid)]
        if self.at("do"):
            sid = self.next_sid()
            self.advance()
            body = self.parse_body()
            self.expect("while")
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return [DoWhile(body, cond, line=t.line, sid=sid)]
        if self.at("for"):
            return [self.parse_for()]
        if self.at("return"):
            sid = self.next_sid()
            self.advance()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return [Return(value, line=t.line, sid=sid)]
        s = self.parse_simple()
        self.expect(";")
        return [s]

    def parse_decl(self) -> list[Stmt]:
        ty = self.parse_type()
        out = []
        while True:
            t = self.tok
            sid = self.next_sid()
            name = self.expect_ident()
            size = None
            is_array = False
            if self.at("["):
                self.advance()
                is_array = True
                if not self.at("]"):
                    size = self.parse_expr()
                self.expect("]")
            init = None
            if self.at("="):
                self.advance()
                init = self.parse_expr()
            out.append(Decl(ty, name, size, init, is_array, line=t.line, sid=sid))
            if not self.at(","):
                return out
            self.advance()

    def parse_if(self) -> If:
        t = self.advance()
        sid = self.next_sid()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_body()
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = self.parse_body()
        return If(cond, then, orelse, line=t.line, sid=sid)

    def parse_for(self) -> For:
        t = self.advance()
        sid = self.next_sid()
        self.expect("(")
        init = None
        if not self.at(";"):
            if self.is_type():
                decls = self.parse_decl()
                if len(decls) != 1:
                    self.error("only one declaration allowed in for-init", tok=t)
                init = decls[0]
            else:
                init = self.parse_simple()
        self.expect(";")
        cond = None if self.at(";") else self.parse_expr()
        self.expect(";")
        step = None if self.at(")") else self.parse_simple()
        self.expect(")")
        body = self.parse_body()
        return For(init, cond, step, body, line=t.line, sid=sid)

    def parse_simple(self) -> Stmt:
        """Assignment, increment/decrement, compound assignment or call."""
        t = self.tok
        sid = self.next_sid()
        if self.at("++") or self.at("--"):
            op = self.advance().text
            target = self.parse_lvalue()
            return AugAssign(target, "+" if op == "++" else "-", Num(1), line=t.line, sid=sid)
        if self.tok.kind == "ident" and self.peek().text == "(" and self.tok.text not in KEYWORDS:
            name = self.advance().text
            args = self.parse_args()
            return CallStmt(name, args, line=t.line, sid=sid)
        target = self.parse_lvalue()
        if self.at("++") or self.at("--"):
            op = self.advance().text
            return AugAssign(target, "+" if op == "++" else "-", Num(1), line=t.line, sid=sid)
        if self.at("="):
            self.advance()
            return Assign(target, self.parse_expr(), line=t.line, sid=sid)
        for aug in ("+=", "-=", "*=", "/=", "%=", "^=", "&=", "|="):
            if self.at(aug):
                self.advance()
                return AugAssign(target, aug[0], self.parse_expr(), line=t.line, sid=sid)
        self.error(f"unexpected {self.describe(self.tok)}", expected="assignment operator")

    def parse_lvalue(self):
        name = self.expect_ident()
        if self.at("["):
            self.advance()
            idx = self.parse_expr()
            self.expect("]")
            return Index(name, idx)
        return Name(name)

    def parse_args(self) -> tuple[Expr, ...]:
        self.expect("(")
        args = []
        while not self.at(")"):
            args.append(self.parse_expr())
            if not self.at(")"):
                self.expect(",")
        self.expect(")")
        return tuple(args)

    # -- expressions ---------------------------------------------------
    def parse_expr(self, level: int = 0) -> Expr:
        if level == len(_BINARY):
            return self.parse_unary()
        left = self.parse_expr(level + 1)
        ops = _BINARY[level]
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance().text
            right = self.parse_expr(level + 1)
            if op in ("&&", "||"):
                left = BoolOp(op, left, right)
            elif op in ("<", "<=", "==", "!=", ">", ">="):
                left = Compare(op, left, right)
            else:
                left = BinOp(op, left, right)
        return left

    def parse_unary(self) -> Expr:
        if self.at("!"):
            self.advance()
            return Not(self.parse_unary())
        if self.at("-"):
            self.advance()
            operand = self.parse_unary()
            if isinstance(operand, Num):
                return Num(-operand.value)
            return Neg(operand)
        if self.at("+"):
            self.advance()
            return self.parse_unary()
        if self.at("~"):
            t = self.tok
            raise UnsupportedConstruct("bitwise complement", t.line, t.col)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        self.check_supported()
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(int(t.text))
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("true") or self.at("false"):
            self.advance()
            return Num(1 if t.text == "true" else 0)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.advance()
            if self.at("("):
                args = self.parse_args()
                if t.text == "rand":
                    if args:
                        self.error("rand() takes no arguments", tok=t)
                    return Rand()
                return CallExpr(t.text, args)
            if self.at("["):
                self.advance()
                idx = self.parse_expr()
                self.expect("]")
                return Index(t.text, idx)
            return Name(t.text)
        self.error(f"unexpected {self.describe(t)}", expected="expression")


def parse(text: str) -> Program:
    """Parse source text into a :class:`Program`."""
    return Parser(text).parse_program()
