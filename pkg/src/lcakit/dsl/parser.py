"""Hand-written lexer and recursive-descent parser for ``.lca`` files.

Coefficient polynomials use ``d`` for the translation operator and ``x1``,
``x2``, ... for spectral variables (``x`` alone means ``x1``).  Numbers are
integers or fractions ``p/q``; decimal points are rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..kernel import Poly
from . import ast

__all__ = [
    "DslError",
    "DslSyntaxError",
    "UndeclaredName",
    "DuplicateName",
    "Token",
    "tokenize",
    "parse",
    "parse_poly",
    "parse_value",
]


class DslError(Exception):
    """Base class for located diagnostics."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class DslSyntaxError(DslError):
    def __init__(self, message: str, line: int, col: int, expected=()):
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message}; expected one of: {', '.join(self.expected)}"
        super().__init__(message, line, col)


class UndeclaredName(DslError):
    pass


class DuplicateName(DslError):
    pass


class Token:
    __slots__ = ("kind", "text", "line", "col", "start", "end")

    def __init__(self, kind, text, line, col, start, end):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.start = start
        self.end = end

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<number>\d+(?:\.\d*)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:::[A-Za-z_][A-Za-z0-9_]*)*)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[{}\[\](),;:=+\-*/^])"
)
_SYM_RE = re.compile(r"d|x\d*")

KEYWORDS = {"algebra", "module", "map", "cochain", "tensor", "nslie", "nsalg", "check", "twist",
            "classify", "cohomology", "generators", "over", "semidirect", "twisted", "by", "as"}


def tokenize(text: str) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "number":
            if "." in lexeme:
                raise DslSyntaxError(f"floating-point literal {lexeme!r} is not allowed; use p/q", line, col)
            tokens.append(Token("number", lexeme, line, col, pos, m.end()))
        elif kind == "ident":
            tk = "sym" if _SYM_RE.fullmatch(lexeme) else ("kw" if lexeme in KEYWORDS else "ident")
            tokens.append(Token(tk, lexeme, line, col, pos, m.end()))
        elif kind in ("arrow", "punct"):
            tokens.append(Token("op", lexeme, line, col, pos, m.end()))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos, pos))
    return tokens


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "eof" else repr(tok.text)


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        # name -> (kind, generators or info)
        self.scope: dict = {}

    # token helpers --------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"unexpected {_describe(self.tok)}", [repr(text)])
        return self.advance()

    def fail(self, message: str, expected=()):
        raise DslSyntaxError(message, self.tok.line, self.tok.col, expected)

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.fail(f"unexpected {_describe(self.tok)}", [what])
        return self.advance()

    def word(self) -> str:
        """An identifier or keyword, gluing adjacent hyphenated parts (``twisted-rb``)."""
        t = self.tok
        if t.kind not in ("ident", "kw"):
            self.fail(f"unexpected {_describe(t)}", ["word"])
        self.advance()
        text = t.text
        while (self.at("-") and self.tok.start == self.tokens[self.i - 1].end
               and self.peek().kind in ("ident", "kw") and self.peek().start == self.tok.end):
            self.advance()
            text += "-" + self.advance().text
        return text

    def span(self, t: Token | None = None) -> ast.Span:
        t = t or self.tok
        return ast.Span(t.line, t.col)

    # scope ----------------------------------------------------------------
    def declare(self, tok: Token, kind: str, info):
        if tok.text in self.scope:
            raise DuplicateName(f"{tok.text!r} is already declared", tok.line, tok.col)
        self.scope[tok.text] = (kind, info)

    def lookup(self, tok: Token, kinds=None):
        entry = self.scope.get(tok.text)
        if entry is None or (kinds and entry[0] not in kinds):
            what = "/".join(kinds) if kinds else "name"
            raise UndeclaredName(f"undeclared {what} {tok.text!r}", tok.line, tok.col)
        return entry

    def generators_of(self, name: str) -> tuple:
        return self.scope[name][1]

    def member(self, tok: Token, gens: tuple, where: str):
        if tok.text not in gens:
            raise UndeclaredName(f"{tok.text!r} is not a generator of {where}", tok.line, tok.col)

    # polynomials ----------------------------------------------------------
    def number(self) -> Fraction:
        t = self.tok
        if t.kind != "number":
            self.fail(f"unexpected {_describe(t)}", ["number"])
        self.advance()
        value = Fraction(int(t.text))
        if self.at("/") and self.peek().kind == "number":
            self.advance()
            den = int(self.advance().text)
            if den == 0:
                raise DslSyntaxError("zero denominator", t.line, t.col)
            value /= den
        return value

    def _starts_factor(self) -> bool:
        return self.tok.kind in ("number", "sym") or self.at("(")

    def factor(self) -> Poly:
        t = self.tok
        if t.kind == "number":
            base = Poly.const(self.number())
        elif t.kind == "sym":
            self.advance()
            idx = 0 if t.text == "d" else int(t.text[1:] or 1)
            if idx >= 16:
                raise DslSyntaxError(f"variable {t.text} out of range", t.line, t.col)
            if t.text.startswith("x") and idx < 1:
                raise DslSyntaxError("spectral variables start at x1", t.line, t.col)
            base = Poly.var(idx)
        elif self.at("("):
            self.advance()
            base = self.poly()
            self.expect(")")
        else:
            self.fail(f"unexpected {_describe(t)}", ["number", "d", "x1", "'('"])
        if self.at("^"):
            self.advance()
            e = self.tok
            if e.kind != "number" or not e.text.isdigit():
                self.fail(f"unexpected {_describe(e)}", ["exponent"])
            self.advance()
            base = base ** int(e.text)
        return base

    def pterm(self) -> Poly:
        out = self.factor()
        while True:
            if self.at("*"):
                self.advance()
                out = out * self.factor()
            elif self._starts_factor():
                out = out * self.factor()
            else:
                return out

    def poly(self) -> Poly:
        sign = 1
        if self.at("-") or self.at("+"):
            sign = -1 if self.advance().text == "-" else 1
        out = self.pterm() * sign
        while self.at("+") or self.at("-"):
            sign = -1 if self.advance().text == "-" else 1
            out = out + self.pterm() * sign
        return out

    # linear combinations ----------------------------------------------------
    def vterm(self, sign: int, gens, where) -> tuple:
        coeff = Poly.const(sign)
        first = True
        while self._starts_factor():
            coeff = coeff * self.factor()
            first = False
            if self.at("*"):
                self.advance()
        if self.tok.kind != "ident":
            expected = ["generator"] if first else ["generator", "'*'"]
            self.fail(f"unexpected {_describe(self.tok)}", expected)
        g = self.advance()
        if gens is not None:
            self.member(g, gens, where)
        return (coeff, g.text)

    def lincomb(self, gens=None, where: str = "") -> tuple:
        if self.tok.kind == "number" and self.tok.text == "0" and self.peek().kind not in ("ident", "sym") \
                and not self.peek().text in ("(", "*", "/", "^"):
            self.advance()
            return ()
        sign = 1
        if self.at("-") or self.at("+"):
            sign = -1 if self.advance().text == "-" else 1
        terms = [self.vterm(sign, gens, where)]
        while self.at("+") or self.at("-"):
            sign = -1 if self.advance().text == "-" else 1
            terms.append(self.vterm(sign, gens, where))
        return tuple(terms)

    # declarations ---------------------------------------------------------
    def parse_file(self) -> ast.SourceFile:
        items = []
        while self.tok.kind != "eof":
            items.append(self.item())
        return ast.SourceFile(tuple(items))

    def item(self):
        t = self.tok
        dispatch = {
            "algebra": self.algebra,
            "module": self.module,
            "map": self.map_decl,
            "cochain": self.cochain,
            "tensor": self.tensor,
            "nslie": self.products,
            "nsalg": self.products,
            "check": self.check,
            "twist": self.twist,
            "classify": self.classify,
            "cohomology": self.cohomology,
        }
        if t.kind == "kw" and t.text in dispatch:
            return dispatch[t.text]()
        self.fail(f"unexpected {_describe(t)}", sorted(repr(k) for k in dispatch))

    def generator_list(self) -> tuple:
        self.expect("generators")
        self.expect(":")
        seen = []
        while True:
            g = self.ident("generator")
            if g.text in seen:
                raise DuplicateName(f"generator {g.text!r} declared twice", g.line, g.col)
            seen.append(g.text)
            if self.at(","):
                self.advance()
                continue
            break
        self.expect(";")
        return tuple(seen)

    def args(self, domains: list) -> tuple:
        self.expect("(")
        out = []
        for k, (gens, where) in enumerate(domains):
            if k:
                self.expect(",")
            g = self.ident("generator")
            self.member(g, gens, where)
            out.append(g.text)
        self.expect(")")
        return tuple(out)

    def algebra(self):
        start = self.advance()
        name = self.ident("algebra name")
        if self.at("="):
            self.advance()
            self.expect("semidirect")
            mod = self.ident("module name")
            kind, info = self.lookup(mod, ["module"])
            alg = info["algebra"]
            twist = None
            if self.at("twisted"):
                self.advance()
                tw = self.ident("cochain name")
                self.lookup(tw, ["cochain"])
                twist = tw.text
            self.expect(";")
            gens = tuple(f"{alg}::{g}" for g in self.generators_of(alg)) + \
                tuple(f"{mod.text}::{g}" for g in info["generators"])
            self.declare(name, "algebra", gens)
            return ast.SemidirectDecl(name.text, mod.text, twist, self.span(start))
        self.expect("{")
        gens = self.generator_list()
        self.declare(name, "algebra", gens)
        entries = []
        while self.at("["):
            t = self.advance()
            a = self.ident("generator")
            self.member(a, gens, name.text)
            self.expect(",")
            b = self.ident("generator")
            self.member(b, gens, name.text)
            self.expect("]")
            self.expect("=")
            value = self.lincomb(gens, name.text)
            self.expect(";")
            entries.append(ast.Entry("bracket", (a.text, b.text), value, self.span(t)))
        if not self.at("}"):
            self.fail(f"unexpected {_describe(self.tok)}", ["'['", "'}'"])
        self.advance()
        return ast.AlgebraDecl(name.text, gens, tuple(entries), self.span(start))

    def module(self):
        start = self.advance()
        name = self.ident("module name")
        self.expect("over")
        alg = self.ident("algebra name")
        self.lookup(alg, ["algebra"])
        self.expect("{")
        gens = self.generator_list()
        self.declare(name, "module", {"algebra": alg.text, "generators": gens})
        agens = self.generators_of(alg.text)
        entries = []
        while self.tok.kind == "ident" and self.tok.text == "rho":
            t = self.advance()
            args = self.args([(agens, alg.text), (gens, name.text)])
            self.expect("=")
            value = self.lincomb(gens, name.text)
            self.expect(";")
            entries.append(ast.Entry("rho", args, value, self.span(t)))
        if not self.at("}"):
            self.fail(f"unexpected {_describe(self.tok)}", ["'rho'", "'}'"])
        self.advance()
        return ast.ModuleDecl(name.text, alg.text, gens, tuple(entries), self.span(start))

    def space_generators(self, tok: Token) -> tuple:
        kind, info = self.lookup(tok, ["algebra", "module"])
        return info if kind == "algebra" else info["generators"]

    def map_decl(self):
        start = self.advance()
        name = self.ident("map name")
        self.expect(":")
        src = self.ident("source")
        sgens = self.space_generators(src)
        self.expect("->")
        tgt = self.ident("target")
        tgens = self.space_generators(tgt)
        self.declare(name, "map", {"source": src.text, "target": tgt.text})
        self.expect("{")
        entries = []
        while self.tok.kind == "ident" and self.tok.text == name.text:
            t = self.advance()
            args = self.args([(sgens, src.text)])
            self.expect("=")
            value = self.lincomb(tgens, tgt.text)
            self.expect(";")
            entries.append(ast.Entry(name.text, args, value, self.span(t)))
        if not self.at("}"):
            self.fail(f"unexpected {_describe(self.tok)}", [repr(name.text), "'}'"])
        self.advance()
        return ast.MapDecl(name.text, src.text, tgt.text, tuple(entries), self.span(start))

    def cochain(self):
        start = self.advance()
        name = self.ident("cochain name")
        self.expect(":")
        alg = self.ident("algebra name")
        self.lookup(alg, ["algebra"])
        agens = self.generators_of(alg.text)
        self.expect("^")
        k = self.tok
        if k.kind != "number" or not k.text.isdigit() or int(k.text) < 1:
            self.fail(f"unexpected {_describe(k)}", ["arity"])
        self.advance()
        arity = int(k.text)
        self.expect("->")
        tgt = self.ident("target")
        tgens = self.space_generators(tgt)
        self.declare(name, "cochain", {"algebra": alg.text, "target": tgt.text, "arity": arity})
        self.expect("{")
        entries = []
        while self.tok.kind == "ident" and self.tok.text == name.text:
            t = self.advance()
            self.expect("(")
            args = []
            while True:
                g = self.ident("generator")
                self.member(g, agens, alg.text)
                args.append(g.text)
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect(")")
            self.expect("=")
            value = self.lincomb(tgens, tgt.text)
            self.expect(";")
            entries.append(ast.Entry(name.text, tuple(args), value, self.span(t)))
        if not self.at("}"):
            self.fail(f"unexpected {_describe(self.tok)}", [repr(name.text), "'}'"])
        self.advance()
        return ast.CochainDecl(name.text, alg.text, arity, tgt.text, tuple(entries), self.span(start))

    def tensor(self):
        start = self.advance()
        name = self.ident("tensor name")
        self.expect("over")
        alg = self.ident("algebra name")
        self.lookup(alg, ["algebra"])
        agens = self.generators_of(alg.text)
        self.declare(name, "tensor", {"algebra": alg.text})
        self.expect("{")
        terms = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.fail("unexpected end of input", ["'}'"])
            coeff = self.poly()
            self.expect(":")
            left = self.vterm(1, agens, alg.text)
            self.expect(",")
            right = self.vterm(1, agens, alg.text)
            self.expect(";")
            terms.append(ast.TensorTerm(coeff, left, right))
        self.advance()
        return ast.TensorDecl(name.text, alg.text, tuple(terms), self.span(start))

    def products(self):
        start = self.advance()
        kind = start.text
        ops = ("circ", "vee") if kind == "nslie" else ("succ", "prec", "curly")
        name = self.ident("structure name")
        self.expect("{")
        gens = self.generator_list()
        self.declare(name, kind, gens)
        entries = []
        while self.tok.kind == "ident" and self.tok.text in ops:
            t = self.advance()
            args = self.args([(gens, name.text), (gens, name.text)])
            self.expect("=")
            value = self.lincomb(gens, name.text)
            self.expect(";")
            entries.append(ast.Entry(t.text, args, value, self.span(t)))
        if not self.at("}"):
            self.fail(f"unexpected {_describe(self.tok)}", [repr(o) for o in ops] + ["'}'"])
        self.advance()
        return ast.ProductsDecl(kind, name.text, gens, tuple(entries), self.span(start))

    # directives -----------------------------------------------------------
    CHECK_KINDS = {
        "lie": ["algebra"],
        "module": ["module"],
        "rb": ["map"],
        "twisted-rb": ["map", "cochain"],
        "nijenhuis": ["map"],
        "reynolds": ["map"],
        "ccybe": ["tensor"],
        "nslie": ["nslie"],
        "conformal-ns": ["nsalg"],
        "cocycle": ["cochain"],
    }

    def check(self):
        start = self.advance()
        kt = self.tok
        kind = self.word()
        if kind not in self.CHECK_KINDS:
            raise DslSyntaxError(f"unknown check {kind!r}", kt.line, kt.col, [repr(k) for k in self.CHECK_KINDS])
        args = []
        for want in self.CHECK_KINDS[kind]:
            t = self.ident(want)
            self.lookup(t, [want])
            args.append(t.text)
        self.expect(";")
        return ast.Directive(f"check {kind}", tuple(args), self.span(start))

    def twist(self):
        start = self.advance()
        alg = self.ident("algebra name")
        self.lookup(alg, ["algebra"])
        self.expect("by")
        h = self.ident("map name")
        self.lookup(h, ["map"])
        self.expect(";")
        return ast.Directive("twist", (alg.text, h.text), self.span(start))

    def part(self, gens: tuple, where: str):
        if self.at("{"):
            self.advance()
            out = []
            while True:
                g = self.ident("generator")
                self.member(g, gens, where)
                out.append(g.text)
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect("}")
            return tuple(out)
        t = self.ident("summand")
        self.lookup(t, ["algebra", "module"])
        return t.text

    def classify(self):
        start = self.advance()
        alg = self.ident("algebra name")
        self.lookup(alg, ["algebra"])
        gens = self.generators_of(alg.text)
        self.expect("as")
        first = self.part(gens, alg.text)
        self.expect("+")
        second = self.part(gens, alg.text)
        self.expect(";")
        return ast.Directive("classify", (alg.text, first, second), self.span(start))

    def cohomology(self):
        start = self.advance()
        t = self.ident("map name")
        self.lookup(t, ["map"])
        args = [t.text]
        if self.tok.kind == "ident" and not (self.tok.text == "max" and self.peek().text == "-"):
            phi = self.advance()
            self.lookup(phi, ["cochain"])
            args.append(phi.text)
        kt = self.tok
        if self.word() != "max-arity":
            raise DslSyntaxError("unexpected token", kt.line, kt.col, ["'max-arity'"])
        n = self.tok
        if n.kind != "number" or not n.text.isdigit():
            self.fail(f"unexpected {_describe(n)}", ["number"])
        self.advance()
        self.expect(";")
        return ast.Directive("cohomology", (tuple(args), int(n.text)), self.span(start))


def parse(text: str) -> ast.SourceFile:
    return Parser(text).parse_file()


def parse_poly(text: str) -> Poly:
    p = Parser(text)
    out = p.poly()
    if p.tok.kind != "eof":
        p.fail(f"unexpected {_describe(p.tok)}", ["end of input"])
    return out


def parse_lincomb(text: str, generators=None) -> tuple:
    p = Parser(text)
    out = p.lincomb(tuple(generators) if generators is not None else None, "value")
    if p.tok.kind != "eof":
        p.fail(f"unexpected {_describe(p.tok)}", ["end of input"])
    return out


def parse_value(text: str, module):
    """Parse a linear combination such as ``(d + 2*x1) L - 3 W`` in ``module``."""
    from ..conformal import Value

    terms = parse_lincomb(text, module.generators)
    out = module.zero()
    for coeff, g in terms:
        out = out + Value.from_coefficients(module, {g: coeff})
    return out
