"""Syntax tree for ``.lca`` files.

Source spans are carried for diagnostics but excluded from equality, so a
file and its pretty-printed form parse to equal trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..kernel import Poly


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


# a linear combination: tuple of (coefficient polynomial, generator name)
LinComb = tuple


@dataclass(frozen=True)
class Entry:
    """``op(args) = value`` inside a declaration body."""

    op: str
    args: tuple
    value: LinComb
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class AlgebraDecl:
    name: str
    generators: tuple
    entries: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class SemidirectDecl:
    name: str
    module: str
    twist: str | None
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    algebra: str
    generators: tuple
    entries: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class MapDecl:
    name: str
    source: str
    target: str
    entries: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class CochainDecl:
    name: str
    algebra: str
    arity: int
    target: str
    entries: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class TensorTerm:
    coeff: Poly
    left: tuple  # (Poly in d, generator)
    right: tuple


@dataclass(frozen=True)
class TensorDecl:
    name: str
    algebra: str
    terms: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class ProductsDecl:
    """NS-Lie (``nslie``: circ, vee) or conformal NS (``nsalg``: succ, prec, curly) structures."""

    kind: str
    name: str
    generators: tuple
    entries: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class Directive:
    """A check to run.  ``kind`` is e.g. ``check lie``, ``twist``, ``classify``."""

    kind: str
    args: tuple
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class SourceFile:
    items: tuple

    @property
    def directives(self) -> list:
        return [i for i in self.items if isinstance(i, Directive)]
