"""Exact polynomial arithmetic in the symbols d, x1, x2, ... over the rationals.

A monomial is packed into a single integer: variable ``i`` owns the bit field
``[8*i, 8*i + 8)``.  Variable 0 is ``d`` (the translation operator), variable
``i >= 1`` is the spectral parameter ``x_i``.  Module elements reuse the same
packing with the generator index stored above bit ``GEN_SHIFT``, so a vector
with polynomial coefficients is just another ``dict[int, coefficient]``.
Multiplying monomials is integer addition; overflow of an exponent field is
detected through the top bit of each field and raised, never wrapped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Union

__all__ = [
    "Scalar",
    "DegreeOverflow",
    "CyclicSubstitution",
    "Poly",
    "D",
    "x",
    "MAX_VARS",
    "MAX_EXPONENT",
    "GEN_SHIFT",
    "MONO_MASK",
    "pack",
    "unpack",
    "Unshuffle",
    "unshuffles",
    "permutation_sign",
    "to_scalar",
]

Scalar = Union[int, Fraction]
Terms = Dict[int, Scalar]

EXP_BITS = 8
MAX_VARS = 16
GEN_SHIFT = EXP_BITS * MAX_VARS
MONO_MASK = (1 << GEN_SHIFT) - 1
MAX_EXPONENT = (1 << (EXP_BITS - 1)) - 1
_FIELD = (1 << EXP_BITS) - 1
_OVERFLOW = sum(1 << (EXP_BITS * i + EXP_BITS - 1) for i in range(MAX_VARS))

# Optional resource guard on total degree, set from the environment by the CLI.
degree_limit: int | None = None


class DegreeOverflow(ArithmeticError):
    """An exponent or total degree exceeded the supported range."""


class CyclicSubstitution(ValueError):
    """A substitution v -> r where r itself contains v."""


def to_scalar(value) -> Scalar:
    """Coerce ints and exact rationals; floats are rejected."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def pack(exps: Iterable[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_EXPONENT:
            raise DegreeOverflow(f"exponent {e} exceeds {MAX_EXPONENT}")
        if i >= MAX_VARS and e:
            raise DegreeOverflow("too many variables")
        key |= e << (EXP_BITS * i)
    return key


def unpack(mono: int) -> tuple[int, ...]:
    mono &= MONO_MASK
    out = []
    while mono:
        out.append(mono & _FIELD)
        mono >>= EXP_BITS
    return tuple(out)


def mono_degree(mono: int) -> int:
    return sum(unpack(mono))


def var_exponent(mono: int, i: int) -> int:
    return (mono >> (EXP_BITS * i)) & _FIELD


# ---------------------------------------------------------------------------
# raw dictionary operations, shared by polynomials and module values
# ---------------------------------------------------------------------------

def r_add(a: Terms, b: Terms, scale: Scalar = 1) -> Terms:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + (c if scale == 1 else c * scale)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def r_iadd(acc: Terms, b: Terms, scale: Scalar = 1) -> None:
    for k, c in b.items():
        v = acc.get(k, 0) + (c if scale == 1 else c * scale)
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)


def r_scale(a: Terms, c: Scalar) -> Terms:
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: v * c for k, v in a.items()}


def r_mul(a: Terms, b: Terms) -> Terms:
    if len(b) == 1 and 0 in b:
        return r_scale(a, b[0])
    out: Terms = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            if k & _OVERFLOW:
                raise DegreeOverflow(f"exponent exceeds {MAX_EXPONENT}")
            out[k] = get(k, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _power(base: Terms, e: int, cache: dict, tag) -> Terms:
    key = (tag, e)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if e == 1:
        res = base
    else:
        half = _power(base, e // 2, cache, tag)
        res = r_mul(half, half)
        if e % 2:
            res = r_mul(res, base)
    cache[key] = res
    return res


def r_compose(terms: Terms, images: Mapping[int, Terms]) -> Terms:
    """Simultaneously replace variable ``i`` by ``images[i]`` (generator bits kept)."""
    if not images:
        return dict(terms)
    subst = sorted(images)
    sub_mask = 0
    for i in subst:
        sub_mask |= _FIELD << (EXP_BITS * i)
    powers: dict = {}
    products: dict = {}
    out: Terms = {}
    get = out.get
    for key, c in terms.items():
        part = key & sub_mask
        keep = key - part
        prod = products.get(part)
        if prod is None:
            prod = {0: 1}
            for i in subst:
                e = (part >> (EXP_BITS * i)) & _FIELD
                if e:
                    prod = r_mul(prod, _power(images[i], e, powers, i))
            products[part] = prod
        for k2, c2 in prod.items():
            k = keep + k2
            if k & _OVERFLOW:
                raise DegreeOverflow(f"exponent exceeds {MAX_EXPONENT}")
            out[k] = get(k, 0) + c * c2
    return {k: v for k, v in out.items() if v}


def r_max_degree(terms: Terms) -> int:
    return max((mono_degree(k) for k in terms), default=0)


def check_degree(terms: Terms) -> None:
    if degree_limit is not None and terms:
        deg = r_max_degree(terms)
        if deg > degree_limit:
            raise DegreeOverflow(f"degree {deg} exceeds limit {degree_limit}")


def r_var(i: int, e: int = 1) -> Terms:
    return {pack([0] * i + [e]): 1}


def r_linear(coeffs: Mapping[int, Scalar]) -> Terms:
    """Linear form sum(c_i * var_i)."""
    return {pack([0] * i + [1]): c for i, c in coeffs.items() if c}


# ---------------------------------------------------------------------------
# public polynomial type
# ---------------------------------------------------------------------------

def _fmt_scalar(c: Scalar) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(int(c))


def _var_name(i: int) -> str:
    return "d" if i == 0 else f"x{i}"


def _mono_str(mono: int) -> str:
    exps = unpack(mono)
    # d first, then spectral variables by index
    order = ([0] if exps and exps[0] else []) + [i for i in range(1, len(exps)) if exps[i]]
    parts = []
    for i in order:
        e = exps[i]
        parts.append(_var_name(i) if e == 1 else f"{_var_name(i)}^{e}")
    return "*".join(parts)


def mono_sort_key(mono: int):
    """Deg-lex key with x1 < x2 < ... < d; larger keys print first."""
    exps = unpack(mono & MONO_MASK)
    padded = list(exps) + [0] * (MAX_VARS - len(exps))
    return (sum(exps), padded[0], tuple(reversed(padded[1:])))


def render_terms(terms: Terms) -> str:
    if not terms:
        return "0"
    out = []
    for mono in sorted(terms, key=mono_sort_key, reverse=True):
        c = terms[mono]
        neg = c < 0
        a = -c if neg else c
        ms = _mono_str(mono)
        if not ms:
            body = _fmt_scalar(a)
        elif a == 1:
            body = ms
        else:
            body = f"{_fmt_scalar(a)}*{ms}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


class Poly:
    """Multivariate polynomial in d, x1, x2, ... with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        self.terms: Terms = {}
        if terms:
            for k, c in terms.items():
                if k >> GEN_SHIFT:
                    raise ValueError("polynomial monomial carries generator bits")
                c = to_scalar(c)
                if c:
                    self.terms[k] = c

    @classmethod
    def _raw(cls, terms: Terms) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({0: c})

    @classmethod
    def var(cls, i: int) -> "Poly":
        if not 0 <= i < MAX_VARS:
            raise DegreeOverflow(f"variable index {i} out of range")
        return cls._raw(r_var(i))

    @classmethod
    def from_exponents(cls, entries: Mapping[tuple, Scalar]) -> "Poly":
        return cls({pack(e): c for e, c in entries.items()})

    @classmethod
    def parse(cls, text: str) -> "Poly":
        from .dsl.parser import parse_poly

        return parse_poly(text)

    # arithmetic -----------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        return Poly.const(to_scalar(other))

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Poly._raw(r_add(self.terms, o.terms))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(r_scale(self.terms, -1))

    def __sub__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return Poly._raw(r_add(self.terms, o.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Poly._raw(r_mul(self.terms, other.terms))
        try:
            c = to_scalar(other)
        except TypeError:
            return NotImplemented
        return Poly._raw(r_scale(self.terms, c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = Poly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        try:
            return self.terms == Poly.const(to_scalar(other)).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    # structure ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return r_max_degree(self.terms) if self.terms else -1

    def degree_in(self, i: int) -> int:
        return max((var_exponent(k, i) for k in self.terms), default=-1)

    def variables(self) -> set[int]:
        found = set()
        for k in self.terms:
            for i, e in enumerate(unpack(k)):
                if e:
                    found.add(i)
        return found

    def coefficient(self, exps: tuple) -> Scalar:
        return self.terms.get(pack(exps), 0)

    def substitute(self, v: int, r: "Poly") -> "Poly":
        r = self._coerce(r)
        if v in r.variables():
            raise CyclicSubstitution(f"{_var_name(v)} occurs in its replacement {r}")
        return Poly._raw(r_compose(self.terms, {v: r.terms}))

    def compose(self, mapping: Mapping[int, "Poly"]) -> "Poly":
        """Simultaneous substitution; replacements may mention any variable."""
        return Poly._raw(r_compose(self.terms, {i: self._coerce(p).terms for i, p in mapping.items()}))

    def __str__(self):
        return render_terms(self.terms)

    def __repr__(self):
        return f"Poly({self})"


D = Poly.var(0)


def x(i: int) -> Poly:
    """The spectral variable x_i (i >= 1)."""
    if i < 1:
        raise ValueError("spectral variables start at 1")
    return Poly.var(i)


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

def permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    base = min(perm) if perm else 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - base
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Unshuffle:
    """A permutation of 1..i+j increasing on the first i and last j places."""

    sigma: tuple
    split: int
    sign: int


def unshuffles(i: int, j: int) -> list[Unshuffle]:
    n = i + j
    out = []
    for head in itertools.combinations(range(1, n + 1), i):
        tail = tuple(k for k in range(1, n + 1) if k not in head)
        sigma = head + tail
        out.append(Unshuffle(sigma, i, permutation_sign(sigma)))
    return out
