"""Free C[d]-modules, sesquilinear maps, Lie conformal algebras and their modules.

Every multi-argument operation in the package (brackets, actions, cochains,
the NS-Lie products) is a :class:`Cochain`: a table of values on generator
tuples, extended to arbitrary arguments by conformal sesquilinearity.  With
parameters ``L_1 .. L_{k-1}`` for the first ``k-1`` slots,

* ``d`` applied to the argument in slot ``i < k`` becomes ``-L_i``;
* ``d`` applied to the last argument becomes ``d + L_1 + ... + L_{k-1}``.

Values are polynomials in (d, x1, x2, ...) times generators; because ``d``
is central in that representation, evaluating at a parameter that itself
contains ``d`` (say ``-x1 - d``) is plain simultaneous substitution.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from .kernel import (
    GEN_SHIFT,
    MONO_MASK,
    Poly,
    Terms,
    check_degree,
    r_add,
    r_compose,
    r_iadd,
    r_mul,
    r_scale,
    r_var,
    render_terms,
    to_scalar,
)
from .report import AxiomReport

__all__ = [
    "ModuleMismatch",
    "InvalidRepresentation",
    "DualizationFailure",
    "FreeModule",
    "Value",
    "Cochain",
    "ModuleMap",
    "LieConformalAlgebra",
    "Representation",
    "eval_bracket",
    "check_lie_conformal_axioms",
    "check_module",
    "semidirect_product",
    "twisted_semidirect_product",
    "conformal_dual",
    "dual_pairing",
    "check_dual_pairing",
    "apply_map",
    "adjoint",
    "dagger",
]


class ModuleMismatch(TypeError):
    """An element or map was used with the wrong module."""


class InvalidRepresentation(ValueError):
    """A representation failed the module axiom."""


class DualizationFailure(RuntimeError):
    """The dual action does not reproduce the pairing identity."""


D_RAW: Terms = r_var(0)


def lam(i: int) -> Terms:
    return r_var(i)


def dagger(n: int) -> Terms:
    """-x1 - ... - x_n - d as a raw polynomial."""
    out = {k: -1 for k in (next(iter(r_var(i))) for i in range(1, n + 1))}
    out[next(iter(D_RAW))] = -1
    return out


def split_gens(terms: Terms) -> dict:
    """Split a raw value into {generator index: raw coefficient polynomial}."""
    out: dict = {}
    for k, c in terms.items():
        out.setdefault(k >> GEN_SHIFT, {})[k & MONO_MASK] = c
    return out


def gen_raw(i: int) -> Terms:
    return {i << GEN_SHIFT: 1}


def shift_gens(terms: Terms, offset: int) -> Terms:
    if not offset:
        return dict(terms)
    s = offset << GEN_SHIFT
    return {k + s: c for k, c in terms.items()}


# ---------------------------------------------------------------------------
# modules and their elements
# ---------------------------------------------------------------------------

class FreeModule:
    """A finitely generated free C[d]-module with named generators."""

    def __init__(self, name: str, generators: Sequence[str], blocks: tuple = ()):
        generators = tuple(generators)
        if not generators:
            raise ValueError(f"module {name} needs at least one generator")
        if len(set(generators)) != len(generators):
            raise ValueError(f"duplicate generator names in {name}")
        self.name = name
        self.generators = generators
        self._index = {g: i for i, g in enumerate(generators)}
        # for direct sums: ((summand, offset), ...)
        self.blocks = blocks

    @property
    def rank(self) -> int:
        return len(self.generators)

    def index(self, g) -> int:
        if isinstance(g, int):
            if not 0 <= g < self.rank:
                raise ModuleMismatch(f"generator index {g} out of range for {self.name}")
            return g
        try:
            return self._index[g]
        except KeyError:
            raise ModuleMismatch(f"{g!r} is not a generator of {self.name}") from None

    def gen(self, g, power: int = 0) -> "Value":
        return Value(self, r_mul(gen_raw(self.index(g)), r_var(0, power)) if power else gen_raw(self.index(g)))

    def gens(self) -> list:
        return [self.gen(i) for i in range(self.rank)]

    def zero(self) -> "Value":
        return Value(self, {})

    def element(self, text: str) -> "Value":
        from .dsl.parser import parse_value

        return parse_value(text, self)

    def __eq__(self, other):
        return isinstance(other, FreeModule) and self.name == other.name and self.generators == other.generators

    def __hash__(self):
        return hash((self.name, self.generators))

    def __repr__(self):
        return f"FreeModule({self.name!r}, {list(self.generators)})"

    @classmethod
    def direct_sum(cls, first: "FreeModule", second: "FreeModule", name: str | None = None) -> "FreeModule":
        if first.name == second.name:
            raise ModuleMismatch(f"summands of a direct sum need distinct names (both are {first.name})")
        gens = [f"{first.name}::{g}" for g in first.generators] + [f"{second.name}::{g}" for g in second.generators]
        return cls(name or f"{first.name}+{second.name}", gens, ((first, 0), (second, first.rank)))

    @classmethod
    def split(cls, module: "FreeModule", first: Sequence, names=("A1", "A2")) -> tuple:
        """View ``module`` as a sum of the spans of ``first`` and the remaining generators.

        Returns (sum module, permutation old index -> new index, A1, A2)."""
        idx1 = [module.index(g) for g in first]
        idx2 = [i for i in range(module.rank) if i not in idx1]
        if not idx1 or not idx2:
            raise ValueError("both summands need at least one generator")
        a1 = cls(names[0], [module.generators[i] for i in idx1])
        a2 = cls(names[1], [module.generators[i] for i in idx2])
        total = cls.direct_sum(a1, a2, module.name)
        perm = {old: new for new, old in enumerate(idx1 + idx2)}
        return total, perm, a1, a2

    def embed(self, value: "Value", block: int) -> "Value":
        summand, offset = self.blocks[block]
        _check(value, summand)
        return Value(self, shift_gens(value.terms, offset))

    def project(self, value: "Value", block: int) -> "Value":
        summand, offset = self.blocks[block]
        _check(value, self)
        lo, hi = offset, offset + summand.rank
        s = offset << GEN_SHIFT
        return Value(summand, {k - s: c for k, c in value.terms.items() if lo <= (k >> GEN_SHIFT) < hi})

    def block_of(self, index: int) -> int:
        for b, (summand, offset) in enumerate(self.blocks):
            if offset <= index < offset + summand.rank:
                return b
        raise ValueError(f"{self.name} is not a direct sum")


def _check(value: "Value", module: FreeModule) -> None:
    if value.module != module:
        raise ModuleMismatch(f"element of {value.module.name} used where {module.name} was expected")


class Value:
    """An element of C[x1,..,x_n] (x) M, i.e. a vector with polynomial coefficients.

    Coefficients are polynomials in d (acting on the module) and the
    spectral variables; an element with no spectral variables is an ordinary
    module element.
    """

    __slots__ = ("module", "terms")

    def __init__(self, module: FreeModule, terms: Terms | None = None):
        self.module = module
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def from_coefficients(cls, module: FreeModule, coeffs: Mapping) -> "Value":
        acc: Terms = {}
        for g, p in coeffs.items():
            p = p if isinstance(p, Poly) else Poly.const(p)
            r_iadd(acc, shift_gens(p.terms, module.index(g)))
        return cls(module, acc)

    def _other(self, other) -> "Value":
        if not isinstance(other, Value):
            raise TypeError("expected a Value")
        _check(other, self.module)
        return other

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        return Value(self.module, r_add(self.terms, self._other(other).terms))

    __radd__ = __add__

    def __sub__(self, other):
        return Value(self.module, r_add(self.terms, self._other(other).terms, -1))

    def __neg__(self):
        return Value(self.module, r_scale(self.terms, -1))

    def __mul__(self, other):
        if isinstance(other, Poly):
            return Value(self.module, r_mul(self.terms, other.terms))
        return Value(self.module, r_scale(self.terms, to_scalar(other)))

    __rmul__ = __mul__

    def d(self, n: int = 1) -> "Value":
        return Value(self.module, r_mul(self.terms, r_var(0, n))) if n else self

    def compose(self, mapping: Mapping[int, Poly]) -> "Value":
        return Value(self.module, r_compose(self.terms, {i: Poly._coerce(p).terms for i, p in mapping.items()}))

    def coefficient(self, g) -> Poly:
        i = self.module.index(g)
        return Poly._raw(split_gens(self.terms).get(i, {}))

    def coefficients(self) -> dict:
        return {self.module.generators[i]: Poly._raw(p) for i, p in sorted(split_gens(self.terms).items())}

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Value):
            return self.module == other.module and self.terms == other.terms
        if isinstance(other, int) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.module, frozenset(self.terms.items())))

    def __str__(self):
        return render_value(self.terms, self.module)

    def __repr__(self):
        return f"Value({self.module.name}: {self})"


def render_value(terms: Terms, module: FreeModule) -> str:
    if not terms:
        return "0"
    parts = []
    for i, p in sorted(split_gens(terms).items()):
        name = module.generators[i]
        if len(p) == 1:
            (mono, c), = p.items()
            body = render_terms({mono: abs(c)})
            neg = c < 0
            text = name if body == "1" else f"{body} {name}"
            if not parts:
                parts.append(("-" if neg else "") + text)
            else:
                parts.append((" - " if neg else " + ") + text)
        else:
            text = f"({render_terms(p)}) {name}"
            parts.append(text if not parts else " + " + text)
    return "".join(parts)


# ---------------------------------------------------------------------------
# sesquilinear maps
# ---------------------------------------------------------------------------

def _as_value(arg, module: FreeModule) -> Terms:
    if isinstance(arg, Value):
        _check(arg, module)
        return arg.terms
    if isinstance(arg, str):
        if arg in module._index:
            return gen_raw(module.index(arg))
        return module.element(arg).terms
    if isinstance(arg, int):
        return gen_raw(module.index(arg))
    raise TypeError(f"cannot use {arg!r} as an element of {module.name}")


class Cochain:
    """A conformal sesquilinear map ``sources[0] x ... x sources[k-1] -> target``.

    ``table`` maps tuples of generator indices to raw values whose
    coefficients are polynomials in d and x1..x_{k-1}.  Missing tuples are
    zero.  Skew-symmetry is not assumed; see ``cochains.validate_cochain``.
    """

    def __init__(self, sources: Sequence[FreeModule], target: FreeModule, table: Mapping | None = None):
        self.sources = tuple(sources)
        self.target = target
        self.table: dict = {}
        for key, val in (table or {}).items():
            key = tuple(key)
            if len(key) != len(self.sources):
                raise ValueError(f"entry {key} has the wrong number of arguments")
            key = tuple(m.index(g) for m, g in zip(self.sources, key))
            if isinstance(val, Value):
                _check(val, target)
                val = val.terms
            elif isinstance(val, str):
                val = target.element(val).terms
            val = {k: c for k, c in val.items() if c}
            if val:
                self.table[key] = val

    @property
    def table(self) -> dict:
        return self._table

    @table.setter
    def table(self, value: dict) -> None:
        self._table = value
        # composed table values keyed by (generator tuple, parameters)
        self._cache: dict = {}

    @property
    def arity(self) -> int:
        return len(self.sources)

    @classmethod
    def on(cls, module: FreeModule, arity: int, target: FreeModule | None = None, table=None) -> "Cochain":
        return cls((module,) * arity, target or module, table)

    def _like(self, table: dict) -> "Cochain":
        out = Cochain.__new__(type(self))
        out.__dict__.update(self.__dict__)
        out.table = {k: v for k, v in table.items() if v}
        return out

    def value(self, key: tuple) -> Terms:
        return self.table.get(key, {})

    def entry(self, *names) -> Value:
        key = tuple(m.index(g) for m, g in zip(self.sources, names))
        return Value(self.target, self.value(key))

    def evaluate(self, params: Sequence[Terms], args: Sequence[Terms]) -> Terms:
        """Raw sesquilinear evaluation; ``params`` has length arity-1."""
        k = self.arity
        if len(args) != k or len(params) != max(k - 1, 0):
            raise ValueError("wrong number of arguments or parameters")
        if k == 0:
            return dict(self.table.get((), {}))
        last = dict(D_RAW)
        for p in params:
            last = r_add(last, p)
        converted = []
        for slot, arg in enumerate(args):
            image = r_scale(params[slot], -1) if slot < k - 1 else last
            parts = []
            for g, coeff in split_gens(arg).items():
                if len(coeff) == 1 and 0 in coeff:
                    parts.append((g, coeff))
                else:
                    parts.append((g, r_compose(coeff, {0: image})))
            if not parts:
                return {}
            converted.append(parts)
        images = {j + 1: params[j] for j in range(k - 1)}
        sig = tuple(tuple(sorted(p.items())) for p in params)
        cache = self._cache
        if len(cache) > 100000:
            cache.clear()
        out: Terms = {}
        for combo in itertools.product(*converted):
            key = tuple(g for g, _ in combo)
            val = self._table.get(key)
            if not val:
                continue
            cv = cache.get((key, sig))
            if cv is None:
                cv = r_compose(val, images) if images else val
                cache[(key, sig)] = cv
            coeff = combo[0][1]
            for _, c in combo[1:]:
                coeff = r_mul(coeff, c)
            r_iadd(out, r_mul(cv, coeff))
        check_degree(out)
        return out

    def __call__(self, *args, lambdas: Sequence | None = None) -> Value:
        k = self.arity
        if lambdas is None:
            params = [lam(i) for i in range(1, k)]
        else:
            params = [Poly._coerce(p).terms for p in lambdas]
        raw = [_as_value(a, m) for m, a in zip(self.sources, args)] if len(args) == k else None
        if raw is None:
            raise ValueError(f"expected {k} arguments, got {len(args)}")
        return Value(self.target, self.evaluate(params, raw))

    # linear structure ------------------------------------------------------
    def _compatible(self, other: "Cochain") -> None:
        if self.sources != other.sources or self.target != other.target:
            raise ModuleMismatch("cochains live in different spaces")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._compatible(other)
        table = dict(self.table)
        for k, v in other.table.items():
            table[k] = r_add(table.get(k, {}), v)
        return self._like(table)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: r_scale(v, -1) for k, v in self.table.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = to_scalar(c)
        return self._like({k: r_scale(v, c) for k, v in self.table.items()})

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.table.values())

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.sources == other.sources and self.target == other.target
                and {k: v for k, v in self.table.items() if v} == {k: v for k, v in other.table.items() if v})

    def __hash__(self):
        return hash((self.sources, self.target, frozenset((k, frozenset(v.items())) for k, v in self.table.items())))

    def max_degree(self) -> int:
        from .kernel import r_max_degree

        return max((r_max_degree(v) for v in self.table.values()), default=0)

    def first_nonzero(self):
        """(generator-name tuple, rendered value) of the first nonzero entry, or None."""
        for key in sorted(self.table):
            v = self.table[key]
            if v:
                names = tuple(m.generators[i] for m, i in zip(self.sources, key))
                return names, render_value(v, self.target)
        return None

    def __str__(self):
        lines = []
        for key in sorted(self.table):
            names = ",".join(m.generators[i] for m, i in zip(self.sources, key))
            lines.append(f"({names}) -> {render_value(self.table[key], self.target)}")
        return "\n".join(lines) if lines else "0"

    def __repr__(self):
        src = "x".join(m.name for m in self.sources) or "1"
        return f"Cochain({src} -> {self.target.name}, {len(self.table)} entries)"


# ---------------------------------------------------------------------------
# module maps
# ---------------------------------------------------------------------------

class ModuleMap(Cochain):
    """A C[d]-linear map, stored as its images of generators."""

    def __init__(self, source: FreeModule, target: FreeModule, images: Mapping | None = None):
        super().__init__((source,), target, {(g,): v for g, v in (images or {}).items()})
        for v in self.table.values():
            for k in v:
                if (k & MONO_MASK) >> 8:
                    raise ValueError("module map images may only involve d")

    @property
    def source(self) -> FreeModule:
        return self.sources[0]

    @classmethod
    def identity(cls, module: FreeModule) -> "ModuleMap":
        return cls(module, module, {g: module.gen(g) for g in module.generators})

    @classmethod
    def zero(cls, source: FreeModule, target: FreeModule) -> "ModuleMap":
        return cls(source, target, {})

    def apply(self, x: Value) -> Value:
        return apply_map(self, x)

    def raw_apply(self, terms: Terms) -> Terms:
        out: Terms = {}
        for g, coeff in split_gens(terms).items():
            val = self.table.get((g,))
            if val:
                r_iadd(out, r_mul(val, coeff))
        return out

    def image(self, g) -> Value:
        return Value(self.target, self.value((self.source.index(g),)))

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """other after self."""
        if other.source != self.target:
            raise ModuleMismatch("maps do not compose")
        out = ModuleMap(self.source, other.target)
        out.table = {k: t for k, v in self.table.items() if (t := other.raw_apply(v))}
        return out

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition self o other."""
        return other.then(self)

    def power(self, n: int) -> "ModuleMap":
        if self.source != self.target:
            raise ModuleMismatch("powers need an endomorphism")
        out = ModuleMap.identity(self.source)
        for _ in range(n):
            out = self @ out
        return out

    def matrix(self) -> list:
        """Rows indexed by target generators, columns by source generators."""
        rows = [[Poly() for _ in range(self.source.rank)] for _ in range(self.target.rank)]
        for (j,), v in self.table.items():
            for i, p in split_gens(v).items():
                rows[i][j] = Poly._raw(p)
        return rows

    @classmethod
    def from_matrix(cls, source: FreeModule, target: FreeModule, rows) -> "ModuleMap":
        images = {}
        for j, g in enumerate(source.generators):
            images[g] = Value.from_coefficients(target, {target.generators[i]: rows[i][j] for i in range(target.rank)})
        return cls(source, target, images)

    def determinant(self) -> Poly:
        return _det(self.matrix())

    def inverse(self) -> "ModuleMap | None":
        """Inverse map when the determinant is a nonzero constant, else None."""
        if self.source.rank != self.target.rank:
            return None
        m = self.matrix()
        det = _det(m)
        if det.degree() != 0:
            return None
        inv_det = to_scalar(1 / Fraction(det.terms[0]))
        n = len(m)
        rows = [[Poly() for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[m[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
                sign = -1 if (i + j) % 2 else 1
                rows[i][j] = _det(minor) * (sign * inv_det)
        return ModuleMap.from_matrix(self.target, self.source, rows)


def _det(m: list) -> Poly:
    n = len(m)
    if n == 0:
        return Poly.const(1)
    if n == 1:
        return m[0][0]
    total = Poly()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def apply_map(H: ModuleMap, x: Value) -> Value:
    _check(x, H.source)
    return Value(H.target, H.raw_apply(x.terms))


# ---------------------------------------------------------------------------
# algebras and representations
# ---------------------------------------------------------------------------

class LieConformalAlgebra:
    """A free C[d]-module with a lambda-bracket given on generators."""

    def __init__(self, module: FreeModule, bracket: Cochain):
        if bracket.sources != (module, module) or bracket.target != module:
            raise ModuleMismatch("bracket must be a binary operation on the module")
        self.module = module
        self.bracket = bracket

    @classmethod
    def from_table(cls, name: str, generators: Sequence[str], entries: Mapping) -> "LieConformalAlgebra":
        module = FreeModule(name, generators)
        return cls(module, Cochain((module, module), module, entries))

    @property
    def name(self) -> str:
        return self.module.name

    def __call__(self, a, b, lambdas=None) -> Value:
        return self.bracket(a, b, lambdas=lambdas)

    def __repr__(self):
        return f"LieConformalAlgebra({self.name}, rank {self.module.rank})"


class Representation:
    """A module over a Lie conformal algebra: action(a, v) = rho(a)_x1 v."""

    def __init__(self, algebra: LieConformalAlgebra, space: FreeModule, action: Cochain):
        if action.sources != (algebra.module, space) or action.target != space:
            raise ModuleMismatch("action must map A x M -> M")
        self.algebra = algebra
        self.space = space
        self.action = action

    @classmethod
    def from_table(cls, algebra: LieConformalAlgebra, name: str, generators: Sequence[str], entries: Mapping):
        space = FreeModule(name, generators)
        return cls(algebra, space, Cochain((algebra.module, space), space, entries))

    def __call__(self, a, v, lambdas=None) -> Value:
        return self.action(a, v, lambdas=lambdas)

    def __repr__(self):
        return f"Representation({self.algebra.name} on {self.space.name})"


def adjoint(algebra: LieConformalAlgebra, name: str | None = None) -> Representation:
    """The adjoint module; with ``name``, on a renamed copy of the algebra's module."""
    if name is None:
        return Representation(algebra, algebra.module, algebra.bracket)
    space = FreeModule(name, algebra.module.generators)
    return Representation(algebra, space, Cochain((algebra.module, space), space, algebra.bracket.table))


def eval_bracket(algebra: LieConformalAlgebra, x, y, lambdas=None) -> Value:
    return algebra.bracket(x, y, lambdas=lambdas)


def _names(modules, key) -> tuple:
    return tuple(m.generators[i] for m, i in zip(modules, key))


def skew_residual(op: Cochain, a: int, b: int) -> Terms:
    """op_x1(a,b) + op_{-x1-d}(b,a) on generators."""
    swapped = r_compose(op.value((b, a)), {1: dagger(1)})
    return r_add(op.value((a, b)), swapped)


def jacobi_residual(op: Cochain, a: int, b: int, c: int) -> Terms:
    """[a_x1 [b_x2 c]] - [[a_x1 b]_{x1+x2} c] - [b_x2 [a_x1 c]]."""
    l1, l2 = lam(1), lam(2)
    ga, gb, gc = gen_raw(a), gen_raw(b), gen_raw(c)
    t1 = op.evaluate([l1], [ga, op.evaluate([l2], [gb, gc])])
    t2 = op.evaluate([r_add(l1, l2)], [op.evaluate([l1], [ga, gb]), gc])
    t3 = op.evaluate([l2], [gb, op.evaluate([l1], [ga, gc])])
    return r_add(r_add(t1, t2, -1), t3, -1)


def check_lie_conformal_axioms(algebra) -> AxiomReport:
    """Skew-symmetry on generator pairs and Jacobi on generator triples."""
    op = algebra.bracket if isinstance(algebra, LieConformalAlgebra) else algebra
    module = op.target
    report = AxiomReport(f"lie conformal axioms for {module.name}")
    n = module.rank
    for a, b in itertools.product(range(n), repeat=2):
        diff = skew_residual(op, a, b)
        report.record("skew-symmetry", render_value(diff, module) if diff else None, _names(op.sources, (a, b)))
    for a, b, c in itertools.product(range(n), repeat=3):
        diff = jacobi_residual(op, a, b, c)
        report.record("jacobi", render_value(diff, module) if diff else None, _names((module,) * 3, (a, b, c)))
    return report


def check_module(rep: Representation) -> AxiomReport:
    """rho(a)_x1 rho(b)_x2 v - rho(b)_x2 rho(a)_x1 v = rho([a_x1 b])_{x1+x2} v."""
    act = rep.action
    br = rep.algebra.bracket
    A, M = rep.algebra.module, rep.space
    report = AxiomReport(f"module axiom for {M.name} over {A.name}")
    l1, l2 = lam(1), lam(2)
    for a, b, v in itertools.product(range(A.rank), range(A.rank), range(M.rank)):
        ga, gb, gv = gen_raw(a), gen_raw(b), gen_raw(v)
        lhs = r_add(act.evaluate([l1], [ga, act.evaluate([l2], [gb, gv])]),
                    act.evaluate([l2], [gb, act.evaluate([l1], [ga, gv])]), -1)
        rhs = act.evaluate([r_add(l1, l2)], [br.evaluate([l1], [ga, gb]), gv])
        diff = r_add(lhs, rhs, -1)
        report.record("module", render_value(diff, M) if diff else None,
                      (A.generators[a], A.generators[b], M.generators[v]))
    return report


def semidirect_table(rep: Representation, phi: Cochain | None = None) -> tuple:
    A, M = rep.algebra.module, rep.space
    total = FreeModule.direct_sum(A, M, f"{A.name}|{M.name}")
    off = A.rank
    table = {}
    br, act = rep.algebra.bracket, rep.action
    for a, b in itertools.product(range(A.rank), repeat=2):
        val = shift_gens(br.value((a, b)), 0)
        if phi is not None:
            val = r_add(val, shift_gens(phi.value((a, b)), off))
        table[(a, b)] = val
    for a, v in itertools.product(range(A.rank), range(M.rank)):
        rv = act.value((a, v))
        table[(a, off + v)] = shift_gens(rv, off)
        table[(off + v, a)] = shift_gens(r_scale(r_compose(rv, {1: dagger(1)}), -1), off)
    return total, table


def semidirect_product(rep: Representation, validate: bool = True) -> LieConformalAlgebra:
    """A x| M with [(a,m)_x (b,n)] = ([a_x b], rho(a)_x n - rho(b)_{-x-d} m)."""
    if validate:
        rep_report = check_module(rep)
        if not rep_report.ok:
            raise InvalidRepresentation(str(rep_report))
    total, table = semidirect_table(rep)
    return LieConformalAlgebra(total, Cochain((total, total), total, table))


def twisted_semidirect_product(rep: Representation, phi: Cochain, validate: bool = True) -> LieConformalAlgebra:
    """Semidirect product with the bracket of two algebra elements shifted by phi."""
    from .cochains import NotACocycle, coboundary, validate_cochain

    if phi.sources != (rep.algebra.module,) * 2 or phi.target != rep.space:
        raise ModuleMismatch("phi must be a 2-cochain on the algebra with values in the module")
    if validate:
        rep_report = check_module(rep)
        if not rep_report.ok:
            raise InvalidRepresentation(str(rep_report))
        validity = validate_cochain(phi)
        if not validity.ok:
            raise NotACocycle(str(validity))
        dphi = coboundary(phi, rep)
        if not dphi.is_zero():
            raise NotACocycle(f"d(phi) is nonzero: {dphi.first_nonzero()}")
    total, table = semidirect_table(rep, phi)
    return LieConformalAlgebra(total, Cochain((total, total), total, table))


# ---------------------------------------------------------------------------
# conformal duals
# ---------------------------------------------------------------------------

def dual_module(M: FreeModule) -> FreeModule:
    return FreeModule(f"{M.name}*", [f"{g}*" for g in M.generators])


def conformal_dual(rep: Representation) -> Representation:
    """The contragredient module on the dual generators g*.

    The pairing is g*_mu(d^k g) = mu^k and (d f)_mu = -mu f_mu, so an element
    p(d) g* pairs as p(-mu).  The defining relation
    (rho*(a)_x f)_mu v = -f_{mu-x}(rho(a)_x v) then gives the coefficient of
    g_j* in rho*(a)_x g_i* as -q(-d-x, x), with q(d, x) the coefficient of g_i
    in rho(a)_x g_j.
    """
    A, M = rep.algebra.module, rep.space
    Mstar = dual_module(M)
    table = {}
    flip = {0: r_add(r_scale(D_RAW, -1), lam(1), -1)}
    for a in range(A.rank):
        for i in range(M.rank):
            acc: Terms = {}
            for j in range(M.rank):
                q = split_gens(rep.action.value((a, j))).get(i)
                if q:
                    r_iadd(acc, shift_gens(r_scale(r_compose(q, flip), -1), j))
            table[(a, i)] = acc
    dual = Representation(rep.algebra, Mstar, Cochain((A, Mstar), Mstar, table))
    report = check_dual_pairing(rep, dual)
    if not report.ok:
        raise DualizationFailure(str(report))
    return dual


def dual_pairing(f: Terms, m: Terms, mu: int) -> Terms:
    """f_mu(m) for f in the dual module and m in the module (matching generator order).

    Both arguments may carry spectral variables; ``mu`` is the index of the
    variable playing the role of mu.  The result is a raw polynomial."""
    fm, mm = split_gens(f), split_gens(m)
    out: Terms = {}
    neg_mu = r_scale(lam(mu), -1)
    for i, p in fm.items():
        q = mm.get(i)
        if q:
            r_iadd(out, r_mul(r_compose(p, {0: neg_mu}), r_compose(q, {0: lam(mu)})))
    return out


def check_dual_pairing(rep: Representation, dual: Representation) -> AxiomReport:
    """(rho*(a)_x1 g_i*)_x2 (g_j) = -g_i*_{x2-x1}(rho(a)_x1 g_j) on all generators."""
    A, M = rep.algebra.module, rep.space
    report = AxiomReport(f"dual pairing for {dual.space.name}")
    shifted = r_add(lam(2), lam(1), -1)
    for a, i, j in itertools.product(range(A.rank), range(M.rank), range(M.rank)):
        lhs = dual_pairing(dual.action.value((a, i)), gen_raw(j), 2)
        q = split_gens(rep.action.value((a, j))).get(i, {})
        rhs = r_scale(r_compose(q, {0: shifted}), -1)
        diff = r_add(lhs, rhs, -1)
        report.record("pairing", render_terms(diff) if diff else None,
                      (A.generators[a], dual.space.generators[i], M.generators[j]))
    return report
