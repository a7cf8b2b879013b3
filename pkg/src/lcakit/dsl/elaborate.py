"""Turn a parsed ``.lca`` file into engine objects.

Elaboration only builds objects; whether an algebra satisfies its axioms is
decided by the check directives, so an invalid structure becomes a failing
report entry rather than an error here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..conformal import (
    Cochain,
    FreeModule,
    LieConformalAlgebra,
    ModuleMap,
    Representation,
    Value,
    twisted_semidirect_product,
    semidirect_table,
)
from ..nslie import ConformalNSStructure, NSLieStructure
from ..operators import TensorSquare
from . import ast
from .parser import DslError

__all__ = ["ElaborationError", "ArityMismatch", "NonPolynomialCoefficient", "Environment", "Semidirect", "elaborate"]


class ElaborationError(DslError):
    pass


class ArityMismatch(ElaborationError):
    pass


class NonPolynomialCoefficient(ElaborationError):
    pass


@dataclass
class Semidirect:
    """A declared (twisted) semidirect product and the data it was built from."""

    algebra: LieConformalAlgebra
    rep: Representation
    phi: Cochain | None


@dataclass
class Environment:
    algebras: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    semidirects: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    cochains: dict = field(default_factory=dict)
    tensors: dict = field(default_factory=dict)
    nslie: dict = field(default_factory=dict)
    nsalg: dict = field(default_factory=dict)
    directives: list = field(default_factory=list)

    def space(self, name: str) -> FreeModule:
        """The free module behind an algebra or module name."""
        if name in self.algebras:
            return self.algebras[name].module
        return self.modules[name].space

    def rep_on(self, module: FreeModule) -> Representation | None:
        for rep in self.modules.values():
            if rep.space == module:
                return rep
        return None


def _value(module: FreeModule, terms: tuple, nvars: int, where: ast.Span) -> Value:
    """A linear combination whose coefficients may use d and x1..x_nvars."""
    out = module.zero()
    for coeff, g in terms:
        for v in coeff.variables():
            if v > nvars:
                name = f"x{v}"
                raise ArityMismatch(f"{name} is not a spectral variable here (at most {nvars} allowed)",
                                    where.line, where.col)
        out = out + Value.from_coefficients(module, {g: coeff})
    return out


def _table(entries, sources, target: FreeModule, nvars: int) -> Cochain:
    table = {}
    for e in entries:
        key = tuple(e.args)
        if key in table:
            raise ElaborationError(f"entry {e.op}({', '.join(key)}) given twice", e.span.line, e.span.col)
        table[key] = _value(target, e.value, nvars, e.span)
    return Cochain(sources, target, table)


def _rename(alg: LieConformalAlgebra, name: str) -> LieConformalAlgebra:
    m = alg.module
    module = FreeModule(name, m.generators, m.blocks)
    return LieConformalAlgebra(module, Cochain((module, module), module, alg.bracket.table))


def elaborate(tree: ast.SourceFile) -> Environment:
    env = Environment()
    for item in tree.items:
        if isinstance(item, ast.AlgebraDecl):
            module = FreeModule(item.name, item.generators)
            env.algebras[item.name] = LieConformalAlgebra(module, _table(item.entries, (module, module), module, 1))
        elif isinstance(item, ast.SemidirectDecl):
            rep = env.modules[item.module]
            phi = env.cochains[item.twist] if item.twist else None
            if phi is not None and (phi.arity != 2 or phi.target != rep.space
                                    or phi.sources[0] != rep.algebra.module):
                raise ArityMismatch(f"{item.twist} must be a 2-cochain on {rep.algebra.name} with values in {item.module}",
                                    item.span.line, item.span.col)
            if phi is None:
                total, table = semidirect_table(rep)
                alg = LieConformalAlgebra(total, Cochain((total, total), total, table))
            else:
                alg = twisted_semidirect_product(rep, phi, validate=False)
            alg = _rename(alg, item.name)
            env.algebras[item.name] = alg
            env.semidirects[item.name] = Semidirect(alg, rep, phi)
        elif isinstance(item, ast.ModuleDecl):
            alg = env.algebras[item.algebra]
            space = FreeModule(item.name, item.generators)
            if space.name == alg.module.name:
                raise ElaborationError("a module needs its own name", item.span.line, item.span.col)
            action = _table(item.entries, (alg.module, space), space, 1)
            env.modules[item.name] = Representation(alg, space, action)
        elif isinstance(item, ast.MapDecl):
            src, tgt = env.space(item.source), env.space(item.target)
            images = {}
            for e in item.entries:
                g = e.args[0]
                if g in images:
                    raise ElaborationError(f"image of {g} given twice", e.span.line, e.span.col)
                v = _value(tgt, e.value, 0, e.span)
                images[g] = v
            env.maps[item.name] = ModuleMap(src, tgt, images)
        elif isinstance(item, ast.CochainDecl):
            A = env.algebras[item.algebra].module
            tgt = env.space(item.target)
            for e in item.entries:
                if len(e.args) != item.arity:
                    raise ArityMismatch(f"{item.name} takes {item.arity} arguments, got {len(e.args)}",
                                        e.span.line, e.span.col)
            env.cochains[item.name] = _table(item.entries, (A,) * item.arity, tgt, item.arity - 1)
        elif isinstance(item, ast.TensorDecl):
            alg = env.algebras[item.algebra]
            pure = []
            for t in item.terms:
                for p in (t.left[0], t.right[0]):
                    if any(v != 0 for v in p.variables()):
                        raise NonPolynomialCoefficient("tensor factors may only involve d", item.span.line, item.span.col)
                if t.coeff.variables():
                    raise NonPolynomialCoefficient("tensor coefficients must be constants", item.span.line, item.span.col)
                pure.append((t.coeff, t.left, t.right))
            env.tensors[item.name] = (TensorSquare.from_pure(alg.module, pure), alg)
        elif isinstance(item, ast.ProductsDecl):
            module = FreeModule(item.name, item.generators)
            ops = ("circ", "vee") if item.kind == "nslie" else ("succ", "prec", "curly")
            tables = {op: _table([e for e in item.entries if e.op == op], (module, module), module, 1) for op in ops}
            if item.kind == "nslie":
                env.nslie[item.name] = NSLieStructure(module, tables["circ"], tables["vee"])
            else:
                env.nsalg[item.name] = ConformalNSStructure(module, tables["succ"], tables["prec"], tables["curly"])
        elif isinstance(item, ast.Directive):
            env.directives.append(item)
    return env
