"""NS-Lie conformal algebras and conformal NS-algebras."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cochains import coboundary
from .conformal import (
    Cochain,
    FreeModule,
    LieConformalAlgebra,
    ModuleMap,
    ModuleMismatch,
    Representation,
    check_lie_conformal_axioms,
    check_module,
    dagger,
    gen_raw,
    lam,
    render_value,
    skew_residual,
)
from .kernel import Terms, r_add, r_iadd
from .operators import (
    NotNijenhuis,
    _homomorphism_defect,
    check_nijenhuis,
    check_twisted_rb,
    deformed_bracket,
    induced_structures_from_rb,
)
from .report import AxiomReport
from .twilled import InternalInconsistency

__all__ = [
    "NotNSLie",
    "NotConformalNS",
    "NSLieStructure",
    "ConformalNSStructure",
    "SubAdjacent",
    "validate_nslie",
    "subadjacent",
    "validate_conformal_ns",
    "nslie_from_conformal_ns",
    "nslie_from_twisted_rb",
    "nslie_from_nijenhuis",
    "check_rb_morphism",
    "check_nslie_morphism",
]


class NotNSLie(ValueError):
    pass


class NotConformalNS(ValueError):
    pass


def _op(module: FreeModule, table) -> Cochain:
    if isinstance(table, Cochain):
        if table.sources != (module, module) or table.target != module:
            raise ModuleMismatch("operation must be a binary operation on the module")
        return table
    return Cochain((module, module), module, table or {})


@dataclass
class NSLieStructure:
    module: FreeModule
    circ: Cochain
    vee: Cochain

    @classmethod
    def from_tables(cls, module: FreeModule, circ=None, vee=None) -> "NSLieStructure":
        return cls(module, _op(module, circ), _op(module, vee))

    def bracket(self) -> Cochain:
        """[a_x b] = a o_x b - b o_{-x-d} a + a v_x b."""
        n = self.module.rank
        table = {}
        for a, b in itertools.product(range(n), repeat=2):
            val = r_add(self.circ.value((a, b)), self.circ.evaluate([dagger(1)], [gen_raw(b), gen_raw(a)]), -1)
            r_iadd(val, self.vee.value((a, b)))
            table[(a, b)] = val
        return Cochain(self.circ.sources, self.module, table)

    def to_dict(self) -> dict:
        return {"module": self.module.name, "circ": str(self.circ), "vee": str(self.vee)}


@dataclass
class ConformalNSStructure:
    module: FreeModule
    succ: Cochain
    prec: Cochain
    curly: Cochain

    @classmethod
    def from_tables(cls, module: FreeModule, succ=None, prec=None, curly=None) -> "ConformalNSStructure":
        return cls(module, _op(module, succ), _op(module, prec), _op(module, curly))


def _triples(n: int):
    return itertools.product(range(n), repeat=3)


def _names(module: FreeModule, key) -> tuple:
    return tuple(module.generators[i] for i in key)


def ns1_residual(s: NSLieStructure, a: int, b: int, c: int) -> Terms:
    o, v = s.circ, s.vee
    l1, l2 = lam(1), lam(2)
    l12 = r_add(l1, l2)
    ga, gb, gc = gen_raw(a), gen_raw(b), gen_raw(c)
    out = o.evaluate([l12], [o.evaluate([l1], [ga, gb]), gc])
    r_iadd(out, o.evaluate([l1], [ga, o.evaluate([l2], [gb, gc])]), -1)
    r_iadd(out, o.evaluate([l12], [o.evaluate([l2], [gb, ga]), gc]), -1)
    r_iadd(out, o.evaluate([l2], [gb, o.evaluate([l1], [ga, gc])]))
    r_iadd(out, o.evaluate([l12], [v.evaluate([l1], [ga, gb]), gc]))
    return out


def ns2_residual(s: NSLieStructure, br: Cochain, a: int, b: int, c: int) -> Terms:
    o, v = s.circ, s.vee
    l1, l2 = lam(1), lam(2)
    ga, gb, gc = gen_raw(a), gen_raw(b), gen_raw(c)
    out = v.evaluate([l1], [ga, br.evaluate([l2], [gb, gc])])
    r_iadd(out, v.evaluate([r_add(l1, l2)], [br.evaluate([l1], [ga, gb]), gc]), -1)
    r_iadd(out, v.evaluate([l2], [gb, br.evaluate([l1], [ga, gc])]), -1)
    r_iadd(out, o.evaluate([l1], [ga, v.evaluate([l2], [gb, gc])]))
    r_iadd(out, o.evaluate([l2], [gb, v.evaluate([l1], [ga, gc])]), -1)
    # c o_{-x1-x2-d} (a v_x1 b): d is the derivation of the whole result
    r_iadd(out, o.evaluate([dagger(2)], [gc, v.evaluate([l1], [ga, gb])]))
    return out


def validate_nslie(s: NSLieStructure) -> AxiomReport:
    M = s.module
    report = AxiomReport(f"ns-lie axioms for {M.name}")
    for a, b in itertools.product(range(M.rank), repeat=2):
        diff = skew_residual(s.vee, a, b)
        report.record("vee skew-symmetry", render_value(diff, M) if diff else None, _names(M, (a, b)))
    br = s.bracket()
    for key in _triples(M.rank):
        diff = ns1_residual(s, *key)
        report.record("NS1", render_value(diff, M) if diff else None, _names(M, key))
        diff = ns2_residual(s, br, *key)
        report.record("NS2", render_value(diff, M) if diff else None, _names(M, key))
    return report


@dataclass
class SubAdjacent:
    algebra: LieConformalAlgebra
    representation: Representation
    cocycle: Cochain
    report: AxiomReport


def subadjacent(s: NSLieStructure, space_name: str | None = None) -> SubAdjacent:
    """The sub-adjacent algebra, its action x -> a o_x x on a copy of the module,
    and the check that Id is a vee-twisted Rota-Baxter operator into it."""
    base = validate_nslie(s)
    if not base.ok:
        raise NotNSLie(str(base))
    M = s.module
    alg = LieConformalAlgebra(M, s.bracket())
    report = AxiomReport(f"sub-adjacent structures of {M.name}")
    report.extend(check_lie_conformal_axioms(alg), "sub-adjacent bracket: ")
    space = FreeModule(space_name or f"{M.name}'", M.generators)
    rep = Representation(alg, space, Cochain((M, space), space, s.circ.table))
    report.extend(check_module(rep), "action: ")
    phi = Cochain((M, M), space, s.vee.table)
    d = coboundary(phi, rep)
    report.record("vee is a 2-cocycle", str(d.first_nonzero()) if not d.is_zero() else None)
    T = ModuleMap(space, M, {g: M.gen(g) for g in M.generators})
    report.extend(check_twisted_rb(T, rep, phi, validate=False), "identity: ")
    return SubAdjacent(alg, rep, phi, report)


# ---------------------------------------------------------------------------
# conformal NS-algebras
# ---------------------------------------------------------------------------

def _times(s: ConformalNSStructure, params, args) -> Terms:
    out = s.succ.evaluate(params, args)
    r_iadd(out, s.prec.evaluate(params, args))
    r_iadd(out, s.curly.evaluate(params, args))
    return out


def validate_conformal_ns(s: ConformalNSStructure) -> AxiomReport:
    M = s.module
    sc, pr, cu = s.succ, s.prec, s.curly
    l1, l2 = lam(1), lam(2)
    l12 = r_add(l1, l2)
    report = AxiomReport(f"conformal ns-algebra axioms for {M.name}")
    for key in _triples(M.rank):
        x, y, z = (gen_raw(i) for i in key)
        xy = _times(s, [l1], [x, y])
        yz = _times(s, [l2], [y, z])
        ns11 = r_add(sc.evaluate([l1], [x, sc.evaluate([l2], [y, z])]), sc.evaluate([l12], [xy, z]), -1)
        ns22 = r_add(pr.evaluate([l1], [x, yz]), pr.evaluate([l12], [pr.evaluate([l1], [x, y]), z]), -1)
        ns33 = r_add(sc.evaluate([l1], [x, pr.evaluate([l2], [y, z])]), pr.evaluate([l12], [sc.evaluate([l1], [x, y]), z]), -1)
        ns44 = r_add(sc.evaluate([l1], [x, cu.evaluate([l2], [y, z])]), cu.evaluate([l12], [xy, z]), -1)
        r_iadd(ns44, pr.evaluate([l12], [cu.evaluate([l1], [x, y]), z]), -1)
        r_iadd(ns44, cu.evaluate([l1], [x, yz]))
        for name, diff in (("NS11", ns11), ("NS22", ns22), ("NS33", ns33), ("NS44", ns44)):
            report.record(name, render_value(diff, M) if diff else None, _names(M, key))
    return report


def _minus_flip(op: Cochain, a: int, b: int) -> Terms:
    """b op_{-x-d} a."""
    return op.evaluate([dagger(1)], [gen_raw(b), gen_raw(a)])


def nslie_from_conformal_ns(s: ConformalNSStructure) -> NSLieStructure:
    """x o_x y = x > y - y <_{-x-d} x and x v_x y = x Y y - y Y_{-x-d} x."""
    base = validate_conformal_ns(s)
    if not base.ok:
        raise NotConformalNS(str(base))
    n = s.module.rank
    circ, vee = {}, {}
    for a, b in itertools.product(range(n), repeat=2):
        circ[(a, b)] = r_add(s.succ.value((a, b)), _minus_flip(s.prec, a, b), -1)
        vee[(a, b)] = r_add(s.curly.value((a, b)), _minus_flip(s.curly, a, b), -1)
    return NSLieStructure.from_tables(s.module, circ, vee)


# ---------------------------------------------------------------------------
# constructions from operators
# ---------------------------------------------------------------------------

def nslie_from_twisted_rb(T: ModuleMap, rep: Representation, phi: Cochain | None = None) -> NSLieStructure:
    """u o_x v = rho(Tu)_x v and u v_x v = phi_x(Tu, Tv) on the module."""
    ind = induced_structures_from_rb(T, rep, phi)
    M = rep.space
    circ, vee = {}, {}
    for u, v in itertools.product(range(M.rank), repeat=2):
        Tu, Tv = T.value((u,)), T.value((v,))
        circ[(u, v)] = rep.action.evaluate([lam(1)], [Tu, gen_raw(v)])
        if phi is not None:
            vee[(u, v)] = phi.evaluate([lam(1)], [Tu, Tv])
    s = NSLieStructure.from_tables(M, circ, vee)
    if s.bracket() != ind.m_algebra.bracket:
        raise InternalInconsistency("sub-adjacent bracket differs from the induced bracket")
    return s


def nslie_from_nijenhuis(N: ModuleMap, algebra: LieConformalAlgebra, k: int = 1, l: int = 0) -> NSLieStructure:
    """a o_x b = [N^k a_x b]_{N^l} and a v_x b = -N^k [a_x b]_{N^l}.

    k = 1, l = 0 is the basic construction from a Nijenhuis operator."""
    base = check_nijenhuis(N, algebra)
    if not base.ok:
        raise NotNijenhuis(str(base))
    A = algebra.module
    Nk = N.power(k)
    bl = deformed_bracket(algebra, N.power(l)).bracket
    circ, vee = {}, {}
    for a, b in itertools.product(range(A.rank), repeat=2):
        circ[(a, b)] = bl.evaluate([lam(1)], [Nk.value((a,)), gen_raw(b)])
        vee[(a, b)] = Nk.raw_apply(bl.value((a, b)))
    s = NSLieStructure.from_tables(A, circ, Cochain((A, A), A, vee) * -1)
    deformed = deformed_bracket(LieConformalAlgebra(A, bl), Nk).bracket
    if s.bracket() != deformed:
        raise InternalInconsistency("sub-adjacent bracket differs from the deformed bracket")
    return s


def _maps_agree(report: AxiomReport, name: str, f: ModuleMap, g: ModuleMap) -> None:
    for i, gen in enumerate(f.source.generators):
        diff = r_add(f.value((i,)), g.value((i,)), -1)
        report.record(name, render_value(diff, f.target) if diff else None, (gen,))


def check_rb_morphism(chi: ModuleMap, psi: ModuleMap, source: tuple, target: tuple) -> AxiomReport:
    """(chi, psi) from (T, rep, phi) to (T', rep', phi'): chi a homomorphism,
    chi T = T' psi, rho'(chi a) psi m = psi(rho(a) m), psi phi = phi'(chi, chi)."""
    T, rep, phi = source
    T2, rep2, phi2 = target
    A, M = rep.algebra.module, rep.space
    report = AxiomReport(f"morphism of twisted rota-baxter operators {M.name} -> {rep2.space.name}")
    hom = _homomorphism_defect(chi, rep.algebra, rep2.algebra)
    for a, b in itertools.product(range(A.rank), repeat=2):
        val = hom.value((a, b))
        report.record("chi homomorphism", render_value(val, hom.target) if val else None, _names(A, (a, b)))
    _maps_agree(report, "chi T = T' psi", T.then(chi), psi.then(T2))
    for a, m in itertools.product(range(A.rank), range(M.rank)):
        lhs = rep2.action.evaluate([lam(1)], [chi.value((a,)), psi.value((m,))])
        rhs = psi.raw_apply(rep.action.value((a, m)))
        diff = r_add(lhs, rhs, -1)
        report.record("equivariance", render_value(diff, rep2.space) if diff else None, (A.generators[a], M.generators[m]))
    for a, b in itertools.product(range(A.rank), repeat=2):
        lhs = psi.raw_apply(phi.value((a, b))) if phi is not None else {}
        rhs = phi2.evaluate([lam(1)], [chi.value((a,)), chi.value((b,))]) if phi2 is not None else {}
        diff = r_add(lhs, rhs, -1)
        report.record("cocycles", render_value(diff, rep2.space) if diff else None, _names(A, (a, b)))
    return report


def check_nslie_morphism(psi: ModuleMap, s1: NSLieStructure, s2: NSLieStructure,
                         rb_morphism: tuple | None = None) -> AxiomReport:
    """psi(a o b) = psi(a) o' psi(b) and psi(a v b) = psi(a) v' psi(b) on generators.

    ``rb_morphism`` = (chi, (T, rep, phi), (T', rep', phi')) additionally checks
    that (chi, psi) is a morphism of twisted Rota-Baxter operators; in that case
    psi must come out an NS-Lie morphism."""
    if psi.source != s1.module or psi.target != s2.module:
        raise ModuleMismatch("psi must map between the two NS-Lie modules")
    report = AxiomReport(f"ns-lie morphism {s1.module.name} -> {s2.module.name}")
    rb_ok = None
    if rb_morphism is not None:
        chi, src, tgt = rb_morphism
        rb = check_rb_morphism(chi, psi, src, tgt)
        report.extend(rb, "rota-baxter morphism: ")
        rb_ok = rb.ok
    own = AxiomReport("")
    M = s1.module
    for name, op1, op2 in (("circ", s1.circ, s2.circ), ("vee", s1.vee, s2.vee)):
        for a, b in itertools.product(range(M.rank), repeat=2):
            lhs = psi.raw_apply(op1.value((a, b)))
            rhs = op2.evaluate([lam(1)], [psi.value((a,)), psi.value((b,))])
            diff = r_add(lhs, rhs, -1)
            own.record(name, render_value(diff, s2.module) if diff else None, _names(M, (a, b)))
    report.extend(own)
    if rb_ok:
        report.note("rota-baxter morphism induces ns-lie morphism", own.ok)
    return report
