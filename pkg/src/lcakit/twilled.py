"""Direct sums A = A1 + A2, bidegrees, twisting and the induced L-infinity brackets.

Generators of the sum are qualified as ``A1::g`` so the block of every
generator is known syntactically.  A cochain on the sum has bidegree k|l
when each nonzero entry with p arguments from A1 and q from A2 lands in A1
with (k, l) = (p-1, q) or in A2 with (k, l) = (p, q-1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cochains import _perm_images, nr_bracket, validate_cochain
from .conformal import (
    Cochain,
    FreeModule,
    LieConformalAlgebra,
    ModuleMap,
    ModuleMismatch,
    Representation,
    gen_raw,
    lam,
    render_value,
    semidirect_table,
    shift_gens,
    split_gens,
)
from .kernel import GEN_SHIFT, Terms, permutation_sign, r_compose, r_iadd, r_scale
from .report import AxiomReport

__all__ = [
    "NotSkewInBlocks",
    "NotQuasiTwilled",
    "NotMaurerCartan",
    "InternalInconsistency",
    "DirectSumContext",
    "Bidegree",
    "NON_HOMOGENEOUS",
    "StructureDecomposition",
    "Classification",
    "lift",
    "lift_map",
    "bidegree_of",
    "decompose",
    "classify",
    "twist",
    "conjugate",
    "twist_components",
    "LInfinity",
    "linf_brackets",
    "mc_residual",
    "mc_check",
    "induced_bracket_on_A2",
    "coboundary_via_nr",
]


class NotSkewInBlocks(ValueError):
    """The lifted map is not skew-symmetric on the sum."""


class NotQuasiTwilled(ValueError):
    pass


class NotMaurerCartan(ValueError):
    pass


class InternalInconsistency(RuntimeError):
    """Two independent computations of the same object disagree."""


class DirectSumContext:
    """A1 + A2 with the block structure of ``total``."""

    def __init__(self, A1: FreeModule, A2: FreeModule, total: FreeModule | None = None):
        self.A1, self.A2 = A1, A2
        self.total = total or FreeModule.direct_sum(A1, A2)
        if len(self.total.blocks) != 2 or self.total.blocks[0][0] != A1 or self.total.blocks[1][0] != A2:
            raise ModuleMismatch("total module is not the sum of the given summands")
        self.offset = A1.rank

    @classmethod
    def of(cls, total: FreeModule) -> "DirectSumContext":
        (A1, _), (A2, _) = total.blocks
        return cls(A1, A2, total)

    def block(self, index: int) -> int:
        return 0 if index < self.offset else 1

    def embed(self, terms: Terms, block: int) -> Terms:
        return shift_gens(terms, self.offset if block else 0)

    def project(self, terms: Terms, block: int) -> Terms:
        """The block component of a raw value, reindexed to the summand."""
        out = {}
        s = self.offset << GEN_SHIFT
        for k, c in terms.items():
            if self.block(k >> GEN_SHIFT) == block:
                out[k - s if block else k] = c
        return out

    def summand(self, block: int) -> FreeModule:
        return self.A2 if block else self.A1

    def p(self, block: int) -> ModuleMap:
        """The projection onto one block, as an endomorphism of the sum."""
        images = {}
        for i in range(self.total.rank):
            if self.block(i) == block:
                images[i] = gen_raw(i)
        out = ModuleMap(self.total, self.total)
        out.table = {(i,): v for i, v in images.items()}
        return out


@dataclass(frozen=True)
class Bidegree:
    k: int
    l: int

    def __str__(self):
        return f"{self.k}|{self.l}"


class _NonHomogeneous:
    def __repr__(self):
        return "NON_HOMOGENEOUS"

    __str__ = __repr__


NON_HOMOGENEOUS = _NonHomogeneous()


def _entry_bidegree(ctx: DirectSumContext, key: tuple, out_block: int) -> Bidegree:
    q = sum(ctx.block(i) for i in key)
    p = len(key) - q
    return Bidegree(p - 1, q) if out_block == 0 else Bidegree(p, q - 1)


def _out_blocks(ctx: DirectSumContext, val: Terms) -> set:
    return {ctx.block(k >> GEN_SHIFT) for k in val}


def bidegree_of(f: Cochain, ctx: DirectSumContext):
    """The bidegree of f, ``None`` for the zero cochain, or NON_HOMOGENEOUS."""
    found = set()
    for key, val in f.table.items():
        for b in _out_blocks(ctx, val):
            found.add(_entry_bidegree(ctx, key, b))
            if len(found) > 1:
                return NON_HOMOGENEOUS
    return found.pop() if found else None


def homogeneous_part(f: Cochain, ctx: DirectSumContext, bideg: Bidegree) -> Cochain:
    table = {}
    for key, val in f.table.items():
        part = {}
        for b in (0, 1):
            if _entry_bidegree(ctx, key, b) == bideg:
                part.update({k: c for k, c in val.items() if ctx.block(k >> GEN_SHIFT) == b})
        if part:
            table[key] = part
    return f._like(table)


# ---------------------------------------------------------------------------
# lifts
# ---------------------------------------------------------------------------

def lift(f: Cochain, ctx: DirectSumContext) -> Cochain:
    """Extend a map A1^k x A2^l -> A_i to a skew-symmetric cochain on the sum.

    The sources of f must be k copies of A1 followed by l copies of A2.  On a
    tuple of sum generators with the right block counts, the value is the
    sign of the stable sort that brings the A1 arguments first times f on the
    sorted arguments, with the spectral variables permuted accordingly."""
    k = sum(1 for m in f.sources if m == ctx.A1)
    n = f.arity
    if f.sources != (ctx.A1,) * k + (ctx.A2,) * (n - k):
        raise ModuleMismatch("lift needs sources A1,...,A1,A2,...,A2")
    if f.target == ctx.A1:
        out_block = 0
    elif f.target == ctx.A2:
        out_block = 1
    else:
        raise ModuleMismatch("lift needs values in A1 or A2")
    table = {}
    for key in itertools.product(range(ctx.total.rank), repeat=n):
        if sum(ctx.block(i) for i in key) != n - k:
            continue
        perm = sorted(range(n), key=lambda s: ctx.block(key[s]))
        src = tuple(key[s] - (ctx.offset if ctx.block(key[s]) else 0) for s in perm)
        val = f.value(src)
        if not val:
            continue
        if n > 1:
            val = r_compose(val, _perm_images(perm))
            if permutation_sign(perm) < 0:
                val = r_scale(val, -1)
        table[key] = ctx.embed(val, out_block)
    out = Cochain((ctx.total,) * n, ctx.total, table)
    if n > 1 and (k > 1 or n - k > 1):
        report = validate_cochain(out)
        if not report.ok:
            raise NotSkewInBlocks(str(report))
    return out


def lift_map(H: ModuleMap, ctx: DirectSumContext) -> Cochain:
    """The lift of H: A2 -> A1, i.e. (a, v) -> (H v, 0)."""
    if H.source != ctx.A2 or H.target != ctx.A1:
        raise ModuleMismatch("H must map A2 to A1")
    return lift(H, ctx)


def restrict(f: Cochain, ctx: DirectSumContext, check: bool = True) -> Cochain:
    """The part of f taking A2 arguments to A1, as a cochain A2^n -> A1.

    With ``check`` the cochain must have bidegree -1|n."""
    n = f.arity
    if check:
        b = bidegree_of(f, ctx)
        if b is not None and b != Bidegree(-1, n):
            raise InternalInconsistency(f"expected bidegree -1|{n}, got {b}")
    table = {}
    for key, val in f.table.items():
        if all(ctx.block(i) for i in key):
            part = ctx.project(val, 0)
            if part:
                table[tuple(i - ctx.offset for i in key)] = part
    return Cochain((ctx.A2,) * n, ctx.A1, table)


# ---------------------------------------------------------------------------
# decomposition and classification
# ---------------------------------------------------------------------------

PHI1, MU1, MU2, PHI2 = Bidegree(2, -1), Bidegree(1, 0), Bidegree(0, 1), Bidegree(-1, 2)


@dataclass
class StructureDecomposition:
    ctx: DirectSumContext
    phi1: Cochain
    mu1: Cochain
    mu2: Cochain
    phi2: Cochain

    def total(self) -> Cochain:
        return self.phi1 + self.mu1 + self.mu2 + self.phi2

    def parts(self) -> dict:
        return {"phi1": self.phi1, "mu1": self.mu1, "mu2": self.mu2, "phi2": self.phi2}

    def __eq__(self, other):
        return isinstance(other, StructureDecomposition) and self.parts() == other.parts()


def _as_cochain(pi) -> Cochain:
    return pi.bracket if isinstance(pi, LieConformalAlgebra) else pi


def decompose(pi, ctx: DirectSumContext) -> StructureDecomposition:
    pi = _as_cochain(pi)
    if pi.sources != (ctx.total, ctx.total) or pi.target != ctx.total:
        raise ModuleMismatch("expected a 2-cochain on the direct sum")
    return StructureDecomposition(ctx, *(homogeneous_part(pi, ctx, b) for b in (PHI1, MU1, MU2, PHI2)))


@dataclass
class Classification:
    kind: str  # Twilled, QuasiTwilled, General or NotLie
    decomposition: StructureDecomposition
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "residuals": {}}
        for name, c in self.residuals.items():
            w = c.first_nonzero()
            out["residuals"][name] = None if w is None else {"at": list(w[0]), "value": w[1]}
        return out


def structure_residuals(dec: StructureDecomposition) -> dict:
    """The five bidegree components of [pi, pi] / 2."""
    p1, m1, m2, p2 = dec.phi1, dec.mu1, dec.mu2, dec.phi2
    half = Fraction(1, 2)
    return {
        "3|-1": nr_bracket(m1, p1),
        "2|0": nr_bracket(m1, m1) * half + nr_bracket(m2, p1),
        "1|1": nr_bracket(m1, m2) + nr_bracket(p1, p2),
        "0|2": nr_bracket(m2, m2) * half + nr_bracket(m1, p2),
        "-1|3": nr_bracket(m2, p2),
    }


def classify(pi, ctx: DirectSumContext) -> Classification:
    pi = _as_cochain(pi)
    dec = decompose(pi, ctx)
    residuals = structure_residuals(dec)
    if any(not r.is_zero() for r in residuals.values()):
        kind = "NotLie"
    elif dec.phi1.is_zero() and dec.phi2.is_zero():
        kind = "Twilled"
    elif dec.phi2.is_zero():
        kind = "QuasiTwilled"
    else:
        kind = "General"
    return Classification(kind, dec, residuals)


# ---------------------------------------------------------------------------
# twisting
# ---------------------------------------------------------------------------

def _series(pi: Cochain, Hhat: Cochain) -> Cochain:
    t1 = nr_bracket(pi, Hhat)
    t2 = nr_bracket(t1, Hhat)
    t3 = nr_bracket(t2, Hhat)
    return pi + t1 + t2 * Fraction(1, 2) + t3 * Fraction(1, 6)


def conjugate(pi: Cochain, H: ModuleMap, ctx: DirectSumContext) -> Cochain:
    """e^{-H} o pi o (e^H x e^H), using H o H = 0 on the sum."""
    pi = _as_cochain(pi)
    Hhat = lift_map(H, ctx)

    def exp(terms: Terms, sign: int) -> Terms:
        out = dict(terms)
        for g, coeff in split_gens(terms).items():
            img = Hhat.value((g,))
            if img:
                from .kernel import r_mul

                r_iadd(out, r_mul(img, coeff), sign)
        return out

    table = {}
    for a, b in itertools.product(range(ctx.total.rank), repeat=2):
        val = pi.evaluate([lam(1)], [exp(gen_raw(a), 1), exp(gen_raw(b), 1)])
        val = exp(val, -1)
        if val:
            table[(a, b)] = val
    return pi._like(table)


def twist(pi, H: ModuleMap, ctx: DirectSumContext) -> Cochain:
    """pi^H by the exponential series, cross-checked against conjugation."""
    pi = _as_cochain(pi)
    if pi.sources != (ctx.total, ctx.total) or pi.target != ctx.total:
        raise ModuleMismatch("expected a 2-cochain on the direct sum")
    out = _series(pi, lift_map(H, ctx))
    other = conjugate(pi, H, ctx)
    if out != other:
        diff = (out - other).first_nonzero()
        raise InternalInconsistency(f"series and conjugation twists differ at {diff}")
    return out


def twist_components(dec: StructureDecomposition, H: ModuleMap) -> StructureDecomposition:
    ctx = dec.ctx
    Hh = lift_map(H, ctx)
    p1H = nr_bracket(dec.phi1, Hh)
    p1HH = nr_bracket(p1H, Hh)
    m1H = nr_bracket(dec.mu1, Hh)
    half, sixth = Fraction(1, 2), Fraction(1, 6)
    return StructureDecomposition(
        ctx,
        dec.phi1,
        dec.mu1 + p1H,
        dec.mu2 + m1H + p1HH * half,
        dec.phi2 + nr_bracket(dec.mu2, Hh) + nr_bracket(m1H, Hh) * half + nr_bracket(p1HH, Hh) * sixth,
    )


# ---------------------------------------------------------------------------
# L-infinity brackets on C*(A2, A1)
# ---------------------------------------------------------------------------

class LInfinity:
    """d, [-,-] and [-,-,-] on cochains A2^m -> A1 of a quasi-twilled structure.

    Elements have degree equal to their arity."""

    def __init__(self, dec: StructureDecomposition):
        if not dec.phi2.is_zero():
            raise NotQuasiTwilled("phi2 must vanish")
        self.dec = dec
        self.ctx = dec.ctx

    def _hat(self, f: Cochain) -> Cochain:
        if f.sources != (self.ctx.A2,) * f.arity or f.target != self.ctx.A1:
            raise ModuleMismatch("elements of the L-infinity algebra are cochains A2^m -> A1")
        return lift(f, self.ctx)

    def l1(self, f: Cochain) -> Cochain:
        return restrict(nr_bracket(self.dec.mu2, self._hat(f)), self.ctx)

    def l2(self, f1: Cochain, f2: Cochain) -> Cochain:
        out = nr_bracket(nr_bracket(self.dec.mu1, self._hat(f1)), self._hat(f2))
        if f1.arity % 2 == 0:
            out = -out
        return restrict(out, self.ctx)

    def l3(self, f1: Cochain, f2: Cochain, f3: Cochain) -> Cochain:
        out = nr_bracket(nr_bracket(nr_bracket(self.dec.phi1, self._hat(f1)), self._hat(f2)), self._hat(f3))
        if f2.arity % 2 == 0:
            out = -out
        return restrict(out, self.ctx)

    def bracket(self, *args: Cochain):
        """l_k for k = len(args); zero (returned as None) for k >= 4."""
        if len(args) == 1:
            return self.l1(*args)
        if len(args) == 2:
            return self.l2(*args)
        if len(args) == 3:
            return self.l3(*args)
        return None

    def higher_jacobi(self, elements: Sequence[Cochain], sign_rule: str = "lada-markl") -> Cochain | None:
        """The n-th higher Jacobi sum for n = len(elements); returns the total.

        ``sign_rule`` selects the outer sign: ``lada-markl`` uses (-1)^{i(j-1)},
        ``alternating`` uses (-1)^i."""
        from .kernel import unshuffles

        n = len(elements)
        degrees = [f.arity for f in elements]
        total = None
        for i in range(1, n + 1):
            j = n + 1 - i
            if i > 3 or j > 3:
                continue
            outer = (-1) ** (i * (j - 1)) if sign_rule == "lada-markl" else (-1) ** i
            for u in unshuffles(i, n - i):
                sigma = [s - 1 for s in u.sigma]
                chi = u.sign * _koszul(sigma, degrees)
                inner = self.bracket(*(elements[s] for s in sigma[:i]))
                if inner is None or inner.is_zero():
                    continue
                term = self.bracket(inner, *(elements[s] for s in sigma[i:]))
                if term is None:
                    continue
                term = term * (outer * chi)
                total = term if total is None else _add_any(total, term)
        return total


def _add_any(a: Cochain, b: Cochain) -> Cochain:
    if a.sources != b.sources:
        raise InternalInconsistency("higher Jacobi terms of different arities")
    return a + b


def _koszul(sigma: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of permuting graded elements by sigma."""
    sign = 1
    for a in range(len(sigma)):
        for b in range(a + 1, len(sigma)):
            if sigma[a] > sigma[b] and degrees[sigma[a]] % 2 and degrees[sigma[b]] % 2:
                sign = -sign
    return sign


def linf_brackets(dec: StructureDecomposition) -> LInfinity:
    return LInfinity(dec)


def mc_residual(dec: StructureDecomposition, H: ModuleMap) -> Cochain:
    """d H + 1/2 [H,H] + 1/6 [H,H,H] as a 2-cochain A2^2 -> A1."""
    L = LInfinity(dec)
    return L.l1(H) + L.l2(H, H) * Fraction(1, 2) + L.l3(H, H, H) * Fraction(1, 6)


def mc_check(dec: StructureDecomposition, H: ModuleMap) -> AxiomReport:
    """Maurer-Cartan condition for H, cross-checked against phi2 of the twisted structure."""
    ctx = dec.ctx
    report = AxiomReport(f"maurer-cartan condition for {ctx.A2.name} -> {ctx.A1.name}")
    res = mc_residual(dec, H)
    for a, b in itertools.product(range(ctx.A2.rank), repeat=2):
        val = res.value((a, b))
        report.record("maurer-cartan", render_value(val, ctx.A1) if val else None,
                      (ctx.A2.generators[a], ctx.A2.generators[b]))
    phi2 = restrict(twist_components(dec, H).phi2, ctx)
    if phi2 != res:
        raise InternalInconsistency("MC residual differs from phi2 of the twisted structure")
    return report


def induced_bracket_on_A2(dec: StructureDecomposition, H: ModuleMap) -> LieConformalAlgebra:
    """The bracket mu2^H restricted to A2 for a Maurer-Cartan H."""
    ctx = dec.ctx
    if not mc_check(dec, H).ok:
        raise NotMaurerCartan("H does not satisfy the Maurer-Cartan equation")
    mu2 = twist_components(dec, H).mu2
    table = {}
    for a, b in itertools.product(range(ctx.A2.rank), repeat=2):
        val = ctx.project(mu2.value((ctx.offset + a, ctx.offset + b)), 1)
        if val:
            table[(a, b)] = val
    return LieConformalAlgebra(ctx.A2, Cochain((ctx.A2, ctx.A2), ctx.A2, table))


# ---------------------------------------------------------------------------
# coboundary as an NR bracket
# ---------------------------------------------------------------------------

def coboundary_via_nr(f: Cochain, rep: Representation) -> Cochain:
    """(-1)^{k-1} [pi + rho, f^] restricted to A^{k+1} -> M, for k >= 1."""
    A, M = rep.algebra.module, rep.space
    total, table = semidirect_table(rep)
    ctx = DirectSumContext(A, M, total)
    pi = Cochain((total, total), total, table)
    k = f.arity
    fh = lift(f, ctx)
    out = nr_bracket(pi, fh)
    if k % 2 == 0:
        out = -out
    res = {}
    for key, val in out.table.items():
        if not any(ctx.block(i) for i in key):
            part = ctx.project(val, 1)
            if part:
                res[key] = part
    return Cochain((A,) * (k + 1), M, res)
