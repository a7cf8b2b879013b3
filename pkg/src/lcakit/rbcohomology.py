"""Cohomology and infinitesimal deformations of twisted relative Rota-Baxter operators.

Cochains C^k(M, A) are Cochain objects with k copies of M as sources and
target A; a 0-cochain is a Cochain with no sources holding a representative
of A/dA.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cochains import _guard, coboundary
from .conformal import (
    D_RAW,
    Cochain,
    ModuleMap,
    ModuleMismatch,
    Representation,
    Value,
    dagger,
    gen_raw,
    lam,
    render_value,
)
from .kernel import Terms, r_add, r_iadd, r_scale
from .operators import NotRotaBaxter, _map_add, check_twisted_rb, induced_structures_from_rb
from .report import AxiomReport
from .twilled import InternalInconsistency

__all__ = [
    "NotNijenhuisElement",
    "FirstOrderDeformation",
    "NijenhuisElementCandidate",
    "TwistedRBComplex",
    "d_T",
    "is_deformation_cocycle",
    "check_nijenhuis_element",
    "trivial_deformation_from",
    "zero_cochain_of",
]

MINUS_D = r_scale(D_RAW, -1)
ZERO: Terms = {}


class NotNijenhuisElement(ValueError):
    pass


@dataclass
class FirstOrderDeformation:
    base: ModuleMap
    direction: ModuleMap

    def __post_init__(self):
        if self.base.source != self.direction.source or self.base.target != self.direction.target:
            raise ModuleMismatch("base and direction must both map M -> A")


@dataclass
class NijenhuisElementCandidate:
    representative: Value


def zero_cochain_of(a: Value) -> Cochain:
    return Cochain((), a.module, {(): a.terms})


class TwistedRBComplex:
    """The complex (C*(M, A), d_T) of a phi-twisted relative Rota-Baxter operator T."""

    def __init__(self, T: ModuleMap, rep: Representation, phi: Cochain | None = None):
        A = rep.algebra.module
        self.phi = phi if phi is not None else Cochain((A, A), rep.space, {})
        base = check_twisted_rb(T, rep, self.phi)
        if not base.ok:
            raise NotRotaBaxter(str(base))
        self.T, self.rep = T, rep
        self.A, self.M = A, rep.space
        self._induced = None

    # pieces of the induced structures, evaluated inline --------------------
    def rho_T(self, m: Terms, x: Terms, a: Terms) -> Terms:
        """rho^T(m)_x a = [Tm_x a] + T(rho(a)_{-x-d} m) - T(phi_x(Tm, a))."""
        T, br, act = self.T, self.rep.algebra.bracket, self.rep.action
        Tm = T.raw_apply(m)
        out = br.evaluate([x], [Tm, a])
        inner = act.evaluate([r_scale(r_add(x, D_RAW), -1)], [a, m])
        r_iadd(inner, self.phi.evaluate([x], [Tm, a]), -1)
        r_iadd(out, T.raw_apply(inner))
        return out

    def bracket_T(self, m: Terms, x: Terms, n: Terms) -> Terms:
        """[m_x n]^T = rho(Tm)_x n - rho(Tn)_{-x-d} m + phi_x(Tm, Tn)."""
        T, act = self.T, self.rep.action
        Tm, Tn = T.raw_apply(m), T.raw_apply(n)
        out = act.evaluate([x], [Tm, n])
        r_iadd(out, act.evaluate([r_scale(r_add(x, D_RAW), -1)], [Tn, m]), -1)
        r_iadd(out, self.phi.evaluate([x], [Tm, Tn]))
        return out

    def _check(self, f: Cochain) -> None:
        if f.target != self.A or any(s != self.M for s in f.sources):
            raise ModuleMismatch("expected a cochain M^k -> A")

    def d(self, f: Cochain) -> Cochain:
        """d_T by direct expansion."""
        self._check(f)
        k = f.arity
        _guard(k + 1)
        M = self.M
        if k == 0:
            a = f.value(())
            return Cochain((M,), self.A, {(m,): self.rho_T(gen_raw(m), MINUS_D, a) for m in range(M.rank)})
        lams = [lam(i) for i in range(1, k + 1)]
        ldag = dagger(k)
        table = {}
        for key in itertools.product(range(M.rank), repeat=k + 1):
            g = [gen_raw(i) for i in key]
            acc: Terms = {}
            for i in range(k):
                sign = -1 if i % 2 else 1
                params = [lams[j] for j in range(k) if j != i]
                inner = f.evaluate(params, [g[j] for j in range(k + 1) if j != i])
                if inner:
                    r_iadd(acc, self.rho_T(g[i], lams[i], inner), sign)
                b = self.bracket_T(g[i], lams[i], g[k])
                if b:
                    r_iadd(acc, f.evaluate(params, [g[j] for j in range(k) if j != i] + [b]), -sign)
            for i, j in itertools.combinations(range(k), 2):
                b = self.bracket_T(g[i], lams[i], g[j])
                if not b:
                    continue
                sign = -1 if (k + i + j + 1) % 2 else 1
                rest = [t for t in range(k) if t not in (i, j)]
                params = [lams[t] for t in rest] + [ldag]
                r_iadd(acc, f.evaluate(params, [g[t] for t in rest] + [g[k], b]), sign)
            inner = f.evaluate(lams[:k - 1], g[:k])
            if inner:
                r_iadd(acc, self.rho_T(g[k], ldag, inner), -1 if k % 2 else 1)
            if acc:
                table[key] = acc
        return Cochain((M,) * (k + 1), self.A, table)

    def induced(self):
        if self._induced is None:
            self._induced = induced_structures_from_rb(self.T, self.rep, self.phi)
        return self._induced

    def d_via_complex(self, f: Cochain) -> Cochain:
        """d_T as the coboundary of M^{T,phi} with coefficients in (A, rho^T)."""
        self._check(f)
        return coboundary(f, self.induced().rho_T)

    # deformations -----------------------------------------------------------
    def deformation_residual(self, direction: ModuleMap) -> Cochain:
        """Left minus right side of the first-order condition, on generator pairs."""
        T, X = self.T, direction
        br, act, phi = self.rep.algebra.bracket, self.rep.action, self.phi
        x1, flip = lam(1), dagger(1)
        table = {}
        for m, n in itertools.product(range(self.M.rank), repeat=2):
            gm, gn = gen_raw(m), gen_raw(n)
            Tm, Tn, Xm, Xn = T.value((m,)), T.value((n,)), X.value((m,)), X.value((n,))
            lhs = r_add(br.evaluate([x1], [Tm, Xn]), br.evaluate([x1], [Xm, Tn]))
            first = r_add(act.evaluate([x1], [Tm, gn]), act.evaluate([flip], [Tn, gm]), -1)
            r_iadd(first, phi.evaluate([x1], [Tm, Tn]))
            second = r_add(act.evaluate([x1], [Xm, gn]), act.evaluate([flip], [Xn, gm]), -1)
            r_iadd(second, phi.evaluate([x1], [Xm, Tn]))
            r_iadd(second, phi.evaluate([x1], [Tm, Xn]))
            rhs = r_add(X.raw_apply(first), T.raw_apply(second))
            table[(m, n)] = r_add(lhs, rhs, -1)
        return Cochain((self.M, self.M), self.A, table)

    def is_deformation_cocycle(self, direction: ModuleMap) -> AxiomReport:
        FirstOrderDeformation(self.T, direction)
        report = AxiomReport(f"infinitesimal deformation of {self.M.name} -> {self.A.name}")
        res = self.deformation_residual(direction)
        for key in sorted(res.table):
            report.record("first-order condition", render_value(res.table[key], self.A),
                          tuple(self.M.generators[i] for i in key))
        if not res.table:
            report.checked += 1
        closed = self.d(_as_cochain(direction)).is_zero()
        if closed != report.ok:
            raise InternalInconsistency("first-order condition and d_T disagree")
        # the same condition read off the Rota-Baxter defect of T + tX at t = 1, 2
        return report

    def nijenhuis_element_report(self, a: Value) -> AxiomReport:
        A, M = self.A, self.M
        T, act, br, phi = self.T, self.rep.action, self.rep.algebra.bracket, self.phi
        at = a.terms
        x1 = lam(1)
        report = AxiomReport(f"nijenhuis element {render_value(at, A)} for {M.name} -> {A.name}")
        for x, m in itertools.product(range(A.rank), range(M.rank)):
            lhs = act.evaluate([x1], [gen_raw(x), phi.evaluate([MINUS_D], [T.value((m,)), at])])
            rhs = phi.evaluate([MINUS_D], [T.raw_apply(act.value((x, m))), at])
            diff = r_add(lhs, rhs, -1)
            report.record("equivariance of phi(T-, a)", render_value(diff, M) if diff else None,
                          (A.generators[x], M.generators[m]))
        for x, y in itertools.product(range(A.rank), repeat=2):
            pxy = phi.value((x, y))
            lhs = act.evaluate([ZERO], [at, pxy])
            rhs = phi.evaluate([MINUS_D], [T.raw_apply(pxy), at])
            r_iadd(rhs, phi.evaluate([x1], [gen_raw(x), br.evaluate([MINUS_D], [gen_raw(y), at])]), -1)
            r_iadd(rhs, phi.evaluate([x1], [br.evaluate([MINUS_D], [gen_raw(x), at]), gen_raw(y)]), -1)
            diff = r_add(lhs, rhs, -1)
            report.record("compatibility of phi with a", render_value(diff, M) if diff else None,
                          (A.generators[x], A.generators[y]))
        return report

    def equivalence_report(self, first: ModuleMap, second: ModuleMap, a: Value) -> AxiomReport:
        """The three mod t^2 conditions for T + t*first and T + t*second with
        chi_t(x) = x - t[x_{-d} a] and psi_t(m) = m + t l_{-d}(a, m) - t phi_{-d}(Tm, a)."""
        A, M = self.A, self.M
        T, act, br, phi = self.T, self.rep.action, self.rep.algebra.bracket, self.phi
        at = a.terms
        x1 = lam(1)
        chi = (ModuleMap.identity(A), _map(A, A, {x: r_scale(br.evaluate([MINUS_D], [gen_raw(x), at]), -1)
                                                  for x in range(A.rank)}))
        psi1 = {}
        for m in range(M.rank):
            val = act.evaluate([ZERO], [at, gen_raw(m)])
            r_iadd(val, phi.evaluate([MINUS_D], [T.value((m,)), at]), -1)
            psi1[m] = val
        psi = (ModuleMap.identity(M), _map(M, M, psi1))
        Tt = (T, first)
        Tt2 = (T, second)
        report = AxiomReport(f"equivalence of infinitesimal deformations of {M.name} -> {A.name}")

        # chi_t o T_t = T'_t o psi_t
        left = _dual_compose(chi, Tt)
        right = _dual_compose(Tt2, psi)
        for order in (0, 1):
            for m in range(M.rank):
                diff = r_add(left[order].value((m,)), right[order].value((m,)), -1)
                report.record(f"chi T = T' psi (order {order})", render_value(diff, A) if diff else None,
                              (M.generators[m],))

        # rho(chi_t x)_x1 psi_t m = psi_t(rho(x)_x1 m)
        for x, m in itertools.product(range(A.rank), range(M.rank)):
            gx, gm = gen_raw(x), gen_raw(m)
            rhs0 = act.value((x, m))
            for order in (0, 1):
                lhs = {}
                for i in range(order + 1):
                    r_iadd(lhs, act.evaluate([x1], [chi[i].raw_apply(gx), psi[order - i].raw_apply(gm)]))
                rhs = psi[order].raw_apply(rhs0)
                diff = r_add(lhs, rhs, -1)
                report.record(f"equivariance (order {order})", render_value(diff, M) if diff else None,
                              (A.generators[x], M.generators[m]))

        # psi_t phi_x1(x, y) = phi_x1(chi_t x, chi_t y)
        for x, y in itertools.product(range(A.rank), repeat=2):
            gx, gy = gen_raw(x), gen_raw(y)
            for order in (0, 1):
                lhs = psi[order].raw_apply(phi.value((x, y)))
                rhs = {}
                for i in range(order + 1):
                    r_iadd(rhs, phi.evaluate([x1], [chi[i].raw_apply(gx), chi[order - i].raw_apply(gy)]))
                diff = r_add(lhs, rhs, -1)
                report.record(f"cocycle compatibility (order {order})", render_value(diff, M) if diff else None,
                              (A.generators[x], A.generators[y]))
        return report


def _map(source, target, images: dict) -> ModuleMap:
    out = ModuleMap(source, target)
    out.table = {(i,): v for i, v in images.items() if v}
    return out


def _dual_compose(f: tuple, g: tuple) -> tuple:
    """(f0 + t f1) o (g0 + t g1) modulo t^2."""
    return (f[0] @ g[0], _map_add(f[0] @ g[1], f[1] @ g[0]))


def _as_cochain(X: ModuleMap) -> Cochain:
    return Cochain(X.sources, X.target, X.table)


_COMPLEXES: dict = {}


def _complex(T: ModuleMap, rep: Representation, phi: Cochain | None) -> TwistedRBComplex:
    key = (id(T), id(rep), id(phi))
    cx = _COMPLEXES.get(key)
    if cx is None or cx.T is not T or cx.rep is not rep:
        if len(_COMPLEXES) > 64:
            _COMPLEXES.clear()
        cx = TwistedRBComplex(T, rep, phi)
        _COMPLEXES[key] = cx
    return cx


def d_T(f: Cochain, T: ModuleMap, rep: Representation, phi: Cochain | None = None) -> Cochain:
    return _complex(T, rep, phi).d(f)


def is_deformation_cocycle(deformation: FirstOrderDeformation, rep: Representation,
                           phi: Cochain | None = None) -> AxiomReport:
    return _complex(deformation.base, rep, phi).is_deformation_cocycle(deformation.direction)


def check_nijenhuis_element(cand: NijenhuisElementCandidate, T: ModuleMap, rep: Representation,
                            phi: Cochain | None = None) -> AxiomReport:
    return _complex(T, rep, phi).nijenhuis_element_report(cand.representative)


def trivial_deformation_from(cand: NijenhuisElementCandidate, T: ModuleMap, rep: Representation,
                             phi: Cochain | None = None) -> tuple:
    """(T + t d_T(a), report) where the report covers the cocycle condition and
    the equivalence with the undeformed T to first order."""
    cx = _complex(T, rep, phi)
    nij = cx.nijenhuis_element_report(cand.representative)
    if not nij.ok:
        raise NotNijenhuisElement(str(nij))
    dx = cx.d(zero_cochain_of(cand.representative))
    direction = ModuleMap(cx.M, cx.A)
    direction.table = dict(dx.table)
    deformation = FirstOrderDeformation(T, direction)
    report = AxiomReport("trivial infinitesimal deformation")
    report.extend(cx.is_deformation_cocycle(direction))
    report.extend(cx.equivalence_report(direction, ModuleMap.zero(cx.M, cx.A), cand.representative))
    return deformation, report
