import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcakit import catalog
from lcakit.cochains import NotACocycle, random_cochain
from lcakit.conformal import Cochain, ModuleMap, Value, adjoint, semidirect_product
from lcakit.kernel import D, Poly, x
from lcakit.operators import (
    NotCocycle,
    NotNijenhuis,
    NotNilpotentWithinBound,
    NotRotaBaxter,
    NotSkew,
    TensorSquare,
    ccybe,
    ccybe_check,
    check_derivation,
    check_nijenhuis,
    check_relative_rb,
    check_reynolds,
    check_twisted_rb,
    deformed_bracket,
    graph_criterion,
    induced_structures_from_rb,
    linf_criterion,
    nijenhuis_power_properties,
    nijenhuis_rb_data,
    r_sharp_equivalence,
    rb_defect,
    reynolds_from_cocycle_series,
    reynolds_inverse_cocycle,
    t_twisted_linf,
)
from lcakit.twilled import DirectSumContext

from strategies import polys


def _scalar_map(module, c):
    return ModuleMap(module, module, {g: module.gen(g) * c for g in module.generators})


def _vir_twisted():
    vir = catalog.virasoro()
    rep = adjoint(vir, "V")
    phi = Cochain((vir.module, vir.module), rep.space, {("L", "L"): "-(d + 2*x1) L"})
    T = ModuleMap(rep.space, vir.module, {"L": vir.module.gen("L")})
    return T, rep, phi


# relative and twisted Rota-Baxter ------------------------------------------

@pytest.mark.parametrize("delta", [1, 2])
@pytest.mark.parametrize("c", [0, 1, 2, -3])
def test_relative_rb_closed_form(delta, c):
    rep = catalog.vir_module(delta, 0)
    T = ModuleMap(rep.space, rep.algebra.module, {"v": rep.algebra.module.gen("L") * c})
    # by hand: [cL_x cL] - cT(rho(cL)_x v - rho(cL)_{-x-d} v) = c^2 (1 - delta)(d + 2x) L
    expected = Value.from_coefficients(rep.algebra.module, {"L": c * c * (1 - delta) * (D + 2 * x(1))})
    assert rb_defect(T, rep).entry("v", "v") == expected
    ok = check_relative_rb(T, rep).ok
    assert ok == (c * (delta - 1) == 0)
    assert graph_criterion(T, rep).ok == ok
    assert linf_criterion(T, rep).ok == ok


def test_twisted_rb_identity_with_minus_bracket():
    T, rep, phi = _vir_twisted()
    report = check_twisted_rb(T, rep, phi)
    assert report.ok
    # without the twist the identity is not a relative Rota-Baxter operator
    assert not check_relative_rb(T, rep).ok


def test_twist_must_be_a_cocycle():
    T, rep, _ = _vir_twisted()
    vir = rep.algebra
    bad = Cochain((vir.module, vir.module), rep.space, {("L", "L"): "(d + 2*x1)^3 L"})
    with pytest.raises(NotACocycle):
        check_twisted_rb(T, rep, bad)


def test_nijenhuis_projection_gives_twisted_rb():
    alg = semidirect_product(catalog.vir_module(1, 0))
    ctx = DirectSumContext.of(alg.module)
    p1 = ctx.p(0)
    assert check_nijenhuis(p1, alg).ok
    rep, phi, T = nijenhuis_rb_data(p1, alg)
    assert check_twisted_rb(T, rep, phi).ok


@settings(max_examples=12, deadline=None)
@given(st.integers(-3, 3), polys(nvars=1, max_degree=1))
def test_criteria_agree_on_random_maps(c, p):
    rep = catalog.vir_module(2, 1)
    image = Value.from_coefficients(rep.algebra.module, {"L": p + c})
    T = ModuleMap(rep.space, rep.algebra.module, {"v": image})
    direct = check_relative_rb(T, rep).ok
    assert graph_criterion(T, rep).ok == direct
    assert linf_criterion(T, rep).ok == direct


def test_induced_structures():
    T, rep, phi = _vir_twisted()
    ind = induced_structures_from_rb(T, rep, phi)
    assert ind.report.ok
    assert ind.classification.kind == "QuasiTwilled"
    assert ind.m_algebra("L", "L") == Value.from_coefficients(rep.space, {"L": D + 2 * x(1)})
    rep2 = catalog.vir_module(2, 0)
    bad = ModuleMap(rep2.space, rep2.algebra.module, {"v": rep2.algebra.module.gen("L")})
    with pytest.raises(NotRotaBaxter):
        induced_structures_from_rb(bad, rep2)


def test_t_twisted_linf():
    T, rep, phi = _vir_twisted()
    L = t_twisted_linf(T, rep, phi)
    rng = random.Random(1)
    for _ in range(3):
        f = random_cochain(rng, rep.space, 1, rep.algebra.module, degree=2)
        assert L.l1(L.l1(f)).is_zero()
    for c in (0, 1, -1, 2):
        T2 = ModuleMap(rep.space, rep.algebra.module, {"L": rep.algebra.module.gen("L") * c})
        # T + T2 = (1 + c) Id, and k Id is a twisted operator here iff k is 0 or 1
        assert L.mc_of_sum(T2).ok == (c in (0, -1))


# Nijenhuis ----------------------------------------------------------------

def test_nijenhuis_scalars_and_derivative():
    vir = catalog.virasoro()
    assert check_nijenhuis(_scalar_map(vir.module, 2), vir).ok
    N = ModuleMap(vir.module, vir.module, {"L": vir.module.gen("L", 1)})
    report = check_nijenhuis(N, vir)
    assert not report.ok
    # by hand: [NL_x NL] = -x(d + x)(d + 2x) L while the deformed bracket vanishes
    assert deformed_bracket(vir, N).bracket.is_zero()
    w = report.failures()[0]
    expected = Value.from_coefficients(vir.module, {"L": -x(1) * (D + x(1)) * (D + 2 * x(1))})
    assert w.difference == str(expected)


@pytest.mark.parametrize("k,l", [(1, 0), (1, 1), (2, 1), (2, 2)])
def test_nijenhuis_power_properties(k, l):
    alg = semidirect_product(catalog.vir_module(1, 0))
    ctx = DirectSumContext.of(alg.module)
    assert nijenhuis_power_properties(ctx.p(0), alg, k, l).ok


def test_power_properties_need_nijenhuis():
    vir = catalog.virasoro()
    N = ModuleMap(vir.module, vir.module, {"L": vir.module.gen("L", 1)})
    with pytest.raises(NotNijenhuis):
        nijenhuis_power_properties(N, vir, 1, 1)


# Reynolds -----------------------------------------------------------------

@pytest.mark.parametrize("c", [-1, 0, 1, 2, 3])
def test_reynolds_scalars(c):
    vir = catalog.virasoro()
    R = _scalar_map(vir.module, c)
    report = check_reynolds(R, vir)
    assert report.ok == (c in (0, 1))
    if c not in (0, 1):
        # derived with sympy: c^2 (c - 1)(d + 2x) L
        expected = Value.from_coefficients(vir.module, {"L": c * c * (c - 1) * (D + 2 * x(1))})
        assert report.failures()[0].difference == str(expected)


def _paper_reynolds_residual(f: Poly) -> Poly:
    a, b = f.compose({0: -x(1)}), f.compose({0: D + x(1)})
    return (a * b - (a + b - a * b) * f) * (D + 2 * x(1))


@settings(max_examples=30, deadline=None)
@given(polys(nvars=1, max_degree=2))
def test_reynolds_on_virasoro_forces_constants(f):
    vir = catalog.virasoro()
    R = ModuleMap(vir.module, vir.module, {"L": Value.from_coefficients(vir.module, {"L": f})})
    report = check_reynolds(R, vir)
    expected = _paper_reynolds_residual(f)
    assert report.ok == expected.is_zero()
    assert report.ok == (f.degree() <= 0 and f in (Poly.const(0), Poly.const(1)))
    if not report.ok:
        assert report.failures()[0].difference == str(Value.from_coefficients(vir.module, {"L": expected}))


def test_reynolds_series_on_heisenberg():
    heis = catalog.heisenberg()
    M = heis.module
    D1 = ModuleMap(M, M, {"q": M.gen("p")})
    assert check_derivation(D1, heis).ok
    R = reynolds_from_cocycle_series(D1, heis)
    assert R.image("q") == M.element("q - p")
    assert check_reynolds(R, heis).ok
    inv = reynolds_inverse_cocycle(R, heis)
    assert inv is not None and inv.ok
    grading = ModuleMap(M, M, {"p": M.gen("p"), "z": M.gen("z")})
    assert check_derivation(grading, heis).ok
    with pytest.raises(NotNilpotentWithinBound):
        reynolds_from_cocycle_series(grading, heis)
    bad = ModuleMap(M, M, {"z": M.gen("p")})
    with pytest.raises(NotCocycle):
        reynolds_from_cocycle_series(bad, heis)


def test_reynolds_inverse_of_noninvertible():
    vir = catalog.virasoro()
    assert reynolds_inverse_cocycle(_scalar_map(vir.module, 0), vir) is None


# CCYBE ----------------------------------------------------------------------

def _vir_r():
    vir = catalog.virasoro()
    r = TensorSquare.from_pure(vir.module, [(1, ("1", "L"), ("d", "L")), (-1, ("d", "L"), ("1", "L"))])
    return r, vir


def test_ccybe_virasoro_witness():
    r, vir = _vir_r()
    assert r.is_skew()
    reduced = ccybe(r, vir).reduce()
    # derived with sympy from the three-term expression
    expected = Poly.parse("8*x1^3 + 12*x1^2*x2 - 12*x1*x2^2 - 8*x2^3")
    assert reduced.terms[(0, 0, 0)] == expected.terms
    eq = r_sharp_equivalence(r, vir)
    assert eq.ok
    assert not eq.ccybe.ok and not eq.rota_baxter.ok


def test_ccybe_current_algebra():
    cur = catalog.current_sl2()
    M = cur.module
    eh = TensorSquare.from_pure(M, [(1, ("1", "e"), ("1", "h")), (-1, ("1", "h"), ("1", "e"))])
    ef = TensorSquare.from_pure(M, [(1, ("1", "e"), ("1", "f")), (-1, ("1", "f"), ("1", "e"))])
    for r, verdict in ((eh, True), (ef, False)):
        eq = r_sharp_equivalence(r, cur)
        assert eq.ok
        assert eq.ccybe.ok == verdict == eq.rota_baxter.ok


def test_ccybe_abelian_and_non_skew():
    ab = catalog.abelian(2)
    M = ab.module
    r = TensorSquare.from_pure(M, [(1, ("1", "g1"), ("d", "g2")), (-1, ("d", "g2"), ("1", "g1"))])
    assert ccybe_check(r, ab).ok
    assert r_sharp_equivalence(r, ab).rota_baxter.ok
    sym = TensorSquare.from_pure(M, [(1, ("1", "g1"), ("1", "g2")), (1, ("1", "g2"), ("1", "g1"))])
    assert not sym.is_skew()
    with pytest.raises(NotSkew):
        r_sharp_equivalence(sym, ab)


@settings(max_examples=10, deadline=None)
@given(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
def test_ccybe_rb_equivalence_on_current_algebra(a, b, c):
    cur = catalog.current_sl2()
    M = cur.module
    pure = []
    for coeff, (g, h) in zip((a, b, c), (("e", "h"), ("e", "f"), ("h", "f"))):
        if coeff:
            pure += [(coeff, ("1", g), ("1", h)), (-coeff, ("1", h), ("1", g))]
    r = TensorSquare.from_pure(M, pure)
    assert r_sharp_equivalence(r, cur).ok
