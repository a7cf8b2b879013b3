from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcakit import catalog
from lcakit.conformal import (
    Cochain,
    FreeModule,
    InvalidRepresentation,
    LieConformalAlgebra,
    ModuleMismatch,
    Representation,
    Value,
    adjoint,
    check_lie_conformal_axioms,
    check_module,
    conformal_dual,
    semidirect_product,
    skew_residual,
    twisted_semidirect_product,
)
from lcakit.kernel import D, Poly, x

from strategies import polys

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_virasoro_bracket_and_axioms():
    vir = catalog.virasoro()
    assert vir("L", "L") == Value.from_coefficients(vir.module, {"L": D + 2 * x(1)})
    report = check_lie_conformal_axioms(vir)
    assert report.ok
    assert report.checked == 2


@pytest.mark.parametrize("c", [0, 1, 3, -1, Fraction(1, 2)])
def test_perturbed_virasoro_skew_witness(c):
    vir = catalog.virasoro(c)
    report = check_lie_conformal_axioms(vir)
    assert not report.ok
    assert "skew-symmetry" in report.failed_names()
    # derived by hand: (d + c x) + (d + c(-x - d)) = (2 - c) d
    expected = Value.from_coefficients(vir.module, {"L": (2 - c) * D})
    assert skew_residual(vir.bracket, 0, 0) == expected.terms


def test_current_and_heisenberg_are_lie():
    for alg in (catalog.current_sl2(), catalog.heisenberg(), catalog.abelian(3)):
        assert check_lie_conformal_axioms(alg).ok


def test_jacobi_failure_is_reported():
    report = check_lie_conformal_axioms(catalog.rank2_not_lie())
    assert "jacobi" in report.failed_names()
    w = report.failures()[0]
    assert w.witness and w.difference


def test_sesquilinearity_rules():
    vir = catalog.virasoro()
    L = vir.module.gen("L")
    base = vir(L, L)
    assert vir(L.d(), L) == base * (-x(1))
    assert vir(L, L.d()) == base * (D + x(1))


@settings(max_examples=40, deadline=None)
@given(polys(nvars=1, max_degree=2), polys(nvars=1, max_degree=2))
def test_sesquilinear_extension(p, q):
    # [p(d)L_x q(d)L] = p(-x) q(d + x) (d + 2x) L
    vir = catalog.virasoro()
    a = Value.from_coefficients(vir.module, {"L": p})
    b = Value.from_coefficients(vir.module, {"L": q})
    coeff = p.compose({0: -x(1)}) * q.compose({0: D + x(1)}) * (D + 2 * x(1))
    assert vir(a, b) == Value.from_coefficients(vir.module, {"L": coeff})


@settings(max_examples=25, deadline=None)
@given(rationals, rationals)
def test_vir_modules(delta, alpha):
    rep = catalog.vir_module(delta, alpha)
    assert check_module(rep).ok
    assert check_lie_conformal_axioms(semidirect_product(rep)).ok


def test_bad_module_rejected():
    vir = catalog.virasoro()
    rep = Representation.from_table(vir, "M", ["v"], {("L", "v"): "(d + x1^2) v"})
    assert not check_module(rep).ok
    with pytest.raises(InvalidRepresentation):
        semidirect_product(rep)


def test_coadjoint_of_virasoro():
    # the coadjoint module of Vir is M_{-1,0}: L_x L* = (d - x) L*
    dual = conformal_dual(adjoint(catalog.virasoro(), "V"))
    expected = Value.from_coefficients(dual.space, {"L*": D - x(1)})
    assert dual("L", "L*") == expected
    assert check_module(dual).ok


def test_coadjoint_of_current_algebra_is_a_module():
    dual = conformal_dual(adjoint(catalog.current_sl2(), "C"))
    assert check_module(dual).ok


def test_twisted_semidirect_product():
    vir = catalog.virasoro()
    rep = adjoint(vir, "V")
    phi = Cochain((vir.module, vir.module), rep.space, {("L", "L"): "-(d + 2*x1) L"})
    alg = twisted_semidirect_product(rep, phi)
    assert check_lie_conformal_axioms(alg).ok
    assert alg("Vir::L", "Vir::L") == alg.module.element("(d + 2*x1) Vir::L - (d + 2*x1) V::L")


def test_module_mismatch():
    vir = catalog.virasoro()
    other = FreeModule("W", ["w"])
    with pytest.raises(ModuleMismatch):
        LieConformalAlgebra(vir.module, Cochain((other, other), other, {}))
    with pytest.raises(ModuleMismatch):
        vir.module.gen("L") + other.gen("w")


def test_cochain_arithmetic():
    vir = catalog.virasoro()
    br = vir.bracket
    assert (br - br).is_zero()
    assert br * 2 == br + br
    assert br.first_nonzero() is not None
    assert Poly.parse("d") == D
