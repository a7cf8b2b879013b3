from fractions import Fraction

import pytest
from hypothesis import given, settings

from lcakit.kernel import (
    D,
    CyclicSubstitution,
    DegreeOverflow,
    Poly,
    pack,
    permutation_sign,
    unpack,
    unshuffles,
    x,
)

from strategies import polys


def test_pack_roundtrip():
    for exps in [(0,), (1, 2), (3, 0, 1, 4), (0, 0, 0, 0, 2)]:
        got = unpack(pack(exps))
        assert got + (0,) * (len(exps) - len(got)) == exps


def test_basic_arithmetic():
    p = (D + 2 * x(1)) * (D - x(1))
    assert p == D**2 + D * x(1) - 2 * x(1) ** 2
    assert p.degree() == 2
    assert p.degree_in(1) == 2
    assert p.variables() == {0, 1}
    assert Poly.const(0).is_zero()
    assert (p - p).is_zero()


def test_rational_coefficients_stay_exact():
    p = Poly.const(Fraction(1, 3)) * 3
    assert p == 1
    assert (D * Fraction(1, 2)).coefficient((1,)) == Fraction(1, 2)


def test_parse_and_render():
    p = Poly.parse("(d + 2*x1)^2 - 4*x1*d")
    assert p == D**2 + 4 * x(1) ** 2
    assert Poly.parse(str(p)) == p


def test_substitution_dagger():
    # x1 -> -x1 - d is the usual dagger substitution for one spectral variable
    p = D + 2 * x(1)
    assert p.compose({1: -x(1) - D}) == -D - 2 * x(1)
    with pytest.raises(CyclicSubstitution):
        p.substitute(1, x(1) + 1)


def test_variable_range():
    with pytest.raises(ValueError):
        x(0)
    with pytest.raises(DegreeOverflow):
        Poly.var(10_000)


def test_permutation_sign():
    assert permutation_sign([1, 2, 3]) == 1
    assert permutation_sign([2, 1, 3]) == -1
    assert permutation_sign([2, 3, 1]) == 1
    assert permutation_sign([0, 3, 2, 1]) == -1


def test_unshuffles():
    us = unshuffles(2, 2)
    assert len(us) == 6
    assert sum(u.sign for u in us) == 2
    for u in unshuffles(2, 3):
        assert list(u.sigma[:2]) == sorted(u.sigma[:2])
        assert list(u.sigma[2:]) == sorted(u.sigma[2:])


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == 0


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_composition_is_a_ring_map(p, q, r):
    sub = {1: r, 2: D + x(1)}
    assert (p * q).compose(sub) == p.compose(sub) * q.compose(sub)
    assert (p + q).compose(sub) == p.compose(sub) + q.compose(sub)


@settings(max_examples=60, deadline=None)
@given(polys())
def test_render_parse_roundtrip(p):
    assert Poly.parse(str(p)) == p
