"""Small standard algebras and modules used throughout the tests and the docs."""

from __future__ import annotations

from fractions import Fraction

from .conformal import Cochain, FreeModule, LieConformalAlgebra, Representation


def _q(c) -> str:
    c = Fraction(c)
    return f"({c.numerator}/{c.denominator})" if c.denominator != 1 else f"({c.numerator})"


def virasoro(c=2) -> LieConformalAlgebra:
    """[L_x L] = (d + c x) L; a Lie conformal algebra only for c = 2."""
    return LieConformalAlgebra.from_table("Vir", ["L"], {("L", "L"): f"(d + {_q(c)}*x1) L"})


def vir_module(delta=1, alpha=0) -> Representation:
    """M_{delta,alpha}: L_x v = (d + alpha + delta x) v."""
    vir = virasoro()
    return Representation.from_table(vir, "M", ["v"], {("L", "v"): f"(d + {_q(alpha)} + {_q(delta)}*x1) v"})


def current_sl2() -> LieConformalAlgebra:
    """Cur(sl2): [a_x b] = [a, b] for the basis e, h, f."""
    return LieConformalAlgebra.from_table("Cur", ["e", "h", "f"], {
        ("e", "f"): "h",
        ("f", "e"): "-h",
        ("h", "e"): "2 e",
        ("e", "h"): "-2 e",
        ("h", "f"): "-2 f",
        ("f", "h"): "2 f",
    })


def heisenberg() -> LieConformalAlgebra:
    """Current algebra of the Heisenberg Lie algebra: [p, q] = z."""
    return LieConformalAlgebra.from_table("Heis", ["p", "q", "z"], {("p", "q"): "z", ("q", "p"): "-z"})


def abelian(rank: int = 2, name: str = "Ab") -> LieConformalAlgebra:
    gens = [f"g{i}" for i in range(1, rank + 1)]
    return LieConformalAlgebra.from_table(name, gens, {})


def rank2_not_lie() -> LieConformalAlgebra:
    """A skew-symmetric bracket on {L, W} whose Jacobi identity fails."""
    return LieConformalAlgebra.from_table("Bad", ["L", "W"], {
        ("L", "L"): "(d + 2*x1) L",
        ("L", "W"): "(d + 3*x1) W",
        ("W", "L"): "(2*d + 3*x1) W",
        ("W", "W"): "(d + 2*x1) L",
    })


def vir_adjoint_sum() -> tuple:
    """Vir + M_{1,0} as the semidirect product, with its summands."""
    from .conformal import semidirect_product

    rep = vir_module(1, 0)
    return semidirect_product(rep), rep


def abelian_module(algebra: LieConformalAlgebra, name: str = "M", generators=("v",)) -> Representation:
    space = FreeModule(name, generators)
    return Representation(algebra, space, Cochain((algebra.module, space), space, {}))
