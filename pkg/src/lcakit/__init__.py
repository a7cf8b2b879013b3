"""Exact symbolic computation with Lie conformal algebras, their cochains,
twistings and Rota-Baxter type operators."""

__version__ = "0.1.0"

from .conformal import (  # noqa: E402
    Cochain,
    FreeModule,
    LieConformalAlgebra,
    ModuleMap,
    Representation,
    Value,
    adjoint,
    check_lie_conformal_axioms,
    check_module,
    conformal_dual,
    semidirect_product,
    twisted_semidirect_product,
)
from .kernel import Poly, x  # noqa: E402
from .report import AxiomReport  # noqa: E402

__all__ = [
    "__version__",
    "AxiomReport",
    "Cochain",
    "FreeModule",
    "LieConformalAlgebra",
    "ModuleMap",
    "Poly",
    "Representation",
    "Value",
    "adjoint",
    "check_lie_conformal_axioms",
    "check_module",
    "conformal_dual",
    "semidirect_product",
    "twisted_semidirect_product",
    "x",
]
