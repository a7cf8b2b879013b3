"""The ``.lca`` definition language."""

from .parser import DslError, DslSyntaxError, DuplicateName, UndeclaredName, parse, parse_poly, parse_value
from .printer import print_file

__all__ = [
    "DslError",
    "DslSyntaxError",
    "DuplicateName",
    "UndeclaredName",
    "parse",
    "parse_poly",
    "parse_value",
    "print_file",
]
