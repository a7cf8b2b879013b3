"""Canonical text form of a parsed ``.lca`` file."""

from __future__ import annotations

from ..kernel import Poly
from . import ast


def format_coeff_term(coeff: Poly, gen: str, first: bool) -> str:
    if len(coeff.terms) == 1:
        (mono, c), = coeff.terms.items()
        neg = c < 0
        body = str(Poly({mono: -c if neg else c}))
        text = gen if body == "1" else f"{body} {gen}"
        if first:
            return ("-" if neg else "") + text
        return (" - " if neg else " + ") + text
    text = f"({coeff}) {gen}"
    return text if first else " + " + text


def format_lincomb(terms: tuple) -> str:
    if not terms:
        return "0"
    return "".join(format_coeff_term(c, g, i == 0) for i, (c, g) in enumerate(terms))


def _entries(entries, indent="  ") -> list:
    lines = []
    for e in entries:
        if e.op == "bracket":
            head = f"[{e.args[0]}, {e.args[1]}]"
        else:
            head = f"{e.op}({', '.join(e.args)})"
        lines.append(f"{indent}{head} = {format_lincomb(e.value)};")
    return lines


def _part(p) -> str:
    return "{" + ", ".join(p) + "}" if isinstance(p, tuple) else p


def format_item(item) -> str:
    if isinstance(item, ast.AlgebraDecl):
        lines = [f"algebra {item.name} {{", f"  generators: {', '.join(item.generators)};"]
        lines += _entries(item.entries)
        return "\n".join(lines + ["}"])
    if isinstance(item, ast.SemidirectDecl):
        tw = f" twisted {item.twist}" if item.twist else ""
        return f"algebra {item.name} = semidirect {item.module}{tw};"
    if isinstance(item, ast.ModuleDecl):
        lines = [f"module {item.name} over {item.algebra} {{", f"  generators: {', '.join(item.generators)};"]
        return "\n".join(lines + _entries(item.entries) + ["}"])
    if isinstance(item, ast.MapDecl):
        lines = [f"map {item.name} : {item.source} -> {item.target} {{"]
        return "\n".join(lines + _entries(item.entries) + ["}"])
    if isinstance(item, ast.CochainDecl):
        lines = [f"cochain {item.name} : {item.algebra}^{item.arity} -> {item.target} {{"]
        return "\n".join(lines + _entries(item.entries) + ["}"])
    if isinstance(item, ast.TensorDecl):
        lines = [f"tensor {item.name} over {item.algebra} {{"]
        for t in item.terms:
            coeff = str(t.coeff)
            if len(t.coeff.terms) > 1:
                coeff = f"({coeff})"
            left = format_coeff_term(t.left[0], t.left[1], True)
            right = format_coeff_term(t.right[0], t.right[1], True)
            lines.append(f"  {coeff}: {left}, {right};")
        return "\n".join(lines + ["}"])
    if isinstance(item, ast.ProductsDecl):
        lines = [f"{item.kind} {item.name} {{", f"  generators: {', '.join(item.generators)};"]
        return "\n".join(lines + _entries(item.entries) + ["}"])
    if isinstance(item, ast.Directive):
        if item.kind == "twist":
            return f"twist {item.args[0]} by {item.args[1]};"
        if item.kind == "classify":
            name, first, second = item.args
            return f"classify {name} as {_part(first)} + {_part(second)};"
        if item.kind == "cohomology":
            names, k = item.args
            return f"cohomology {' '.join(names)} max-arity {k};"
        return f"{item.kind} {' '.join(item.args)};"
    raise TypeError(f"cannot print {type(item).__name__}")


def print_file(tree: ast.SourceFile) -> str:
    return "\n\n".join(format_item(i) for i in tree.items) + ("\n" if tree.items else "")
