"""Execute the directives of an ``.lca`` file and assemble the JSON report."""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .cochains import coboundary, random_cochain, validate_cochain
from .conformal import (
    Cochain,
    FreeModule,
    Value,
    adjoint,
    check_lie_conformal_axioms,
    check_module,
    shift_gens,
    split_gens,
)
from .dsl import ast
from .dsl.elaborate import Environment, elaborate
from .dsl.parser import parse
from .dsl.printer import format_item
from .nslie import nslie_from_conformal_ns, subadjacent, validate_conformal_ns, validate_nslie
from .operators import (
    ccybe_check,
    check_nijenhuis,
    check_reynolds,
    check_twisted_rb,
    r_sharp_equivalence,
)
from .rbcohomology import TwistedRBComplex, zero_cochain_of
from .report import AxiomReport
from .twilled import DirectSumContext, classify, decompose, mc_check, twist

__all__ = ["SCHEMA", "UnknownDirective", "run_directive", "run_source", "render_json"]

SCHEMA = 1

TAGS = {
    "check lie": "lie-conformal-axioms",
    "check module": "module-axiom",
    "check rb": "relative-rota-baxter",
    "check twisted-rb": "twisted-rota-baxter",
    "check nijenhuis": "nijenhuis",
    "check reynolds": "reynolds",
    "check ccybe": "conformal-classical-yang-baxter",
    "check nslie": "ns-lie-axioms",
    "check conformal-ns": "conformal-ns-axioms",
    "check cocycle": "cocycle",
    "twist": "twisting",
    "classify": "twilled-classification",
    "cohomology": "twisted-rb-cohomology",
}

COHOMOLOGY_SAMPLES = 8


class UnknownDirective(ValueError):
    pass


def _entry(directive: ast.Directive, report: AxiomReport, detail: dict | None = None) -> dict:
    out = {
        "directive": format_item(directive).rstrip(";"),
        "line": directive.span.line,
        "tag": TAGS[directive.kind],
        "status": "pass" if report.ok else "fail",
        "checked": report.checked,
        "failures": [r.to_dict() for r in report.failures()],
    }
    if detail:
        out["detail"] = detail
    return out


def _error_entry(directive: ast.Directive, exc: Exception) -> dict:
    return {
        "directive": format_item(directive).rstrip(";"),
        "line": directive.span.line,
        "tag": TAGS.get(directive.kind, "unknown"),
        "status": "fail",
        "checked": 0,
        "failures": [{"name": type(exc).__name__, "status": "fail",
                      "witness": {"tuple": [], "difference": str(exc)}}],
    }


def _rep_for_map(env: Environment, T):
    rep = env.rep_on(T.source)
    if rep is None or rep.algebra.module != T.target:
        raise ValueError(f"{T.source.name} is not declared as a module over {T.target.name}")
    return rep


def _context(env: Environment, name: str, first, second):
    """(bracket cochain, DirectSumContext) for ``classify A as first + second``."""
    alg = env.algebras[name]
    module = alg.module
    if isinstance(first, str):
        if len(module.blocks) != 2 or [b[0].name for b in module.blocks] != [first, second]:
            raise ValueError(f"{name} is not declared as {first} + {second}")
        return alg.bracket, DirectSumContext.of(module)
    if set(first) & set(second) or set(first) | set(second) != set(module.generators):
        raise ValueError("the two generator sets must partition the generators")
    total, perm, a1, a2 = FreeModule.split(module, first)
    table = {}
    for (a, b), val in alg.bracket.table.items():
        new = {}
        for g, coeff in split_gens(val).items():
            for k, c in shift_gens(coeff, perm[g]).items():
                new[k] = new.get(k, 0) + c
        table[(perm[a], perm[b])] = {k: c for k, c in new.items() if c}
    return Cochain((total, total), total, table), DirectSumContext(a1, a2, total)


def run_directive(env: Environment, directive: ast.Directive, seed: int = 0) -> dict:
    kind, args = directive.kind, directive.args
    try:
        if kind == "check lie":
            return _entry(directive, check_lie_conformal_axioms(env.algebras[args[0]]))
        if kind == "check module":
            return _entry(directive, check_module(env.modules[args[0]]))
        if kind in ("check rb", "check twisted-rb"):
            T = env.maps[args[0]]
            phi = env.cochains[args[1]] if kind == "check twisted-rb" else None
            return _entry(directive, check_twisted_rb(T, _rep_for_map(env, T), phi))
        if kind == "check nijenhuis":
            N = env.maps[args[0]]
            return _entry(directive, check_nijenhuis(N, _algebra_of(env, N)))
        if kind == "check reynolds":
            R = env.maps[args[0]]
            return _entry(directive, check_reynolds(R, _algebra_of(env, R)))
        if kind == "check ccybe":
            r, alg = env.tensors[args[0]]
            if r.is_skew():
                eq = r_sharp_equivalence(r, alg)
                report = AxiomReport(eq.title)
                report.extend(eq.ccybe)
                report.extend(eq)
                return _entry(directive, report, {"skew": True, "rota_baxter": eq.rota_baxter.ok})
            return _entry(directive, ccybe_check(r, alg), {"skew": False})
        if kind == "check nslie":
            s = env.nslie[args[0]]
            report = validate_nslie(s)
            if report.ok:
                report.extend(subadjacent(s).report)
            return _entry(directive, report)
        if kind == "check conformal-ns":
            s = env.nsalg[args[0]]
            report = validate_conformal_ns(s)
            if report.ok:
                report.extend(validate_nslie(nslie_from_conformal_ns(s)), "induced ns-lie: ")
            return _entry(directive, report)
        if kind == "check cocycle":
            phi = env.cochains[args[0]]
            A = phi.sources[0]
            rep = env.rep_on(phi.target)
            if rep is None:
                alg = next(a for a in env.algebras.values() if a.module == A)
                rep = adjoint(alg)
            report = validate_cochain(phi)
            d = coboundary(phi, rep)
            report.record("closed", str(d.first_nonzero()) if not d.is_zero() else None)
            return _entry(directive, report)
        if kind == "twist":
            alg, H = env.algebras[args[0]], env.maps[args[1]]
            ctx = DirectSumContext.of(alg.module)
            twisted = twist(alg.bracket, H, ctx)
            report = check_lie_conformal_axioms(twisted)
            mc = mc_check(decompose(alg.bracket, ctx), H)
            kind_after = classify(twisted, ctx).kind
            return _entry(directive, report, {"classification": kind_after, "maurer_cartan": mc.ok})
        if kind == "classify":
            bracket, ctx = _context(env, *args)
            cl = classify(bracket, ctx)
            report = AxiomReport("classification")
            report.note("lie conformal algebra", cl.kind != "NotLie", detail=cl.kind)
            return _entry(directive, report, {"classification": cl.kind})
        if kind == "cohomology":
            names, max_arity = args
            T = env.maps[names[0]]
            phi = env.cochains[names[1]] if len(names) > 1 else None
            return _entry(directive, _cohomology_report(T, _rep_for_map(env, T), phi, max_arity, seed))
    except Exception as exc:  # a failed construction is a failed check, not a crash
        return _error_entry(directive, exc)
    raise UnknownDirective(kind)


def _algebra_of(env: Environment, f):
    for alg in env.algebras.values():
        if alg.module == f.source == f.target:
            return alg
    raise ValueError(f"{f.source.name} is not an algebra endomorphism")


def _cohomology_report(T, rep, phi, max_arity: int, seed: int) -> AxiomReport:
    """d_T o d_T = 0 and agreement of the two constructions of d_T on random cochains."""
    cx = TwistedRBComplex(T, rep, phi)
    rng = random.Random(seed)
    report = AxiomReport(f"cohomology of {rep.space.name} -> {rep.algebra.name}")
    for k in range(0, max_arity):
        for _ in range(COHOMOLOGY_SAMPLES):
            if k == 0:
                a = random_cochain(rng, cx.A, 1, cx.A, 2).value((0,))
                f = zero_cochain_of(Value(cx.A, a))
            else:
                f = random_cochain(rng, cx.M, k, cx.A, 2)
            df = cx.d(f)
            ddf = cx.d(df)
            report.record(f"d_T squared (arity {k})", str(ddf.first_nonzero()) if not ddf.is_zero() else None)
            if k:
                other = cx.d_via_complex(f)
                report.note(f"d_T agrees with the coboundary of the induced module (arity {k})", other == df)
    return report


def _run_one(args) -> dict:
    text, index, seed = args
    env = elaborate(parse(text))
    return run_directive(env, env.directives[index], seed)


def run_source(text: str, name: str = "<input>", seed: int = 0, jobs: int = 1, timings: bool = False) -> dict:
    """Parse, elaborate and run every directive; raises DslError on bad input."""
    tree = parse(text)
    env = elaborate(tree)
    checks = []
    if jobs > 1 and len(env.directives) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            work = [(text, i, seed) for i in range(len(env.directives))]
            checks = list(pool.map(_run_one, work))
    else:
        for d in env.directives:
            start = time.perf_counter()
            entry = run_directive(env, d, seed)
            if timings:
                entry["seconds"] = round(time.perf_counter() - start, 4)
            checks.append(entry)
    passed = sum(1 for c in checks if c["status"] == "pass")
    return {
        "schema": SCHEMA,
        "tool": {"name": "lcakit", "version": __version__},
        "input": {"name": name, "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest()},
        "seed": seed,
        "summary": {"checks": len(checks), "passed": passed, "failed": len(checks) - passed},
        "checks": checks,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
