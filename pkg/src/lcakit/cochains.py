"""Cochains of a Lie conformal algebra, the coboundary map and the
Nijenhuis-Richardson bracket.

A k-cochain is a :class:`~lcakit.conformal.Cochain` with k copies of the
algebra as sources.  Cochains are stored on every ordered generator tuple;
the skew-symmetry rule (permute arguments and spectral variables together,
replacing the last variable by ``-x1-...-x_{k-1}-d`` when it moves) is
checked by :func:`validate_cochain` rather than assumed.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from .conformal import (
    D_RAW,
    Cochain,
    FreeModule,
    ModuleMismatch,
    Representation,
    Value,
    dagger,
    gen_raw,
    lam,
    render_value,

)
from .kernel import (
    GEN_SHIFT,
    Terms,
    pack,
    permutation_sign,
    r_add,
    r_compose,
    r_iadd,
    r_max_degree,
    r_scale,
    unshuffles,
    var_exponent,
)
from .report import AxiomReport

__all__ = [
    "ArityOverflow",
    "NotACocycle",
    "MAX_ARITY",
    "set_max_arity",
    "zero_cochain",
    "permute",
    "validate_cochain",
    "antisymmetrize",
    "random_cochain",
    "coboundary",
    "circle",
    "nr_bracket",
    "is_cocycle",
    "is_coboundary_bounded",
    "solve_linear",
]

MAX_ARITY = 5


class ArityOverflow(ValueError):
    """A cochain operation would exceed the configured maximum arity."""


class NotACocycle(ValueError):
    """A cochain that was required to be closed is not."""


def set_max_arity(n: int) -> None:
    global MAX_ARITY
    MAX_ARITY = n


def _guard(arity: int) -> None:
    if arity > MAX_ARITY:
        raise ArityOverflow(f"arity {arity} exceeds the maximum {MAX_ARITY}")


def zero_cochain(m: Value) -> Cochain:
    """The class of m in M/dM, represented by its d-free part."""
    rep = {k: c for k, c in m.terms.items() if var_exponent(k, 0) == 0}
    return Cochain((), m.module, {(): rep})


# ---------------------------------------------------------------------------
# skew-symmetry
# ---------------------------------------------------------------------------

def _perm_images(perm: Sequence[int]) -> dict:
    """Variable images for the action of a permutation (0-based) on k slots."""
    k = len(perm)
    images = {}
    for j in range(k - 1):
        src = perm[j]
        images[j + 1] = lam(src + 1) if src < k - 1 else dagger(k - 1)
    return images


def permute(f: Cochain, perm: Sequence[int]) -> Cochain:
    """(perm . f)(a_1..a_k) = f_{x_perm}(a_perm) with the last variable daggered."""
    images = _perm_images(perm)
    table = {}
    for key in itertools.product(*(range(m.rank) for m in f.sources)):
        src = tuple(key[p] for p in perm)
        val = f.value(src)
        if val:
            table[key] = r_compose(val, images)
    return f._like(table)


def validate_cochain(f: Cochain) -> AxiomReport:
    """Check f(a) = sign(s) f_{x_s}(a_s) for every permutation s of every tuple."""
    report = AxiomReport(f"skew-symmetry of a {f.arity}-cochain")
    k = f.arity
    if k <= 1:
        report.checked += 1
        return report
    if len(set(f.sources)) != 1:
        raise ModuleMismatch("skew-symmetry needs identical argument modules")
    perms = [(p, permutation_sign(p), _perm_images(p)) for p in itertools.permutations(range(k))][1:]
    rank = f.sources[0].rank
    for key in itertools.product(range(rank), repeat=k):
        base = f.value(key)
        for p, sign, images in perms:
            src = tuple(key[i] for i in p)
            other = r_compose(f.value(src), images)
            diff = r_add(base, other, -sign)
            names = tuple(f.sources[0].generators[i] for i in key)
            if not report.record(f"permutation {tuple(i + 1 for i in p)}",
                                 render_value(diff, f.target) if diff else None, names):
                break
    return report


def antisymmetrize(h: Cochain) -> Cochain:
    """Sum over permutations of sign * (perm . h); always a valid cochain."""
    k = h.arity
    if k <= 1:
        return h
    total: dict = {}
    for p in itertools.permutations(range(k)):
        sign = permutation_sign(p)
        for key, val in permute(h, p).table.items():
            acc = total.setdefault(key, {})
            r_iadd(acc, val, sign)
    return h._like(total)


def _monomials(nvars: int, degree: int) -> list:
    out = []
    for exps in itertools.product(range(degree + 1), repeat=nvars):
        if sum(exps) <= degree:
            out.append(pack(exps))
    return out


def random_cochain(rng: random.Random, module: FreeModule, arity: int, target: FreeModule | None = None,
                   degree: int = 2, density: float = 0.3, coeff_range: int = 3) -> Cochain:
    """A random valid cochain with integer coefficients and bounded degree."""
    target = target or module
    if arity == 0:
        terms = {i << GEN_SHIFT: rng.randint(-coeff_range, coeff_range) for i in range(target.rank)}
        return Cochain((), target, {(): {k: c for k, c in terms.items() if c}})
    monos = _monomials(arity, degree)
    table = {}
    for key in itertools.product(range(module.rank), repeat=arity):
        if arity > 1 and list(key) != sorted(key):
            continue
        val: Terms = {}
        for g in range(target.rank):
            for mono in monos:
                if rng.random() < density:
                    c = rng.randint(-coeff_range, coeff_range)
                    if c:
                        val[(g << GEN_SHIFT) + mono] = c
        if val:
            table[key] = val
    return antisymmetrize(Cochain((module,) * arity, target, table))


# ---------------------------------------------------------------------------
# the coboundary map
# ---------------------------------------------------------------------------

def _check_context(f: Cochain, rep: Representation) -> None:
    A = rep.algebra.module
    if f.sources != (A,) * f.arity or f.target != rep.space:
        raise ModuleMismatch("cochain does not match the algebra and module")


def fill_by_symmetry(table: dict, arity: int, rank: int) -> dict:
    """Extend values given on nondecreasing generator tuples to all tuples,
    using the skew-symmetry of cochains."""
    out = {}
    for key in itertools.product(range(rank), repeat=arity):
        p = sorted(range(arity), key=lambda i: key[i])
        src = tuple(key[i] for i in p)
        val = table.get(src)
        if not val:
            continue
        if tuple(p) != tuple(range(arity)):
            val = r_compose(val, _perm_images(p))
            if permutation_sign(p) < 0:
                val = r_scale(val, -1)
        if val:
            out[key] = val
    return out


def coboundary(f: Cochain, rep: Representation, full: bool = False) -> Cochain:
    """The Chevalley-Eilenberg coboundary of f with coefficients in ``rep``.

    The result is evaluated on nondecreasing generator tuples and extended by
    skew-symmetry; ``full`` evaluates every tuple instead, which also makes
    sense for an f that is not skew-symmetric."""
    _check_context(f, rep)
    k = f.arity
    _guard(k + 1)
    A, M = rep.algebra.module, rep.space
    act, br = rep.action, rep.algebra.bracket
    if k == 0:
        m = f.value(())
        minus_d = r_scale(D_RAW, -1)
        table = {(a,): act.evaluate([minus_d], [gen_raw(a), m]) for a in range(A.rank)}
        return Cochain((A,), M, table)
    lams = [lam(i) for i in range(1, k + 1)]
    ldag = dagger(k)
    table = {}
    for key in itertools.product(range(A.rank), repeat=k + 1):
        if not full and list(key) != sorted(key):
            continue
        g = [gen_raw(i) for i in key]
        acc: Terms = {}
        for i in range(k):
            sign = -1 if i % 2 else 1
            params = [lams[j] for j in range(k) if j != i]
            inner = f.evaluate(params, [g[j] for j in range(k + 1) if j != i])
            if inner:
                r_iadd(acc, act.evaluate([lams[i]], [g[i], inner]), sign)
            br_val = br.evaluate([lams[i]], [g[i], g[k]])
            if br_val:
                args = [g[j] for j in range(k) if j != i] + [br_val]
                r_iadd(acc, f.evaluate(params, args), -sign)
        for i, j in itertools.combinations(range(k), 2):
            br_val = br.evaluate([lams[i]], [g[i], g[j]])
            if not br_val:
                continue
            sign = -1 if (k + i + j + 1) % 2 else 1
            rest = [t for t in range(k) if t not in (i, j)]
            params = [lams[t] for t in rest] + [ldag]
            args = [g[t] for t in rest] + [g[k], br_val]
            r_iadd(acc, f.evaluate(params, args), sign)
        inner = f.evaluate(lams[:k - 1], g[:k])
        if inner:
            r_iadd(acc, act.evaluate([ldag], [g[k], inner]), -1 if k % 2 else 1)
        if acc:
            table[key] = acc
    if not full:
        table = fill_by_symmetry(table, k + 1, A.rank)
    return Cochain((A,) * (k + 1), M, table)


def is_cocycle(f: Cochain, rep: Representation) -> AxiomReport:
    report = AxiomReport(f"cocycle condition for a {f.arity}-cochain")
    df = coboundary(f, rep)
    for key in sorted(df.table):
        names = tuple(rep.algebra.module.generators[i] for i in key)
        report.record("closed", render_value(df.table[key], rep.space), names)
    if not df.table:
        report.checked += 1
    return report


# ---------------------------------------------------------------------------
# Nijenhuis-Richardson bracket
# ---------------------------------------------------------------------------

def _same_space(f: Cochain, g: Cochain) -> FreeModule:
    A = f.target
    if f.sources != (A,) * f.arity or g.sources != (A,) * g.arity or g.target != A:
        raise ModuleMismatch("NR bracket needs cochains on one algebra with values in it")
    return A


def circle(f: Cochain, g: Cochain) -> Cochain:
    """f o g: insert g into f, summed over (n, m-1)-unshuffles."""
    A = _same_space(f, g)
    m, n = f.arity, g.arity
    if m < 1 or n < 1:
        raise ValueError("NR composition needs positive arities")
    N = m + n - 1
    _guard(N)
    lams = [None] + [lam(i) for i in range(1, N + 1)]
    shuffles = [(tuple(s - 1 for s in u.sigma), u.sign) for u in unshuffles(n, m - 1)]
    table = {}
    last = {N: dagger(N - 1)}
    for key in itertools.product(range(A.rank), repeat=N):
        g_args = [gen_raw(i) for i in key]
        acc: Terms = {}
        for sigma, sign in shuffles:
            inner_idx = sigma[:n]
            inner = g.evaluate([lams[i + 1] for i in inner_idx[:-1]], [g_args[i] for i in inner_idx])
            if not inner:
                continue
            outer_idx = sigma[n:]
            params = []
            if m >= 2:
                s: Terms = {}
                for i in inner_idx:
                    s = r_add(s, lams[i + 1])
                params = [s] + [lams[i + 1] for i in outer_idx[:-1]]
            val = f.evaluate(params, [inner] + [g_args[i] for i in outer_idx])
            if val:
                r_iadd(acc, val, sign)
        if acc:
            acc = r_compose(acc, last)
            if acc:
                table[key] = acc
    return Cochain((A,) * N, A, table)


def nr_bracket(f: Cochain, g: Cochain) -> Cochain:
    """[f, g] = f o g - (-1)^{(m-1)(n-1)} g o f."""
    sign = -1 if ((f.arity - 1) * (g.arity - 1)) % 2 == 0 else 1
    return circle(f, g) + circle(g, f) * sign


# ---------------------------------------------------------------------------
# bounded coboundary search
# ---------------------------------------------------------------------------

def solve_linear(columns: list, rhs: dict):
    """Solve sum_j c_j columns[j] = rhs over the rationals.

    Columns and rhs are sparse dicts row -> value.  Returns a list of
    coefficients or None when the system is inconsistent."""
    rows = sorted({r for col in columns for r in col} | set(rhs), key=repr)
    index = {r: i for i, r in enumerate(rows)}
    n = len(columns)
    matrix = []
    for r in rows:
        matrix.append([Fraction(0)] * (n + 1))
    for j, col in enumerate(columns):
        for r, v in col.items():
            matrix[index[r]][j] = Fraction(v)
    for r, v in rhs.items():
        matrix[index[r]][n] = Fraction(v)
    pivots = []
    row = 0
    for col in range(n):
        pivot = next((i for i in range(row, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[row], matrix[pivot] = matrix[pivot], matrix[row]
        inv = 1 / matrix[row][col]
        matrix[row] = [v * inv for v in matrix[row]]
        for i in range(len(matrix)):
            if i != row and matrix[i][col] != 0:
                factor = matrix[i][col]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[row])]
        pivots.append(col)
        row += 1
    for i in range(row, len(matrix)):
        if matrix[i][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = matrix[i][n]
    return sol


def _flatten(c: Cochain) -> dict:
    out = {}
    for key, val in c.table.items():
        for mono, coeff in val.items():
            out[(key, mono)] = coeff
    return out


def is_coboundary_bounded(f: Cochain, rep: Representation, bound: int | None = None):
    """Search for g with d g = f among cochains of degree <= bound.

    Returns (True, g) when a preimage exists, (False, None) when none exists
    within the bound."""
    _check_context(f, rep)
    A, M = rep.algebra.module, rep.space
    k = f.arity
    if k == 0:
        raise ValueError("0-cochains are never coboundaries in this complex")
    if bound is None:
        bound = (r_max_degree({m: 1 for v in f.table.values() for m in v}) if f.table else 0) + 2
    basis = []
    if k == 1:
        for gi in range(M.rank):
            basis.append(Cochain((), M, {(): gen_raw(gi)}))
    else:
        monos = _monomials(k - 1, bound)
        for key in itertools.combinations_with_replacement(range(A.rank), k - 1):
            for gi in range(M.rank):
                for mono in monos:
                    raw = Cochain((A,) * (k - 1), M, {})
                    raw.table = {key: {(gi << GEN_SHIFT) + mono: 1}}
                    cand = antisymmetrize(raw)
                    if not cand.is_zero():
                        basis.append(cand)
    columns = [_flatten(coboundary(b, rep)) for b in basis]
    sol = solve_linear(columns, _flatten(f))
    if sol is None:
        return False, None
    pre = Cochain((A,) * (k - 1), M, {})
    if k == 1:
        pre = Cochain((), M, {})
    for c, b in zip(sol, basis):
        if c:
            pre = pre + b * (int(c) if c.denominator == 1 else c)
    return True, pre
