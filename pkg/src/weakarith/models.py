"""Finite structures and brute-force evaluation.

A structure has universe {0..size-1}, one boolean table per relation,
one total table per function symbol, and values for constants.  The same
evaluator serves the cutoff models N_z, the finite scattered models and
the equivalence-class models; ``u <= v`` is always the derived notation
``u < v or u = v``.

``nat_eval`` evaluates directly over the natural numbers with a cap on
unbounded quantifier search; it is the truth oracle used to cross-check
purification and the self-reference constructions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .syntax import (
    And,
    App,
    BExists,
    BForall,
    Bot,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Imp,
    Not,
    Or,
    Rel,
    Signature,
    Term,
    Top,
    Var,
    free_vars,
)


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteStructure:
    """Explicit finite model: tables are total over universe {0..size-1}."""

    size: int
    relations: Mapping[str, frozenset[tuple[int, ...]]]
    functions: Mapping[str, Mapping[tuple[int, ...], int]] = field(default_factory=dict)
    constants: Mapping[str, int] = field(default_factory=dict)
    label: str = ""

    def rel(self, name: str) -> frozenset[tuple[int, ...]]:
        try:
            return self.relations[name]
        except KeyError:
            raise EvalError(f"structure has no relation {name!r}") from None

    def fun(self, name: str, args: tuple[int, ...]) -> int:
        try:
            return self.functions[name][args]
        except KeyError:
            raise EvalError(f"structure has no value for {name}{args}") from None

    def elements(self) -> range:
        return range(self.size)

    def describe(self) -> str:
        return self.label or f"structure(size={self.size})"


def eval_term(m: FiniteStructure, t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvalError(f"unassigned free variable {t.name!r}") from None
    if isinstance(t, Const):
        try:
            return m.constants[t.name]
        except KeyError:
            raise EvalError(f"structure has no constant {t.name!r}") from None
    args = tuple(eval_term(m, a, env) for a in t.args)
    return m.fun(t.func, args)


def evaluate(m: FiniteStructure, phi: Formula, env: Mapping[str, int] | None = None) -> bool:
    """Tarskian truth in m under the assignment env."""
    env = dict(env or {})

    def go(f: Formula, e: dict[str, int]) -> bool:
        if isinstance(f, Bot):
            return False
        if isinstance(f, Top):
            return True
        if isinstance(f, Rel):
            args = tuple(eval_term(m, a, e) for a in f.args)
            return args in m.rel(f.name)
        if isinstance(f, Eq):
            return eval_term(m, f.left, e) == eval_term(m, f.right, e)
        if isinstance(f, Not):
            return not go(f.body, e)
        if isinstance(f, And):
            return go(f.left, e) and go(f.right, e)
        if isinstance(f, Or):
            return go(f.left, e) or go(f.right, e)
        if isinstance(f, Imp):
            return (not go(f.left, e)) or go(f.right, e)
        if isinstance(f, (Forall, Exists)):
            want = isinstance(f, Exists)
            for x in m.elements():
                e2 = dict(e)
                e2[f.var] = x
                if go(f.body, e2) == want:
                    return want
            return not want
        if isinstance(f, (BForall, BExists)):
            want = isinstance(f, BExists)
            try:
                b = e[f.bound]
            except KeyError:
                raise EvalError(f"unassigned bound variable {f.bound!r}") from None
            ltrel = m.rel("<")
            for x in m.elements():
                if (x, b) in ltrel or (not f.strict and x == b):
                    e2 = dict(e)
                    e2[f.var] = x
                    if go(f.body, e2) == want:
                        return want
            return not want
        raise TypeError(f"not a formula: {f!r}")

    missing = free_vars(phi) - set(env)
    if missing:
        raise EvalError(f"unassigned free variables: {sorted(missing)}")
    return go(phi, env)


def holds_all(m: FiniteStructure, phis: Iterable[Formula]) -> bool:
    return all(evaluate(m, f) for f in phis)


# ---------------------------------------------------------------------------
# Truth over the naturals with bounded witness search


def nat_eval(phi: Formula, env: Mapping[str, int] | None = None, bound: int = 64) -> bool:
    """Truth over the standard model, searching unbounded quantifiers up to `bound`.

    Sound for existential claims (True means genuinely true); an unbounded
    universal is checked up to the bound only, so callers should restrict
    to Sigma_1-shaped input when soundness matters.
    """
    env = dict(env or {})

    def term(t: Term, e: Mapping[str, int]) -> int:
        if isinstance(t, Var):
            return e[t.name]
        if isinstance(t, Const):
            if t.name != "0":
                raise EvalError(f"unknown constant {t.name!r}")
            return 0
        vals = tuple(term(a, e) for a in t.args)
        if t.func == "S":
            return vals[0] + 1
        if t.func == "+":
            return vals[0] + vals[1]
        if t.func == "*":
            return vals[0] * vals[1]
        raise EvalError(f"unknown function {t.func!r}")

    def atom(f: Rel, e: Mapping[str, int]) -> bool:
        vals = tuple(term(a, e) for a in f.args)
        if f.name == "Z":
            return vals[0] == 0
        if f.name == "S":
            return vals[0] + 1 == vals[1]
        if f.name == "A":
            return vals[0] + vals[1] == vals[2]
        if f.name == "M":
            return vals[0] * vals[1] == vals[2]
        if f.name == "<":
            return vals[0] < vals[1]
        raise EvalError(f"relation {f.name!r} has no standard meaning")

    def go(f: Formula, e: dict[str, int]) -> bool:
        if isinstance(f, Bot):
            return False
        if isinstance(f, Top):
            return True
        if isinstance(f, Rel):
            return atom(f, e)
        if isinstance(f, Eq):
            return term(f.left, e) == term(f.right, e)
        if isinstance(f, Not):
            return not go(f.body, e)
        if isinstance(f, And):
            return go(f.left, e) and go(f.right, e)
        if isinstance(f, Or):
            return go(f.left, e) or go(f.right, e)
        if isinstance(f, Imp):
            return (not go(f.left, e)) or go(f.right, e)
        if isinstance(f, (Forall, Exists)):
            want = isinstance(f, Exists)
            for x in range(bound + 1):
                e2 = dict(e)
                e2[f.var] = x
                if go(f.body, e2) == want:
                    return want
            return not want
        if isinstance(f, (BForall, BExists)):
            want = isinstance(f, BExists)
            b = e[f.bound]
            hi = b if f.strict else b + 1
            for x in range(hi):
                e2 = dict(e)
                e2[f.var] = x
                if go(f.body, e2) == want:
                    return want
            return not want
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, env)


# ---------------------------------------------------------------------------
# Model builders


def cutoff_model(z: int) -> FiniteStructure:
    """N_z: arithmetic on {0..z} with S, + and * clipped at z."""
    if z < 0:
        raise ValueError("cutoff point must be >= 0")
    size = z + 1
    rng = range(size)
    lt_table = frozenset((a, b) for a in rng for b in rng if a < b)
    s_table = {(a,): min(a + 1, z) for a in rng}
    add_table = {(a, b): min(a + b, z) for a in rng for b in rng}
    mul_table = {(a, b): min(a * b, z) for a in rng for b in rng}
    return FiniteStructure(
        size=size,
        relations={"<": lt_table},
        functions={"S": s_table, "+": add_table, "*": mul_table},
        constants={"0": 0},
        label=f"n_cutoff:{z}",
    )


def relational_view(m: FiniteStructure) -> FiniteStructure:
    """Graph view of a functional arithmetic structure (Z, S, A, M, <)."""
    rng = m.elements()
    zero = m.constants["0"]
    return FiniteStructure(
        size=m.size,
        relations={
            "Z": frozenset((a,) for a in rng if a == zero),
            "S": frozenset((a, m.fun("S", (a,))) for a in rng),
            "A": frozenset((a, b, m.fun("+", (a, b))) for a in rng for b in rng),
            "M": frozenset((a, b, m.fun("*", (a, b))) for a in rng for b in rng),
            "<": m.rel("<"),
        },
        label=f"rel({m.describe()})",
    )


def scat_element(n: int, m: int) -> tuple[int, int]:
    if not (1 <= n and 0 <= m < n):
        raise ValueError("scattered elements are pairs (n, m) with m < n")
    return (n, m)


def scat_model(max_class: int) -> FiniteStructure:
    """Finite scattered model: one class of each size 1..max_class.

    Elements are the pairs (n, m) with m < n <= max_class; +, * and S act
    within a class, clipped at the class top (min formulas).  Use
    ``scat_index`` to translate pairs to universe indices.
    """
    if max_class < 1:
        raise ValueError("need at least one class")
    pairs = [(n, m) for n in range(1, max_class + 1) for m in range(n)]
    index = {p: i for i, p in enumerate(pairs)}
    lt_table = set()
    s_table = set()
    a_table = set()
    m_table = set()
    for (n, m) in pairs:
        i = index[(n, m)]
        s_table.add((i, index[(n, min(m + 1, n - 1))]))
        for (n2, m2) in pairs:
            j = index[(n2, m2)]
            if n == n2 and m < m2:
                lt_table.add((i, j))
            if n == n2:
                a_table.add((i, j, index[(n, min(m + m2, n - 1))]))
                m_table.add((i, j, index[(n, min(m * m2, n - 1))]))
    return FiniteStructure(
        size=len(pairs),
        relations={
            "S": frozenset(s_table),
            "A": frozenset(a_table),
            "M": frozenset(m_table),
            "<": frozenset(lt_table),
        },
        label=f"scat:{max_class}",
    )


def scat_index(max_class: int, n: int, m: int) -> int:
    scat_element(n, m)
    if n > max_class:
        raise ValueError(f"class {n} not present in scat:{max_class}")
    return sum(range(1, n)) + m


def jan_model(class_sizes: Iterable[int]) -> FiniteStructure:
    """Equivalence-relation model with the given class sizes."""
    sizes = list(class_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("class sizes must be positive")
    table = set()
    start = 0
    for s in sizes:
        block = range(start, start + s)
        for a in block:
            for b in block:
                table.add((a, b))
        start += s
    return FiniteStructure(
        size=sum(sizes),
        relations={"E": frozenset(table)},
        label="jan:" + ",".join(str(s) for s in sizes),
    )


def class_model(n: int) -> FiniteStructure:
    """The size-n scattered class as a standalone structure (mod_n)."""
    if n < 1:
        raise ValueError("class size must be >= 1")
    rng = range(n)
    return FiniteStructure(
        size=n,
        relations={
            "S": frozenset((a, min(a + 1, n - 1)) for a in rng),
            "A": frozenset((a, b, min(a + b, n - 1)) for a in rng for b in rng),
            "M": frozenset((a, b, min(a * b, n - 1)) for a in rng for b in rng),
            "<": frozenset((a, b) for a in rng for b in rng if a < b),
        },
        label=f"mod:{n}",
    )


# ---------------------------------------------------------------------------
# Isomorphism search (small structures)


def find_isomorphism(m1: FiniteStructure, m2: FiniteStructure) -> list[int] | None:
    """Backtracking search for an isomorphism m1 -> m2; None if there is none."""
    if m1.size != m2.size:
        return None
    if set(m1.relations) != set(m2.relations) or set(m1.functions) != set(m2.functions):
        return None
    if set(m1.constants) != set(m2.constants):
        return None
    if any(len(m1.relations[r]) != len(m2.relations[r]) for r in m1.relations):
        return None
    n = m1.size
    mapping = [-1] * n
    used = [False] * n

    arities = {
        r: (len(next(iter(table))) if table else len(next(iter(m2.relations[r]), ())))
        for r, table in m1.relations.items()
    }

    def compatible() -> bool:
        for r, table in m1.relations.items():
            ar = arities[r]
            if not ar and not table:
                continue
            for tup in itertools.product(range(n), repeat=ar):
                img = tuple(mapping[x] for x in tup)
                if all(v >= 0 for v in img):
                    if (tup in table) != (img in m2.relations[r]):
                        return False
        for f, table in m1.functions.items():
            for args, val in table.items():
                img_args = tuple(mapping[x] for x in args)
                if all(v >= 0 for v in img_args) and mapping[val] >= 0:
                    if m2.functions[f][img_args] != mapping[val]:
                        return False
        for c, v in m1.constants.items():
            if mapping[v] >= 0 and mapping[v] != m2.constants[c]:
                return False
        return True

    def dfs(i: int) -> bool:
        if i == n:
            return True
        for cand in range(n):
            if used[cand]:
                continue
            mapping[i] = cand
            used[cand] = True
            if compatible() and dfs(i + 1):
                return True
            mapping[i] = -1
            used[cand] = False
        return False

    return list(mapping) if dfs(0) else None


# ---------------------------------------------------------------------------
# JSON model files


def structure_to_json(m: FiniteStructure) -> str:
    payload = {
        "universe_size": m.size,
        "relations": {r: sorted(list(t) for t in table) for r, table in m.relations.items()},
        "functions": {
            f: sorted([list(args), val] for args, val in table.items())
            for f, table in m.functions.items()
        },
        "constants": dict(m.constants),
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def structure_from_json(text: str) -> FiniteStructure:
    payload = json.loads(text)
    size = payload["universe_size"]
    rels = {
        r: frozenset(tuple(t) for t in table)
        for r, table in payload.get("relations", {}).items()
    }
    funcs = {
        f: {tuple(args): val for args, val in table}
        for f, table in payload.get("functions", {}).items()
    }
    consts = dict(payload.get("constants", {}))
    for r, table in rels.items():
        for t in table:
            if any(not (0 <= x < size) for x in t):
                raise ValueError(f"relation {r} tuple {t} outside universe")
    return FiniteStructure(size=size, relations=rels, functions=funcs, constants=consts)
