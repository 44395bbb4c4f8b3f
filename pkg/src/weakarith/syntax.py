"""First-order syntax: terms, formulas, signatures, parsing and printing.

Formulas are immutable trees.  Two atom styles coexist:

* relational atoms (``Rel``), used by the relational arithmetic signature
  (Z/1, S/2, A/3, M/3, </2) and by arbitrary relational signatures, and
* term equalities (``Eq``) over the functional arithmetic signature
  (0, S, +, *), used to state axioms such as ``x + S(y) = S(x + y)``.

The concrete grammar is ASCII: ``E x.`` / ``A x.`` quantifiers, bounded
forms ``E x < y.`` and ``E x <= y.``, connectives ``~ & | ->``, constants
``bot`` / ``top``, atoms ``0 = x``, ``S x = y``, ``A x y z``, ``M x y z``,
``x < y`` and ``x = y``.  Function terms print with parentheses
(``S(x)``, ``(x + y)``, ``(x * y)``) so they never collide with the
relational atom forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    """Relation and function symbols with arities, plus constants."""

    relations: tuple[tuple[str, int], ...]
    functions: tuple[tuple[str, int], ...] = ()
    constants: tuple[str, ...] = ()

    def relation_arity(self, name: str) -> int | None:
        for sym, ar in self.relations:
            if sym == name:
                return ar
        return None

    def function_arity(self, name: str) -> int | None:
        for sym, ar in self.functions:
            if sym == name:
                return ar
        return None

    def symbol_names(self) -> set[str]:
        return (
            {s for s, _ in self.relations}
            | {s for s, _ in self.functions}
            | set(self.constants)
        )


#: Functional arithmetic: 0, S, +, * and <.
ARITH = Signature(relations=(("<", 2),), functions=(("S", 1), ("+", 2), ("*", 2)), constants=("0",))

#: Relational arithmetic: Z/1, S/2, A/3, M/3, </2.
ARITH_REL = Signature(relations=(("Z", 1), ("S", 2), ("A", 3), ("M", 3), ("<", 2)))

#: Relational arithmetic without zero (scattered-model language).
SCAT_SIG = Signature(relations=(("S", 2), ("A", 3), ("M", 3), ("<", 2)))

#: One binary relation E (equivalence-style theories).
JAN_SIG = Signature(relations=(("E", 2),))

#: Successor fragment: 0 and S only.
SUCC_SIG = Signature(relations=(), functions=(("S", 1),), constants=("0",))


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    func: str
    args: tuple["Term", ...]


Term = Union[Var, Const, App]

ZERO = Const("0")


def num(n: int) -> Term:
    """The numeral S(S(...(0))) with n applications of S."""
    if n < 0:
        raise ValueError("numerals are non-negative")
    t: Term = ZERO
    for _ in range(n):
        t = App("S", (t,))
    return t


def numeral_value(t: Term) -> int | None:
    """Inverse of num() on terms that are numerals, else None."""
    k = 0
    while isinstance(t, App) and t.func == "S" and len(t.args) == 1:
        k += 1
        t = t.args[0]
    return k if t == ZERO else None


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class BForall:
    """Bounded universal: A var < bound. body  (or <= when strict is False)."""

    var: str
    strict: bool
    bound: str
    body: "Formula"


@dataclass(frozen=True)
class BExists:
    var: str
    strict: bool
    bound: str
    body: "Formula"


Formula = Union[Bot, Top, Rel, Eq, Not, And, Or, Imp, Forall, Exists, BForall, BExists]

BOT = Bot()
TOP = Top()


# Convenient relational-atom builders.


def _as_term(x) -> Term:
    return Var(x) if isinstance(x, str) else x


def z_atom(u) -> Rel:
    return Rel("Z", (_as_term(u),))


def s_atom(u, v) -> Rel:
    return Rel("S", (_as_term(u), _as_term(v)))


def a_atom(u, v, w) -> Rel:
    return Rel("A", (_as_term(u), _as_term(v), _as_term(w)))


def m_atom(u, v, w) -> Rel:
    return Rel("M", (_as_term(u), _as_term(v), _as_term(w)))


def lt(u, v) -> Rel:
    return Rel("<", (_as_term(u), _as_term(v)))


def eq(u, v) -> Eq:
    return Eq(_as_term(u), _as_term(v))


def le(u, v) -> Or:
    """Derived u <= v, i.e. u < v or u = v."""
    return Or(lt(u, v), eq(u, v))


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ---------------------------------------------------------------------------
# Variable bookkeeping


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, (Bot, Top)):
        return set()
    if isinstance(phi, Rel):
        out: set[str] = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return (free_vars(phi.body) - {phi.var}) | {phi.bound}
    raise TypeError(f"not a formula: {phi!r}")


def all_var_names(phi: Formula) -> set[str]:
    """Every variable name occurring in phi, free or bound."""
    if isinstance(phi, (Bot, Top)):
        return set()
    if isinstance(phi, Rel):
        out: set[str] = set()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return all_var_names(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        return all_var_names(phi.left) | all_var_names(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return all_var_names(phi.body) | {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return all_var_names(phi.body) | {phi.var, phi.bound}
    raise TypeError(f"not a formula: {phi!r}")


class FreshNames:
    """Deterministic fresh-variable supply avoiding a given set of names."""

    def __init__(self, avoid=(), base: str = "w"):
        self.avoid = set(avoid)
        self.base = base
        self.counter = 0

    def take(self, base: str | None = None) -> str:
        base = base or self.base
        if base not in self.avoid:
            self.avoid.add(base)
            return base
        while True:
            cand = f"{base}{self.counter}"
            self.counter += 1
            if cand not in self.avoid:
                self.avoid.add(cand)
                return cand


def subst_term(t: Term, env: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return env.get(t.name, t)
    if isinstance(t, Const):
        return t
    return App(t.func, tuple(subst_term(a, env) for a in t.args))


def subst(phi: Formula, env: Mapping[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables.

    A bounded quantifier whose bound variable is replaced by a non-variable
    term is expanded to its unbounded abbreviation (the result is no longer
    pure; callers renormalise with purify when purity matters).
    """
    env = {k: v for k, v in env.items() if v != Var(k)}
    if not env:
        return phi
    if isinstance(phi, (Bot, Top)):
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(a, env) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, env), subst_term(phi.right, env))
    if isinstance(phi, Not):
        return Not(subst(phi.body, env))
    if isinstance(phi, (And, Or, Imp)):
        return type(phi)(subst(phi.left, env), subst(phi.right, env))
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in env.items() if k != phi.var}
        if not inner:
            return phi
        clash = set().union(*(term_vars(v) for v in inner.values()))
        var = phi.var
        body = phi.body
        if var in clash:
            fresh = FreshNames(clash | all_var_names(body) | set(inner), base=var)
            newvar = fresh.take(var)
            body = subst(body, {var: Var(newvar)})
            var = newvar
        return type(phi)(var, subst(body, inner))
    if isinstance(phi, (BForall, BExists)):
        bound_repl = env.get(phi.bound)
        if bound_repl is not None and not isinstance(bound_repl, Var):
            # Bound slot receives a proper term: fall back to the
            # unbounded abbreviation and substitute there.
            guard = Or(lt(Var(phi.var), Var(phi.bound)), eq(Var(phi.var), Var(phi.bound))) \
                if not phi.strict else lt(Var(phi.var), Var(phi.bound))
            if isinstance(phi, BExists):
                expanded: Formula = Exists(phi.var, And(guard, phi.body))
            else:
                expanded = Forall(phi.var, Imp(guard, phi.body))
            return subst(expanded, env)
        inner = {k: v for k, v in env.items() if k != phi.var}
        newbound = phi.bound
        if bound_repl is not None:
            assert isinstance(bound_repl, Var)
            newbound = bound_repl.name
        body_env = {k: v for k, v in inner.items() if k != phi.bound}
        if phi.bound in inner:
            body_env[phi.bound] = inner[phi.bound]
        clash = set()
        for v in body_env.values():
            clash |= term_vars(v)
        var = phi.var
        body = phi.body
        if var in clash or var == newbound:
            fresh = FreshNames(clash | all_var_names(body) | set(body_env) | {newbound}, base=var)
            newvar = fresh.take(var)
            body = subst(body, {var: Var(newvar)})
            var = newvar
        return type(phi)(var, phi.strict, newbound, subst(body, body_env))
    raise TypeError(f"not a formula: {phi!r}")


def rename_bound_apart(phi: Formula, avoid: set[str]) -> Formula:
    """Rename bound variables so none clashes with `avoid` or each other."""
    fresh = FreshNames(set(avoid) | free_vars(phi))

    def go(f: Formula, ren: dict[str, str]) -> Formula:
        if isinstance(f, (Bot, Top)):
            return f
        if isinstance(f, Rel):
            env = {k: Var(v) for k, v in ren.items()}
            return Rel(f.name, tuple(subst_term(a, env) for a in f.args))
        if isinstance(f, Eq):
            env = {k: Var(v) for k, v in ren.items()}
            return Eq(subst_term(f.left, env), subst_term(f.right, env))
        if isinstance(f, Not):
            return Not(go(f.body, ren))
        if isinstance(f, (And, Or, Imp)):
            return type(f)(go(f.left, ren), go(f.right, ren))
        if isinstance(f, (Forall, Exists)):
            nv = fresh.take(f.var)
            return type(f)(nv, go(f.body, {**ren, f.var: nv}))
        if isinstance(f, (BForall, BExists)):
            nb = ren.get(f.bound, f.bound)
            nv = fresh.take(f.var)
            return type(f)(nv, f.strict, nb, go(f.body, {**ren, f.var: nv}))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi, {})


# ---------------------------------------------------------------------------
# Printing


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    if t.func == "S":
        return f"S({print_term(t.args[0])})"
    if t.func in ("+", "*"):
        return f"({print_term(t.args[0])} {t.func} {print_term(t.args[1])})"
    args = ", ".join(print_term(a) for a in t.args)
    return f"{t.func}({args})"


_BINOP = {And: "&", Or: "|", Imp: "->"}


def pretty(phi: Formula) -> str:
    """Canonical fully parenthesised rendering; parse(pretty(f)) == f."""
    if isinstance(phi, Bot):
        return "bot"
    if isinstance(phi, Top):
        return "top"
    if isinstance(phi, Rel):
        if phi.name == "Z":
            return f"0 = {print_term(phi.args[0])}"
        if phi.name == "S" and len(phi.args) == 2:
            return f"S {print_term(phi.args[0])} = {print_term(phi.args[1])}"
        if phi.name == "<":
            return f"{print_term(phi.args[0])} < {print_term(phi.args[1])}"
        if not phi.args:
            return phi.name
        return phi.name + " " + " ".join(print_term(a) for a in phi.args)
    if isinstance(phi, Eq):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, Not):
        inner = pretty(phi.body)
        if isinstance(phi.body, (Forall, Exists, BForall, BExists)):
            return f"~({inner})"
        return f"~{inner}"
    if isinstance(phi, (And, Or, Imp)):
        return f"({pretty(phi.left)} {_BINOP[type(phi)]} {pretty(phi.right)})"
    if isinstance(phi, Forall):
        return f"A {phi.var} . {pretty(phi.body)}"
    if isinstance(phi, Exists):
        return f"E {phi.var} . {pretty(phi.body)}"
    if isinstance(phi, BForall):
        op = "<" if phi.strict else "<="
        return f"A {phi.var} {op} {phi.bound} . {pretty(phi.body)}"
    if isinstance(phi, BExists):
        op = "<" if phi.strict else "<="
        return f"E {phi.var} {op} {phi.bound} . {pretty(phi.body)}"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Parser:
    def __init__(self, toks: list[tuple[str, str, int]], sig: Signature, text_len: int):
        self.toks = toks
        self.pos = 0
        self.sig = sig
        self.text_len = text_len

    def peek(self, k: int = 0):
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else (None, None, self.text_len)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, p = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val!r}", p)

    def error(self, msg: str):
        raise ParseError(msg, self.peek()[2])

    # -- grammar -----------------------------------------------------------

    def formula(self) -> Formula:
        left = self.or_level()
        if self.peek()[1] == "->":
            self.next()
            return Imp(left, self.formula())
        return left

    def or_level(self) -> Formula:
        left = self.and_level()
        while self.peek()[1] == "|":
            self.next()
            left = Or(left, self.and_level())
        return left

    def and_level(self) -> Formula:
        left = self.unary()
        while self.peek()[1] == "&":
            self.next()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        kind, val, p = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary())
        if val == "(":
            # Either a parenthesised formula or a parenthesised term
            # starting an atom; try formula first by lookahead on terms.
            save = self.pos
            try:
                self.next()
                f = self.formula()
                self.expect(")")
                return f
            except ParseError:
                self.pos = save
                return self.atom()
        if kind == "name" and val in ("E", "A") and self._is_quantifier():
            return self.quantifier()
        return self.atom()

    def _is_quantifier(self) -> bool:
        k1, v1, _ = self.peek(1)
        if k1 != "name" or not _is_var_name(v1):
            return False
        v2 = self.peek(2)[1]
        return v2 in (".", "<", "<=")

    def quantifier(self) -> Formula:
        _, q, _ = self.next()
        kind, var, p = self.next()
        if kind != "name" or not _is_var_name(var):
            raise ParseError("expected a variable after quantifier", p)
        nxt = self.next()
        if nxt[1] == ".":
            body = self.formula()
            return Forall(var, body) if q == "A" else Exists(var, body)
        if nxt[1] in ("<", "<="):
            strict = nxt[1] == "<"
            bk, bound, bp = self.next()
            if bk != "name" or not _is_var_name(bound):
                raise ParseError("expected a bound variable", bp)
            if bound == var:
                raise ParseError("bounded quantifier must use a distinct bound variable", bp)
            self.expect(".")
            body = self.formula()
            cls = BForall if q == "A" else BExists
            return cls(var, strict, bound, body)
        raise ParseError("expected '.' or a bound after quantified variable", nxt[2])

    def atom(self) -> Formula:
        kind, val, p = self.peek()
        if val == "bot":
            self.next()
            return BOT
        if val == "top":
            self.next()
            return TOP
        if kind == "name" and not _is_var_name(val):
            if self.sig.relation_arity(val) is not None:
                return self.relation_atom()
            if self.sig.function_arity(val) is None:
                raise ParseError(f"unknown symbol {val!r}", p)
        # zero, variable, function application or parenthesised term
        left = self.term()
        k2, v2, p2 = self.next()
        if v2 == "=":
            right = self.term()
            if left == ZERO and isinstance(right, Var) and self.sig.relation_arity("Z") == 1:
                return Rel("Z", (right,))
            return Eq(left, right)
        if v2 == "<":
            right = self.term()
            return Rel("<", (left, right))
        raise ParseError("expected '=' or '<' in atom", p2)

    def relation_atom(self) -> Formula:
        kind, name, p = self.next()
        arity = self.sig.relation_arity(name)
        if arity is None:
            raise ParseError(f"unknown relation symbol {name!r}", p)
        if name == "S" and arity == 2:
            # published form: S x = y
            first = self.term()
            self.expect("=")
            second = self.term()
            return Rel("S", (first, second))
        args = tuple(self.term() for _ in range(arity))
        return Rel(name, args)

    def term(self) -> Term:
        kind, val, p = self.next()
        if kind == "zero":
            return ZERO
        if kind == "name" and _is_var_name(val):
            return Var(val)
        if kind == "name" and self.sig.function_arity(val) is not None:
            self.expect("(")
            args = [self.term()]
            while self.peek()[1] == ",":  # no comma token; single-arg only
                self.next()
                args.append(self.term())
            self.expect(")")
            if len(args) != self.sig.function_arity(val):
                raise ParseError(f"arity mismatch for {val!r}", p)
            return App(val, tuple(args))
        if val == "(":
            left = self.term()
            k2, op, p2 = self.next()
            if op not in ("+", "*") and not (k2 == "name" and op in ("+", "*")):
                raise ParseError("expected '+' or '*' in term", p2)
            right = self.term()
            self.expect(")")
            return App(op, (left, right))
        raise ParseError(f"expected a term, found {val!r}", p)


def _is_var_name(name: str | None) -> bool:
    return bool(name) and name[0].islower() and name not in ("bot", "top")


def parse(text: str, sig: Signature = ARITH_REL) -> Formula:
    """Parse the published ASCII grammar into a formula tree."""
    toks = _tokenize_full(text)
    parser = _Parser(toks, sig, len(text))
    phi = parser.formula()
    if parser.pos != len(parser.toks):
        parser.error("trailing input after formula")
    _check_arities(phi, sig)
    return phi


def _tokenize_full(text: str) -> list[tuple[str, str, int]]:
    toks: list[tuple[str, str, int]] = []
    i = 0
    n = len(text)
    symbols = ("->", "<=", "(", ")", ".", "&", "|", "~", "=", "<", "+", "*", ",")
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        matched = False
        for sym in symbols:
            if text.startswith(sym, i):
                toks.append(("sym", sym, i))
                i += len(sym)
                matched = True
                break
        if matched:
            continue
        if c == "0":
            toks.append(("zero", "0", i))
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            toks.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    return toks


def _check_arities(phi: Formula, sig: Signature) -> None:
    def check_term(t: Term) -> None:
        if isinstance(t, Const):
            if t.name not in sig.constants:
                raise ParseError(f"unknown constant {t.name!r}", 0)
        elif isinstance(t, App):
            ar = sig.function_arity(t.func)
            if ar is None:
                raise ParseError(f"unknown function symbol {t.func!r}", 0)
            if ar != len(t.args):
                raise ParseError(f"arity mismatch for {t.func!r}", 0)
            for a in t.args:
                check_term(a)

    def go(f: Formula) -> None:
        if isinstance(f, Rel):
            ar = sig.relation_arity(f.name)
            if ar is None:
                raise ParseError(f"unknown relation symbol {f.name!r}", 0)
            if ar != len(f.args):
                raise ParseError(f"arity mismatch for {f.name!r}", 0)
            for a in f.args:
                check_term(a)
        elif isinstance(f, Eq):
            check_term(f.left)
            check_term(f.right)
        elif isinstance(f, Not):
            go(f.body)
        elif isinstance(f, (And, Or, Imp)):
            go(f.left)
            go(f.right)
        elif isinstance(f, (Forall, Exists, BForall, BExists)):
            go(f.body)

    go(phi)
