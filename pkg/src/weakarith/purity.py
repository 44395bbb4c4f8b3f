"""The pure formula grammars and normalisation into them.

Pure Delta_0 formulas are built from the atom shapes ``u < v``, ``0 = u``,
``S u = v``, ``A u v w``, ``M u v w`` (variables only), the propositional
connectives, and bounded quantifiers.  A pure Sigma_1 formula is a block of
existentials over a pure Delta_0 matrix; "pure 1-Sigma_1" means the block
is exactly one quantifier long.

``purify`` rewrites a Sigma_1-shaped formula (term atoms, connectives,
bounded quantifiers, positive existentials) into an equivalent pure
1-Sigma_1 form.  The rewrite preserves truth over the standard model:
term atoms are lowered to relation-graph atoms with fresh witnesses, and
the existential prefix is collapsed under a single leading quantifier
that bounds every inner witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .syntax import (
    BOT,
    TOP,
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
    FreshNames,
    Imp,
    Not,
    Or,
    Rel,
    Term,
    Top,
    Var,
    ZERO,
    all_var_names,
    lt,
)


class PurityError(ValueError):
    pass


_PURE_ARITIES = {"Z": 1, "S": 2, "A": 3, "M": 3, "<": 2}


def _pure_atom(phi: Formula) -> bool:
    return (
        isinstance(phi, Rel)
        and phi.name in _PURE_ARITIES
        and len(phi.args) == _PURE_ARITIES[phi.name]
        and all(isinstance(a, Var) for a in phi.args)
    )


def is_pure_delta0(phi: Formula) -> bool:
    """Decision procedure for the pure Delta_0 grammar."""
    if isinstance(phi, (Bot, Top)):
        return True
    if _pure_atom(phi):
        return True
    if isinstance(phi, Not):
        return is_pure_delta0(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        return is_pure_delta0(phi.left) and is_pure_delta0(phi.right)
    if isinstance(phi, (BForall, BExists)):
        return phi.var != phi.bound and is_pure_delta0(phi.body)
    return False


def is_pure_sigma1(phi: Formula) -> bool:
    while isinstance(phi, Exists):
        phi = phi.body
    return is_pure_delta0(phi)


def is_pure_1sigma1(phi: Formula) -> bool:
    return isinstance(phi, Exists) and is_pure_delta0(phi.body)


@dataclass(frozen=True)
class PurityCertificate:
    kind: Literal["delta0", "sigma1", "one_sigma1"]
    formula: Formula


def certify(phi: Formula) -> PurityCertificate:
    """Classify phi in the pure hierarchy or raise PurityError."""
    if is_pure_delta0(phi):
        return PurityCertificate("delta0", phi)
    if is_pure_1sigma1(phi):
        return PurityCertificate("one_sigma1", phi)
    if is_pure_sigma1(phi):
        return PurityCertificate("sigma1", phi)
    raise PurityError("formula is outside the pure grammar")


def check_certificate(cert: PurityCertificate) -> bool:
    """Re-verify a certificate against the grammar checkers only."""
    if cert.kind == "delta0":
        return is_pure_delta0(cert.formula)
    if cert.kind == "sigma1":
        return is_pure_sigma1(cert.formula)
    if cert.kind == "one_sigma1":
        return is_pure_1sigma1(cert.formula)
    return False


# ---------------------------------------------------------------------------
# Purification


def _graph_atom(func: str, arg_vars: tuple[Var, ...], out: Var) -> Rel:
    if func == "S":
        return Rel("S", (arg_vars[0], out))
    if func == "+":
        return Rel("A", (arg_vars[0], arg_vars[1], out))
    if func == "*":
        return Rel("M", (arg_vars[0], arg_vars[1], out))
    raise PurityError(f"no relational graph for function {func!r}")


def _lower_term(t: Term, fresh: FreshNames, atoms: list[Rel]) -> Var:
    """Reduce a term to a variable, pushing graph atoms for each application."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Const):
        if t != ZERO:
            raise PurityError(f"unknown constant {t.name!r}")
        v = Var(fresh.take("c"))
        atoms.append(Rel("Z", (v,)))
        return v
    arg_vars = tuple(_lower_term(a, fresh, atoms) for a in t.args)
    v = Var(fresh.take("c"))
    atoms.append(_graph_atom(t.func, arg_vars, v))
    return v


def _wrap_witnesses(atoms: list[Rel], body: Formula) -> Formula:
    """Close the graph-atom chain under existentials for its witnesses."""
    out = body
    for a in reversed(atoms):
        out = And(a, out)
    for a in reversed(atoms):
        v = a.args[-1]
        assert isinstance(v, Var)
        out = Exists(v.name, out)
    return out


def _lower_literal(atom: Formula, positive: bool, fresh: FreshNames) -> Formula:
    """Rewrite an atom or negated atom to pure form.

    Witnesses for term values come out as positive existentials even under
    negation; over the standard model the graphs are total and functional,
    so the witness is unique and truth is preserved.
    """
    atoms: list[Rel] = []
    if isinstance(atom, Eq):
        left, right = atom.left, atom.right
        if isinstance(right, App) and not isinstance(left, App):
            left, right = right, left
        if isinstance(left, App):
            arg_vars = tuple(_lower_term(a, fresh, atoms) for a in left.args)
            out = _lower_term(right, fresh, atoms)
            core: Formula = _graph_atom(left.func, arg_vars, out)
        elif left == ZERO or right == ZERO:
            other = right if left == ZERO else left
            v = _lower_term(other, fresh, atoms)
            core = Rel("Z", (v,))
        else:
            # variable-variable equality: render through the order relation
            u = _lower_term(left, fresh, atoms)
            v = _lower_term(right, fresh, atoms)
            if positive:
                body: Formula = And(Not(lt(u, v)), Not(lt(v, u)))
            else:
                body = Or(lt(u, v), lt(v, u))
            return _wrap_witnesses(atoms, body)
    elif isinstance(atom, Rel):
        if atom.name in _PURE_ARITIES and len(atom.args) == _PURE_ARITIES[atom.name]:
            arg_vars = tuple(_lower_term(a, fresh, atoms) for a in atom.args)
            core = Rel(atom.name, arg_vars)
        else:
            raise PurityError(f"non-arithmetical atom {atom.name!r}")
    else:
        raise PurityError(f"not an atom: {atom!r}")
    return _wrap_witnesses(atoms, core if positive else Not(core))


def _normalize(phi: Formula, fresh: FreshNames, positive: bool) -> Formula:
    """Push negations to literals and lower impure atoms.

    Pure Delta_0 subformulas are kept verbatim.  Unbounded existentials must
    end up positive; a universal surviving in positive position is rejected.
    """
    if is_pure_delta0(phi):
        return phi if positive else Not(phi)
    if isinstance(phi, Bot):
        return TOP if not positive else BOT
    if isinstance(phi, Top):
        return TOP if positive else BOT
    if isinstance(phi, (Rel, Eq)):
        return _lower_literal(phi, positive, fresh)
    if isinstance(phi, Not):
        return _normalize(phi.body, fresh, not positive)
    if isinstance(phi, And):
        cls = And if positive else Or
        return cls(_normalize(phi.left, fresh, positive), _normalize(phi.right, fresh, positive))
    if isinstance(phi, Or):
        cls = Or if positive else And
        return cls(_normalize(phi.left, fresh, positive), _normalize(phi.right, fresh, positive))
    if isinstance(phi, Imp):
        if positive:
            return Or(_normalize(phi.left, fresh, False), _normalize(phi.right, fresh, True))
        return And(_normalize(phi.left, fresh, True), _normalize(phi.right, fresh, False))
    if isinstance(phi, Exists):
        if not positive:
            raise PurityError("unbounded universal quantifier (negated existential)")
        return Exists(phi.var, _normalize(phi.body, fresh, True))
    if isinstance(phi, Forall):
        if positive:
            raise PurityError("unbounded universal quantifier")
        return Exists(phi.var, _normalize(phi.body, fresh, False))
    if isinstance(phi, (BForall, BExists)):
        if positive:
            cls2: type = type(phi)
        else:
            cls2 = BExists if isinstance(phi, BForall) else BForall
        return cls2(phi.var, phi.strict, phi.bound, _normalize(phi.body, fresh, positive))
    raise TypeError(f"not a formula: {phi!r}")


def _bound_existentials(phi: Formula, top: str) -> Formula:
    """Replace every positive unbounded (E x . body) by (E x < top . body)."""
    if isinstance(phi, Exists):
        return BExists(phi.var, True, top, _bound_existentials(phi.body, top))
    if isinstance(phi, (And, Or)):
        return type(phi)(_bound_existentials(phi.left, top), _bound_existentials(phi.right, top))
    if isinstance(phi, (BForall, BExists)):
        return type(phi)(phi.var, phi.strict, phi.bound, _bound_existentials(phi.body, top))
    # remaining nodes are pure Delta_0 subtrees (incl. Not/Imp) or atoms
    return phi


def purify(phi: Formula) -> tuple[Formula, PurityCertificate]:
    """Rewrite a Sigma_1-shaped formula to certified pure 1-Sigma_1 form.

    Already-pure 1-Sigma_1 input is returned unchanged.  The result is
    truth-equivalent to the input over the standard model.
    """
    if is_pure_1sigma1(phi):
        return phi, PurityCertificate("one_sigma1", phi)
    fresh = FreshNames(all_var_names(phi))
    norm = _normalize(phi, fresh, True)
    top = fresh.take("w")
    matrix = _bound_existentials(norm, top)
    out = Exists(top, matrix)
    if not is_pure_1sigma1(out):
        raise PurityError("purification failed to reach the pure grammar")
    return out, PurityCertificate("one_sigma1", out)
