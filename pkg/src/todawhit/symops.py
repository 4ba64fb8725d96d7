"""First-order differential operators with symbolic coefficients.

An operator is a0(v) + sum_j a_j(v) d/dv_j with sympy-expression
coefficients.  Commutators of first-order operators are again first-order
and are computed exactly; application to a symbolic function uses exact
differentiation, so pointwise residual checks are limited only by machine
rounding of the final evaluation.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, Mapping, Sequence

import sympy as sp


class FirstOrderOp:
    __slots__ = ("a0", "terms")

    def __init__(self, a0=0, terms: Mapping[sp.Symbol, sp.Expr] | None = None):
        self.a0 = sp.sympify(a0)
        self.terms: Dict[sp.Symbol, sp.Expr] = {}
        if terms:
            for v, c in terms.items():
                c = sp.sympify(c)
                if c != 0:
                    self.terms[v] = c

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "FirstOrderOp") -> "FirstOrderOp":
        out = dict(self.terms)
        for v, c in other.terms.items():
            out[v] = out.get(v, sp.S.Zero) + c
        return FirstOrderOp(self.a0 + other.a0, out)

    def __sub__(self, other: "FirstOrderOp") -> "FirstOrderOp":
        return self + other.scale(-1)

    def scale(self, c) -> "FirstOrderOp":
        c = sp.sympify(c)
        return FirstOrderOp(c * self.a0, {v: c * a for v, a in self.terms.items()})

    def mul_left(self, func) -> "FirstOrderOp":
        """Multiplication by a function from the left: (f A)."""
        f = sp.sympify(func)
        return FirstOrderOp(f * self.a0, {v: f * a for v, a in self.terms.items()})

    # -- action --------------------------------------------------------------

    def apply(self, f: sp.Expr) -> sp.Expr:
        out = self.a0 * f
        for v, c in self.terms.items():
            out += c * sp.diff(f, v)
        return out

    def commutator(self, other: "FirstOrderOp") -> "FirstOrderOp":
        """[self, other], exact; coefficients merged without simplification."""
        a0, b0 = self.a0, other.a0
        terms: Dict[sp.Symbol, sp.Expr] = {}
        zero = sp.S.Zero
        for v, a in self.terms.items():
            zero += a * sp.diff(b0, v)
        for v, b in other.terms.items():
            zero -= b * sp.diff(a0, v)
        for w, b in other.terms.items():
            acc = sp.S.Zero
            for v, a in self.terms.items():
                acc += a * sp.diff(b, v)
            if acc != 0:
                terms[w] = terms.get(w, sp.S.Zero) + acc
        for w, a in self.terms.items():
            acc = sp.S.Zero
            for v, b in other.terms.items():
                acc += b * sp.diff(a, v)
            if acc != 0:
                terms[w] = terms.get(w, sp.S.Zero) - acc
        return FirstOrderOp(zero, terms)

    # -- evaluation ----------------------------------------------------------

    def coeff_functions(self, variables: Sequence[sp.Symbol]) -> Callable:
        """Lambdified (a0, a_1..a_m) evaluator over the given variables."""
        exprs = [self.a0] + [self.terms.get(v, sp.S.Zero) for v in variables]
        return sp.lambdify(variables, exprs, modules="numpy")

    def substitute(self, mapping: Mapping[sp.Symbol, sp.Expr]) -> "FirstOrderOp":
        """Substitute into the coefficients only (no variable change)."""
        return FirstOrderOp(
            self.a0.xreplace(dict(mapping)),
            {v: c.xreplace(dict(mapping)) for v, c in self.terms.items()},
        )

    def __repr__(self):  # pragma: no cover
        parts = [f"({self.a0})"] if self.a0 != 0 else []
        parts += [f"({c}) d/d{v}" for v, c in self.terms.items()]
        return " + ".join(parts) if parts else "0"


def pullback(op: FirstOrderOp, forward: Mapping[sp.Symbol, sp.Expr],
             inverse_grads: Mapping[sp.Symbol, Mapping[sp.Symbol, sp.Expr]]) -> FirstOrderOp:
    """Express an operator in new coordinates.

    ``forward`` maps old variables y to expressions in the new variables;
    ``inverse_grads[b][y]`` is d(new_b)/d(old_y) as an expression in the old
    variables.  Both are composed symbolically.
    """
    sub = dict(forward)
    a0 = op.a0.xreplace(sub)
    terms: Dict[sp.Symbol, sp.Expr] = {}
    for y, a in op.terms.items():
        a_new = a.xreplace(sub)
        for b, grads in inverse_grads.items():
            g = grads.get(y, sp.S.Zero)
            if g == 0:
                continue
            terms[b] = terms.get(b, sp.S.Zero) + a_new * g.xreplace(sub)
    return FirstOrderOp(a0, terms)
