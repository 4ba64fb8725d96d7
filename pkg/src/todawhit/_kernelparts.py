"""Shared exponent fragments for recursion/intertwiner/Baxter kernels.

Each builder returns (lin, exp, lse) term lists over the supplied variable
names:

* lin:  (complex coeff, {var: coef}, const)      ->  coeff * (form)
* exp:  (positive scale, {var: coef}, const)     ->  -scale * e^(form)
* lse:  (complex coeff, form_a, const_a, form_b, const_b)
                                                 ->  coeff * log(e^a + e^b)

The minus sign on exponential terms is applied by the consumer, so every
scale here is positive and decay bookkeeping stays trivial.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

Form = Dict[str, float]
LinT = Tuple[complex, Form, float]
ExpT = Tuple[float, Form, float]
LseT = Tuple[complex, Form, float, Form, float]


def _form(*pairs) -> Form:
    out: Dict[str, float] = {}
    for var, c in pairs:
        out[var] = out.get(var, 0.0) + c
        if out[var] == 0.0:
            del out[var]
    return out


def _sumform(plus: Sequence[str] = (), minus: Sequence[str] = (), scale_plus=1.0) -> Form:
    pairs = [(v, scale_plus) for v in plus] + [(v, -1.0) for v in minus]
    return _form(*pairs)


def chain_terms(upper: Sequence[str], lower: Sequence[str]) -> List[ExpT]:
    """e^{lower_i - upper_i} + e^{upper_{i+1} - lower_i} down a GL-type path."""
    out: List[ExpT] = []
    for i in range(len(lower)):
        out.append((1.0, _form((lower[i], 1.0), (upper[i], -1.0)), 0.0))
        if i + 1 < len(upper):
            out.append((1.0, _form((upper[i + 1], 1.0), (lower[i], -1.0)), 0.0))
    return out


def glrec_terms(x: Sequence[str], y: Sequence[str], lam: float):
    """GL recursion kernel: |x| = n+1 over |y| = n."""
    if len(x) != len(y) + 1:
        raise ValueError("GL recursion kernel needs |x| = |y| + 1")
    lin: List[LinT] = [(1j * lam, _form(*[(v, 1.0) for v in x], *[(v, -1.0) for v in y]), 0.0)]
    exp: List[ExpT] = []
    for i in range(len(y)):
        exp.append((1.0, _form((y[i], 1.0), (x[i], -1.0)), 0.0))
        exp.append((1.0, _form((x[i + 1], 1.0), (y[i], -1.0)), 0.0))
    return lin, exp, []


def glrec_mod_terms(x: Sequence[str], y: Sequence[str], lam: float):
    """e^{i lam y_last}-dressed GL recursion kernel; |x| = |y| = n+1."""
    lin, exp, lse = glrec_terms(x, y[:-1], lam)
    lin = lin + [(1j * lam, _form((y[-1], 1.0)), 0.0)]
    return lin, exp, lse


def glaff_terms(x: Sequence[str], y: Sequence[str], lam: float, g: float):
    if len(x) != len(y):
        raise ValueError("affine kernel needs |x| = |y|")
    n = len(x)
    lin: List[LinT] = [(1j * lam, _form(*[(v, 1.0) for v in x], *[(v, -1.0) for v in y]), 0.0)]
    exp: List[ExpT] = []
    for i in range(n - 1):
        exp.append((1.0, _form((x[i], 1.0), (y[i], -1.0)), 0.0))
        exp.append((1.0, _form((y[i + 1], 1.0), (x[i], -1.0)), 0.0))
    exp.append((1.0, _form((x[n - 1], 1.0), (y[n - 1], -1.0)), 0.0))
    if g:
        exp.append((g, _form((y[0], 1.0), (x[n - 1], -1.0)), 0.0))
    return lin, exp, []


def bbc_terms(x: Sequence[str], z: Sequence[str]):
    """Elementary intertwiner B_n over BC_n: |x| = |z| = n."""
    n = len(x)
    if len(z) != n:
        raise ValueError("B/BC intertwiner needs |x| = |z|")
    exp: List[ExpT] = [(0.5, _form((z[0], 1.0)), 0.0)]
    for i in range(n - 1):
        exp.append((1.0, _form((x[i], 1.0), (z[i], -1.0)), 0.0))
        exp.append((1.0, _form((z[i + 1], 1.0), (x[i], -1.0)), 0.0))
    exp.append((1.0, _form((x[n - 1], 1.0), (z[n - 1], -1.0)), 0.0))
    return [], exp, []


def bcb_terms(z: Sequence[str], xlow: Sequence[str]):
    """Elementary intertwiner BC_n over B_{n-1}: |z| = n, |xlow| = n-1."""
    n = len(z)
    if len(xlow) != n - 1:
        raise ValueError("BC/B intertwiner needs |xlow| = |z| - 1")
    exp: List[ExpT] = [(0.5, _form((z[0], 1.0)), 0.0)]
    for i in range(n - 1):
        exp.append((1.0, _form((xlow[i], 1.0), (z[i], -1.0)), 0.0))
        exp.append((1.0, _form((z[i + 1], 1.0), (xlow[i], -1.0)), 0.0))
    return [], exp, []


def cd_terms(z: Sequence[str], x: Sequence[str]):
    """Elementary intertwiner C_n over D_n: |z| = |x| = n."""
    n = len(z)
    if len(x) != n:
        raise ValueError("C/D intertwiner needs |z| = |x|")
    exp: List[ExpT] = [(1.0, _form((x[0], 1.0), (z[0], 1.0)), 0.0)]
    for i in range(n - 1):
        exp.append((1.0, _form((z[i], 1.0), (x[i], -1.0)), 0.0))
        exp.append((1.0, _form((x[i + 1], 1.0), (z[i], -1.0)), 0.0))
    exp.append((1.0, _form((z[n - 1], 1.0), (x[n - 1], -1.0)), 0.0))
    return [], exp, []


def dc_terms(x: Sequence[str], zlow: Sequence[str]):
    """Elementary intertwiner D_n over C_{n-1}: |x| = n, |zlow| = n-1."""
    n = len(x)
    if len(zlow) != n - 1:
        raise ValueError("D/C intertwiner needs |zlow| = |x| - 1")
    exp: List[ExpT] = [(1.0, _form((x[0], 1.0), (zlow[0], 1.0)), 0.0)]
    for i in range(n - 1):
        exp.append((1.0, _form((zlow[i], 1.0), (x[i], -1.0)), 0.0))
        if i + 1 < n:
            exp.append((1.0, _form((x[i + 1], 1.0), (zlow[i], -1.0)), 0.0))
    return [], exp, []


def brec_terms(x: Sequence[str], y: Sequence[str], z: Sequence[str], lam: float):
    """Composite B recursion kernel level n: x(n), y(n-1), inner z(n)."""
    n = len(x)
    if n == 1:
        lin = [(1j * lam, _form((x[0], 1.0), (z[0], -2.0)), 0.0)]
        exp = [
            (1.0, _form((z[0], 1.0)), 0.0),
            (1.0, _form((x[0], 1.0), (z[0], -1.0)), 0.0),
        ]
        return lin, exp, []
    lin_form = _form(
        *[(v, 1.0) for v in x],
        (z[0], 2.0),
        *[(v, -2.0) for v in z[1:]],
        *[(v, 1.0) for v in y],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [(2j * lam, _form((x[0], 1.0)), 0.0, _form((y[0], 1.0)), 0.0)]
    _, e1, _ = bbc_terms(x, z)
    _, e2, _ = bcb_terms(z, y)
    return lin, e1 + e2, lse


def crec_terms(zu: Sequence[str], zd: Sequence[str], x: Sequence[str], lam: float):
    """Composite C recursion kernel level n: zu(n), zd(n-1), inner x(n)."""
    n = len(zu)
    if n == 1:
        lin = [(1j * lam, _form((x[0], 1.0)), 0.0)]
        exp = [
            (1.0, _form((x[0], 1.0), (zu[0], 1.0)), 0.0),
            (1.0, _form((zu[0], 1.0), (x[0], -1.0)), 0.0),
        ]
        return lin, exp, []
    lin_form = _form(
        *[(v, 1.0) for v in zu],
        (x[0], -1.0),
        *[(v, -2.0) for v in x[1:]],
        *[(v, 1.0) for v in zd],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [(1j * lam, _form((zu[0], 1.0)), 0.0, _form((zd[0], 1.0)), 0.0)]
    _, e1, _ = cd_terms(zu, x)
    _, e2, _ = dc_terms(x, zd)
    return lin, e1 + e2, lse


def drec_terms(x: Sequence[str], y: Sequence[str], z: Sequence[str], lam: float):
    """Composite D recursion kernel level n: x(n), y(n-1), inner z(n-1)."""
    n = len(x)
    if n == 1:
        return [(1j * lam, _form((x[0], 1.0)), 0.0)], [], []
    lin_form = _form(
        *[(v, 1.0) for v in x],
        *[(v, -2.0) for v in z],
        *[(v, 1.0) for v in y],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [(2j * lam, _form((x[0], 1.0)), 0.0, _form((y[0], 1.0)), 0.0)]
    _, e1, _ = dc_terms(x, z)
    _, e2, _ = cd_terms(z, y)
    return lin, e1 + e2, lse


def _affine_side(kind: str, v: Sequence[str], z: Sequence[str], g: float) -> List[ExpT]:
    """One wing of an affine Baxter kernel (the other wing is symmetric).

    ``v`` are the kernel arguments, ``z`` the inner variables.  Each wing is
    the corresponding elementary intertwiner with the winding g-term added.
    """
    n = len(v)
    exp: List[ExpT]
    if kind == "B":
        exp = [(0.5, _form((z[0], 1.0)), 0.0)]
        for i in range(n - 1):
            exp.append((1.0, _form((v[i], 1.0), (z[i], -1.0)), 0.0))
            exp.append((1.0, _form((z[i + 1], 1.0), (v[i], -1.0)), 0.0))
        exp.append((1.0, _form((v[n - 1], 1.0), (z[n - 1], -1.0)), 0.0))
        exp.append((g, _form((v[n - 1], -1.0), (z[n - 1], -1.0)), 0.0))
    elif kind == "C":
        exp = cd_terms(v, z)[1]
        exp.append((g, _form((v[n - 1], -1.0), (z[n - 1], -1.0)), 0.0))
    elif kind == "D":
        exp = dc_terms(v, z)[1]
        exp.append((g, _form((v[n - 1], -1.0), (z[n - 2], -1.0)), 0.0))
    else:  # pragma: no cover
        raise ValueError(kind)
    return exp


def b1aff_terms(x: Sequence[str], y: Sequence[str], z: Sequence[str], lam: float, g: float):
    n = len(x)
    lin_form = _form(
        *[(v, 1.0) for v in x],
        (z[0], 2.0),
        *[(v, -2.0) for v in z[1:]],
        *[(v, 1.0) for v in y],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [
        (2j * lam, _form((x[0], 1.0)), 0.0, _form((y[0], 1.0)), 0.0),
        (-2j * lam, _form((x[n - 1], -1.0)), 0.0, _form((y[n - 1], -1.0)), 0.0),
    ]
    exp = _affine_side("B", x, z, g) + _affine_side("B", y, z, g)
    return lin, exp, lse


def a2aff_terms(zv: Sequence[str], y: Sequence[str], x: Sequence[str], lam: float, g: float):
    n = len(zv)
    lin_form = _form(
        *[(v, 1.0) for v in zv],
        (x[0], -1.0),
        *[(v, -2.0) for v in x[1:]],
        *[(v, 1.0) for v in y],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [
        (1j * lam, _form((zv[0], 1.0)), 0.0, _form((y[0], 1.0)), 0.0),
        (-2j * lam, _form((zv[n - 1], -1.0)), 0.0, _form((y[n - 1], -1.0)), 0.0),
    ]
    exp = _affine_side("C", zv, x, g) + _affine_side("C", y, x, g)
    return lin, exp, lse


def d1aff_terms(x: Sequence[str], y: Sequence[str], z: Sequence[str], lam: float, g: float):
    n = len(x)
    lin_form = _form(
        *[(v, 1.0) for v in x],
        *[(v, -2.0) for v in z],
        *[(v, 1.0) for v in y],
    )
    lin = [(-1j * lam, lin_form, 0.0)]
    lse: List[LseT] = [
        (2j * lam, _form((x[0], 1.0)), 0.0, _form((y[0], 1.0)), 0.0),
        (-2j * lam, _form((x[n - 1], -1.0)), 0.0, _form((y[n - 1], -1.0)), 0.0),
    ]
    exp = _affine_side("D", x, z, g) + _affine_side("D", y, z, g)
    return lin, exp, lse
