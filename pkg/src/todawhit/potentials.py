"""Potential functions of the integral representations, and their diagrams.

A :class:`Potential` is a sum of linear terms c*(form), exponential terms
-s*e^(form) with s > 0, and log-sum-exp terms q*log(e^a + e^b) (the
(e^a + e^b)^q spectral prefactors, never expanded).  Exponentiating a
potential gives every integrand and kernel in the package.

The Givental-type potentials are assembled from the recursion-kernel
exponents (the normative route); the factorized-chart potentials are
assembled from the weight-exponent tables and the Delta'/Delta closed
forms, so no per-family integrand is transcribed twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from . import _kernelparts as kp
from . import melements as me
from .rootdata import Family, build, param_counts, vdot

Form = Dict[str, float]


@dataclass(frozen=True)
class LinTerm:
    coeff: complex
    form: Form
    const: float = 0.0


@dataclass(frozen=True)
class ExpTerm:
    scale: float  # contributes -scale * exp(form + const)
    form: Form
    const: float = 0.0


@dataclass(frozen=True)
class LseTerm:
    coeff: complex
    form_a: Form
    const_a: float
    form_b: Form
    const_b: float


@dataclass
class Potential:
    internal: Tuple[str, ...]
    external: Tuple[str, ...]
    lin: List[LinTerm] = field(default_factory=list)
    exp: List[ExpTerm] = field(default_factory=list)
    lse: List[LseTerm] = field(default_factory=list)

    # -- evaluation ---------------------------------------------------------

    def value(self, point: Mapping[str, float]) -> complex:
        def ev(form: Form, const: float) -> float:
            return const + sum(c * point[v] for v, c in form.items())

        out = 0.0 + 0.0j
        for t in self.lin:
            out += t.coeff * ev(t.form, t.const)
        for t in self.exp:
            out -= t.scale * math.exp(ev(t.form, t.const))
        for t in self.lse:
            out += t.coeff * math.log(
                math.exp(ev(t.form_a, t.const_a)) + math.exp(ev(t.form_b, t.const_b))
            )
        return out

    # -- binding external variables -----------------------------------------

    def bind(self, external_values: Mapping[str, float]) -> "BoundPotential":
        missing = [v for v in self.external if v not in external_values]
        if missing:
            raise ValueError(f"missing external values: {missing}")
        return BoundPotential(self, dict(external_values))

    # -- decay bookkeeping ---------------------------------------------------

    def decay_certificate(self) -> bool:
        """Every internal variable has exponential growth in both directions."""
        for v in self.internal:
            pos = any(t.form.get(v, 0.0) > 0 for t in self.exp)
            neg = any(t.form.get(v, 0.0) < 0 for t in self.exp)
            if not (pos and neg):
                return False
        return True

    def zero_spectrum(self) -> "Potential":
        return Potential(self.internal, self.external, [], list(self.exp), [])


class BoundPotential:
    """Potential with the external variables folded into term constants."""

    def __init__(self, pot: Potential, ext: Dict[str, float]):
        self.vars: Tuple[str, ...] = pot.internal
        idx = {v: j for j, v in enumerate(self.vars)}
        m = len(self.vars)

        def split(form: Form, const: float):
            row = np.zeros(m)
            c = const
            for v, coef in form.items():
                if v in idx:
                    row[idx[v]] = coef
                else:
                    c += coef * ext[v]
            return row, c

        self.exp_rows = np.zeros((len(pot.exp), m))
        self.exp_scales = np.zeros(len(pot.exp))
        for k, t in enumerate(pot.exp):
            row, c = split(t.form, t.const)
            self.exp_rows[k] = row
            self.exp_scales[k] = t.scale * math.exp(c)
        self.lin_row = np.zeros(m, dtype=complex)
        self.lin_const = 0.0 + 0.0j
        for t in pot.lin:
            row, c = split(t.form, t.const)
            self.lin_row += t.coeff * row
            self.lin_const += t.coeff * c
        self.lse_coeffs = np.array([t.coeff for t in pot.lse], dtype=complex)
        self.lse_a_rows = np.zeros((len(pot.lse), m))
        self.lse_a_scales = np.zeros(len(pot.lse))
        self.lse_b_rows = np.zeros((len(pot.lse), m))
        self.lse_b_scales = np.zeros(len(pot.lse))
        for k, t in enumerate(pot.lse):
            row, c = split(t.form_a, t.const_a)
            self.lse_a_rows[k] = row
            self.lse_a_scales[k] = math.exp(c)
            row, c = split(t.form_b, t.const_b)
            self.lse_b_rows[k] = row
            self.lse_b_scales[k] = math.exp(c)

    # real part (decay) and complex value at a point -------------------------

    def re_value(self, x: np.ndarray) -> float:
        out = float(self.lin_const.real + self.lin_row.real @ x)
        if self.exp_scales.size:
            out -= float(self.exp_scales @ np.exp(self.exp_rows @ x))
        for k in range(self.lse_coeffs.size):
            q = self.lse_coeffs[k].real
            if q:
                a = self.lse_a_scales[k] * math.exp(float(self.lse_a_rows[k] @ x))
                b = self.lse_b_scales[k] * math.exp(float(self.lse_b_rows[k] @ x))
                out += q * math.log(a + b)
        return out

    def re_grad(self, x: np.ndarray) -> np.ndarray:
        g = self.lin_row.real.copy()
        if self.exp_scales.size:
            w = self.exp_scales * np.exp(self.exp_rows @ x)
            g = g - w @ self.exp_rows
        for k in range(self.lse_coeffs.size):
            q = self.lse_coeffs[k].real
            if q:
                a = self.lse_a_scales[k] * math.exp(float(self.lse_a_rows[k] @ x))
                b = self.lse_b_scales[k] * math.exp(float(self.lse_b_rows[k] @ x))
                g = g + q * (a * self.lse_a_rows[k] + b * self.lse_b_rows[k]) / (a + b)
        return g

    def value(self, x: np.ndarray) -> complex:
        out = self.lin_const + complex(self.lin_row @ x)
        if self.exp_scales.size:
            out -= float(self.exp_scales @ np.exp(self.exp_rows @ x))
        for k in range(self.lse_coeffs.size):
            a = self.lse_a_scales[k] * math.exp(float(self.lse_a_rows[k] @ x))
            b = self.lse_b_scales[k] * math.exp(float(self.lse_b_rows[k] @ x))
            out += self.lse_coeffs[k] * math.log(a + b)
        return complex(out)


# ---------------------------------------------------------------------------
# assembly helpers


def _assemble(internal, external, parts) -> Potential:
    pot = Potential(tuple(internal), tuple(external))
    for lin, exp, lse in parts:
        for coeff, form, const in lin:
            pot.lin.append(LinTerm(coeff, dict(form), const))
        for scale, form, const in exp:
            if scale:
                pot.exp.append(ExpTerm(scale, dict(form), const))
        for coeff, fa, ca, fb, cb in lse:
            pot.lse.append(LseTerm(coeff, dict(fa), ca, dict(fb), cb))
    return pot


def vname(prefix: str, k: int, i: int) -> str:
    return f"{prefix}_{k}_{i}"


def _layer(prefix: str, k: int, count: int) -> List[str]:
    return [vname(prefix, k, i) for i in range(1, count + 1)]


# ---------------------------------------------------------------------------
# Givental-type (modified-chart) potentials via kernel products


def potential(family: Family | str, rank: int, lam: Sequence[float]) -> Potential:
    """Potential of the Givental-type representation (kernel-product form).

    External variables are the top layer (x_{rank,.} for A/B/D as x_{rank+1}
    for A; z_{rank,.} for C).
    """
    family = Family(family)
    l = rank
    parts = []
    if family is Family.A:
        if len(lam) != l + 1:
            raise ValueError("family A needs rank+1 spectral parameters")
        layers = {k: _layer("x", k, k) for k in range(1, l + 2)}
        parts.append(([(1j * lam[0], {layers[1][0]: 1.0}, 0.0)], [], []))
        for k in range(2, l + 2):
            parts.append(kp.glrec_terms(layers[k], layers[k - 1], lam[k - 1]))
        internal = [v for k in range(1, l + 1) for v in layers[k]]
        external = layers[l + 1]
        return _assemble(internal, external, parts)
    if len(lam) != l:
        raise ValueError("need rank spectral parameters")
    if family is Family.B:
        if l < 1:
            raise ValueError("family B needs rank >= 1")
        xl = {k: _layer("x", k, k) for k in range(1, l + 1)}
        zl = {k: _layer("z", k, k) for k in range(1, l + 1)}
        parts.append(kp.brec_terms(xl[1], [], zl[1], lam[0]))
        for k in range(2, l + 1):
            parts.append(kp.brec_terms(xl[k], xl[k - 1], zl[k], lam[k - 1]))
        internal = [v for k in range(1, l) for v in xl[k]]
        internal += [v for k in range(1, l + 1) for v in zl[k]]
        return _assemble(internal, xl[l], parts)
    if family is Family.C:
        if l < 1:
            raise ValueError("family C needs rank >= 1")
        zl = {k: _layer("z", k, k) for k in range(1, l + 1)}
        xl = {k: _layer("x", k, k) for k in range(1, l + 1)}
        parts.append(kp.crec_terms(zl[1], [], xl[1], lam[0]))
        for k in range(2, l + 1):
            parts.append(kp.crec_terms(zl[k], zl[k - 1], xl[k], lam[k - 1]))
        internal = [v for k in range(1, l) for v in zl[k]]
        internal += [v for k in range(1, l + 1) for v in xl[k]]
        return _assemble(internal, zl[l], parts)
    # D
    if l < 1:
        raise ValueError("family D needs rank >= 1")
    xl = {k: _layer("x", k, k) for k in range(1, l + 1)}
    zl = {k: _layer("z", k, k) for k in range(1, l)}
    parts.append(kp.drec_terms(xl[1], [], [], lam[0]))
    for k in range(2, l + 1):
        parts.append(kp.drec_terms(xl[k], xl[k - 1], zl[k - 1], lam[k - 1]))
    internal = [v for k in range(1, l) for v in xl[k]]
    internal += [v for k in range(1, l) for v in zl[k]]
    return _assemble(internal, xl[l], parts)


# ---------------------------------------------------------------------------
# factorized-chart potentials from the matrix-element tables


def potential_factorized(family: Family | str, rank: int, lam: Sequence[float]) -> Potential:
    """Exponent of the factorized-chart integrand in u = log y variables.

    External variables t_1..t_d are the Toda coordinates; the spectral
    monomials enter as linear terms i<lam, alpha_k^vee> log Delta_k(y).
    """
    family = Family(family)
    rs = build(family, rank)
    d = rank + 1 if family is Family.A else rank
    if len(lam) != d:
        raise ValueError("spectral parameter length mismatch")
    counts = param_counts(family, rank)
    uvar = {
        (i + 1, n + 1): f"u_{i + 1}_{n + 1}"
        for i, c in enumerate(counts)
        for n in range(c)
    }
    ext = [f"t_{i}" for i in range(1, d + 1)]
    pot = Potential(tuple(uvar[k] for k in sorted(uvar)), tuple(ext))

    # e^{i <lam, x>} prefactor
    pot.lin.append(LinTerm(1j, {ext[i]: float(lam[i]) for i in range(d)}))

    # spectral monomials: sum_k i <lam, alpha_k^vee> * sum_j e_{kj} u_j
    table = me.weight_exponent_table(rs)
    for k in range(rank):
        pairing = float(
            sum(
                lam[j] * float(rs.simple_coroots[k][j])
                for j in range(rs.epsilon_dim)
            )
        )
        form = {
            uvar[lbl]: float(e)
            for lbl, e in zip(table.labels, table.exponents[k])
            if e
        }
        if form:
            pot.lin.append(LinTerm(1j * pairing, form))

    # -sum_k Delta'_k / Delta_k
    for k in range(1, rank + 1):
        for mono, coeff in me.delta_prime_ratio_monomials(rs, k).items():
            form = {uvar[key]: float(e) for key, e in mono}
            pot.exp.append(ExpTerm(float(coeff), form))

    # -sum_i e^{<alpha_i, t>} sum_n y_{i,n}
    for i in range(1, rank + 1):
        alpha = rs.simple_roots[i - 1]
        ext_form = {ext[j]: float(alpha[j]) for j in range(d) if alpha[j] != 0}
        for n in range(1, counts[i - 1] + 1):
            form = dict(ext_form)
            form[uvar[(i, n)]] = 1.0
            pot.exp.append(ExpTerm(1.0, form))
    return pot


# ---------------------------------------------------------------------------
# diagrams


@dataclass(frozen=True)
class Arrow:
    kind: str  # "plain" | "source" | "cross"
    tail: str | None
    head: str
    form: Tuple[Tuple[str, float], ...]  # exponent of the assigned weight


@dataclass
class GiventalDiagram:
    family: Family
    rank: int
    vertices: Tuple[str, ...]
    external: Tuple[str, ...]
    arrows: Tuple[Arrow, ...]


def diagram(family: Family | str, rank: int) -> GiventalDiagram:
    """Oriented diagram whose arrow-sum is the zero-spectrum potential."""
    family = Family(family)
    lam = [0.0] * (rank + 1 if family is Family.A else rank)
    pot = potential(family, rank, lam)
    seen: Dict[Tuple[Tuple[str, float], ...], float] = {}
    for t in pot.exp:
        key = tuple(sorted(t.form.items()))
        seen[key] = seen.get(key, 0.0) + t.scale
    arrows = []
    for key, scale in sorted(seen.items()):
        form = dict(key)
        plus = [v for v, c in form.items() if c > 0]
        minus = [v for v, c in form.items() if c < 0]
        if len(plus) == 1 and not minus:
            arrows.append(Arrow("source", None, plus[0], key))
        elif len(plus) == 1 and len(minus) == 1:
            arrows.append(Arrow("plain", minus[0], plus[0], key))
        elif len(plus) == 2 and not minus:
            a, b = sorted(plus)
            arrows.append(Arrow("cross", a, b, key))
        else:  # pragma: no cover
            raise AssertionError(f"unexpected arrow form {form}")
    return GiventalDiagram(
        family,
        rank,
        tuple(sorted(set(pot.internal) | set(pot.external))),
        tuple(pot.external),
        tuple(arrows),
    )


def emit_dot(diag: GiventalDiagram) -> str:
    """Deterministic DOT rendering; cross edges dashed, sources from a dot."""
    lines = [f'digraph "{diag.family.value}{diag.rank}" {{']
    for v in diag.vertices:
        shape = "doublecircle" if v in diag.external else "circle"
        lines.append(f'  "{v}" [shape={shape}];')
    n_src = 0
    for a in diag.arrows:
        if a.kind == "source":
            n_src += 1
            src = f"src{n_src}"
            lines.append(f'  "{src}" [shape=point, label="o"];')
            lines.append(f'  "{src}" -> "{a.head}";')
        elif a.kind == "plain":
            lines.append(f'  "{a.tail}" -> "{a.head}";')
        else:
            lines.append(f'  "{a.tail}" -> "{a.head}" [style=dashed, label="x", dir=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# monomial path relations of the toric degeneration


def path_relations(family: Family | str, rank: int) -> List[Tuple[Form, Form]]:
    """Pairs (LHS, RHS) of exponent forms of equal path monomials."""
    family = Family(family)
    l = rank
    rel: List[Tuple[Form, Form]] = []

    def x(k, i):
        return vname("x", k, i)

    def z(k, i):
        return vname("z", k, i)

    def f(*pairs) -> Form:
        return kp._form(*pairs)

    if family is Family.A:
        for k in range(1, l + 1):
            for i in range(1, k + 1):
                # a_{k,i} b_{k,i}, both arrows through layer k
                lhs = f((x(k, i), 1.0), (x(k + 1, i), -1.0), (x(k + 1, i + 1), 1.0), (x(k, i), -1.0))
                if k < l:
                    # = b_{k+1,i} a_{k+1,i+1}, the parallel path through layer k+1
                    rhs = f((x(k + 2, i + 1), 1.0), (x(k + 1, i), -1.0), (x(k + 1, i + 1), 1.0), (x(k + 2, i + 1), -1.0))
                else:
                    # top layer: closes on the external coordinates
                    rhs = f((x(k + 1, i + 1), 1.0), (x(k + 1, i), -1.0))
                rel.append((lhs, rhs))
        return rel
    if family is Family.B:
        # conventions: a_{k,1} = b_{k,1} via x_{.,0} = 0 (both equal e^{z_{k,1}})
        for k in range(1, l + 1):
            rel.append((f((z(k, 1), 1.0)), f((z(k, 1), 1.0))))
        for k in range(1, l):
            for i in range(1, k + 1):
                # d_{k,i} a_{k+1,i+1} = c_{k+1,i} b_{k+1,i+1}, c = e^{x-z}
                lhs = f((x(k, i), 1.0), (z(k + 1, i), -1.0), (z(k + 1, i + 1), 1.0), (x(k, i), -1.0))
                rhs = f((x(k + 1, i), 1.0), (z(k + 1, i), -1.0), (z(k + 1, i + 1), 1.0), (x(k + 1, i), -1.0))
                rel.append((lhs, rhs))
                # b_{k,i+1} c_{k,i+1} = a_{k+1,i+1} d_{k,i+1} style box
                if i + 1 <= k:
                    lhs = f((z(k, i + 1), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k, i + 1), -1.0))
                    rhs = f((z(k + 1, i + 1), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k + 1, i + 1), -1.0))
                    rel.append((lhs, rhs))
        return rel
    if family is Family.C:
        for k in range(2, l + 1):
            # cross-edge squares: b_{k,1} c'_{k,1} = e^{2 z_{k,1}} and lower
            rel.append(
                (
                    f((x(k, 1), 1.0), (z(k, 1), 1.0), (z(k, 1), 1.0), (x(k, 1), -1.0)),
                    f((z(k, 1), 2.0)),
                )
            )
            rel.append(
                (
                    f((x(k, 1), 1.0), (z(k - 1, 1), 1.0), (z(k - 1, 1), 1.0), (x(k, 1), -1.0)),
                    f((z(k - 1, 1), 2.0)),
                )
            )
            for i in range(1, k):
                # boxes between the two z-layers flanking x-layer k
                lhs = f((z(k, i), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k, i), -1.0))
                rhs = f((z(k - 1, i), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k - 1, i), -1.0))
                rel.append((lhs, rhs))
        return rel
    # D
    for k in range(2, l + 1):
        rel.append(
            (
                f((x(k, 1), 1.0), (z(k - 1, 1), 1.0), (x(k, 2), 1.0), (z(k - 1, 1), -1.0)),
                f((x(k, 1), 1.0), (x(k, 2), 1.0)),
            )
        )
        for i in range(1, k - 1):
            lhs = f((z(k - 1, i), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k - 1, i), -1.0))
            rhs = f((x(k, i + 1), 1.0), (x(k, i), -1.0))
            rel.append((lhs, rhs))
    for k in range(2, l):
        for i in range(1, k):
            # boxes between x-layers k and k+1 through z-layer k
            lhs = f((z(k, i), 1.0), (x(k, i), -1.0), (x(k, i + 1), 1.0), (z(k, i), -1.0))
            rhs = f((x(k, i + 1), 1.0), (x(k, i), -1.0))
            rel.append((lhs, rhs))
    return rel


def verify_relations(family: Family | str, rank: int, point: Mapping[str, float]) -> float:
    """Max |LHS - RHS| of the path-relation monomials at the given point."""
    worst = 0.0
    for lhs, rhs in path_relations(family, rank):
        lv = math.exp(sum(c * point.get(v, 0.0) for v, c in lhs.items()))
        rv = math.exp(sum(c * point.get(v, 0.0) for v, c in rhs.items()))
        worst = max(worst, abs(lv - rv))
    return worst


def fold_involution_gap(rank_b: int, rng: np.random.Generator, samples: int = 5) -> float:
    """Invariance of the zero-spectrum A_{2l} potential under the flip.

    The flip x_{k,i} -> -x_{k,k+1-i} realizes the ambient involution whose
    fixed diagram is the B_l one; the potential value must be unchanged.
    """
    l2 = 2 * rank_b
    pot = potential(Family.A, l2, [0.0] * (l2 + 1))
    names = list(pot.internal) + list(pot.external)
    worst = 0.0
    for _ in range(samples):
        point = {v: float(rng.normal()) for v in names}
        flipped = {}
        for v in names:
            _, k, i = v.split("_")
            k, i = int(k), int(i)
            flipped[v] = -point[vname("x", k, k + 1 - i)]
        worst = max(worst, abs(pot.value(point) - pot.value(flipped)))
    return worst
