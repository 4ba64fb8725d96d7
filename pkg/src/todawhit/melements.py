"""Matrix elements Delta and Delta'/Delta in factorization parameters.

``delta_closed`` evaluates the monomial Delta_k = prod_j t_j^{<omega_k,
gamma_j^vee>} over the coroot ordering of the reduced word; the ratios
Delta'_k / Delta_k are produced as exact Laurent-monomial combinations by
unrolling the per-family rank recursions.  An independent oracle computes
the same quantities as extreme minors of exterior powers of the defining
representation (with the spin cases of B2 and D3 routed through the
exceptional isomorphisms so5 ~ sp4 and so6 ~ sl4).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import unipotent as up
from .rootdata import (
    Family,
    ReducedWord,
    RootSystem,
    build,
    coroot_order,
    longest_reduced_word,
    occurrence_labels,
    param_counts,
    vdot,
)

ParamKey = Tuple[int, int]
Monomial = Tuple[Tuple[ParamKey, int], ...]
Combo = Dict[Monomial, Fraction]


# ---------------------------------------------------------------------------
# weight exponent table


@dataclass(frozen=True)
class WeightExponentTable:
    """Integer exponents e[k][j] = <omega_k, gamma_j^vee> along the word."""

    word: ReducedWord
    labels: Tuple[ParamKey, ...]
    exponents: Tuple[Tuple[int, ...], ...]


def weight_exponent_table(rs: RootSystem, word: ReducedWord | None = None) -> WeightExponentTable:
    if word is None:
        word = longest_reduced_word(rs)
    order = coroot_order(rs, word)
    labels = occurrence_labels(word)
    rows = []
    for k in range(rs.rank):
        row = []
        for gamma in order.coroots:
            val = vdot(rs.fundamental_weights[k], gamma)
            if val.denominator != 1 or val < 0:
                raise AssertionError("weight exponents must be nonnegative integers")
            row.append(int(val))
        rows.append(tuple(row))
    return WeightExponentTable(word, labels, tuple(rows))


def delta_closed(rs: RootSystem, i: int, params: up.FactorizationParams,
                 word: ReducedWord | None = None) -> float:
    """Delta_{omega_i, w0^{-1}} as the table monomial in the parameters."""
    table = weight_exponent_table(rs, word)
    out = 1.0
    for lbl, e in zip(table.labels, table.exponents[i - 1]):
        if e:
            out *= params[lbl] ** e
    return out


def delta_exponents(rs: RootSystem, i: int, word: ReducedWord | None = None) -> Dict[ParamKey, int]:
    table = weight_exponent_table(rs, word)
    return {
        lbl: e for lbl, e in zip(table.labels, table.exponents[i - 1]) if e
    }


def measure_density(rs: RootSystem, params: up.FactorizationParams) -> float:
    """Density of the right-invariant measure relative to prod dt_k."""
    table = weight_exponent_table(rs)
    out = 1.0
    for j, lbl in enumerate(table.labels):
        e = sum(table.exponents[k][j] for k in range(rs.rank)) - 1
        if e:
            out *= params[lbl] ** e
    return out


# ---------------------------------------------------------------------------
# Laurent-monomial combinations for Delta'/Delta


def _mono(*factors: Tuple[ParamKey, int]) -> Monomial:
    acc: Dict[ParamKey, int] = {}
    for key, e in factors:
        acc[key] = acc.get(key, 0) + e
        if acc[key] == 0:
            del acc[key]
    return tuple(sorted(acc.items()))


def _cadd(a: Combo, b: Combo) -> Combo:
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) + c
        if out[m] == 0:
            del out[m]
    return out


def _cmulm(a: Combo, mono: Monomial, coeff: Fraction = Fraction(1)) -> Combo:
    out: Combo = {}
    for m, c in a.items():
        out[_mono(*m, *mono)] = c * coeff
    return out


def combo_eval(combo: Combo, params: up.FactorizationParams) -> float:
    total = 0.0
    for mono, coeff in combo.items():
        v = float(coeff)
        for key, e in mono:
            v *= params[key] ** e
        total += v
    return total


def delta_prime_ratio_monomials(rs: RootSystem, k: int) -> Combo:
    """Delta'_k / Delta_k as an exact Laurent combination in y_{i,n}."""
    fam, L = rs.family, rs.rank
    if not 1 <= k <= L:
        raise ValueError("weight index out of range")
    one = Fraction(1)
    if fam is Family.A:
        combo: Combo = {_mono(((1, k), -1)): one}  # rank = k base: 1/y_{1,k}
        for l in range(k + 1, L + 1):
            lead: Combo = {_mono(((l + 1 - k, k), -1)): one}
            ratio = _mono(((l - k, k + 1), 1), ((l + 1 - k, k), -1))
            combo = _cadd(lead, _cmulm(combo, ratio))
        return combo
    if fam in (Family.B, Family.C):
        square = 2 if (fam is Family.C and k == 1) else 1
        if k == 1:
            combo = {_mono(((1, 1), -1)): one}
            for l in range(2, L + 1):
                q = _mono(((2, 2 * (l - 1)), 1), ((2, 2 * (l - 1) - 1), -1))
                lead: Combo = {_mono(((1, l), -1)): one}
                # bracket = (1 + q)^square / y_{1,l}
                bracket = dict(lead)
                if square == 1:
                    bracket = _cadd(bracket, _cmulm(lead, q))
                else:
                    bracket = _cadd(bracket, _cmulm(lead, q, Fraction(2)))
                    bracket = _cadd(bracket, _cmulm(lead, _mono(*(q * 2))))
                combo = _cadd(bracket, _cmulm(combo, _mono(*(q * square))))
            return combo
        combo = {_mono(((k, 2), -1)): one}  # rank = k base: 1/y_{k,2}
        for l in range(k + 1, L + 1):
            top = 2 * (l + 1 - k)
            q = _mono(((k + 1, 2 * (l - k)), 1), ((k + 1, 2 * (l - k) - 1), -1))
            lead: Combo = {_mono(((k, top), -1)): one}
            bracket = _cadd(lead, _cmulm(lead, q))
            ratio = _mono(((k, top - 1), 1), ((k, top), -1), *q)
            combo = _cadd(bracket, _cmulm(combo, ratio))
        return combo
    # D family
    if k >= 3:
        # base 1/y_{k,2} at rank k, then the same rank step as family B
        combo = {_mono(((k, 2), -1)): one}
        for l in range(k + 1, L + 1):
            top = 2 * (l + 1 - k)
            q = _mono(((k + 1, 2 * (l - k)), 1), ((k + 1, 2 * (l - k) - 1), -1))
            lead: Combo = {_mono(((k, top), -1)): one}
            bracket = _cadd(lead, _cmulm(lead, q))
            ratio = _mono(((k, top - 1), 1), ((k, top), -1), *q)
            combo = _cadd(bracket, _cmulm(combo, ratio))
        return combo
    # Spin ratios: the lead letter alternates with the rank parity, tracking
    # the star involution (e_{i*} insertion swaps letters 1, 2 at odd rank).
    r1: Combo = {_mono(((1, 1), -1)): one}
    r2: Combo = {_mono(((2, 1), -1)): one}
    for l in range(3, L + 1):
        q = _mono(((3, 2 * (l - 2)), 1), ((3, 2 * (l - 2) - 1), -1))
        b1 = 1 if l % 2 == 0 else 2
        b2 = 3 - b1
        lead1: Combo = {_mono(((b1, l - 1), -1)): one}
        lead2: Combo = {_mono(((b2, l - 1), -1)): one}
        rat1 = _mono(((b2, l - 1), 1), ((b1, l - 1), -1), *q)
        rat2 = _mono(((b1, l - 1), 1), ((b2, l - 1), -1), *q)
        new1 = _cadd(_cadd(lead1, _cmulm(lead1, q)), _cmulm(r1, rat1))
        new2 = _cadd(_cadd(lead2, _cmulm(lead2, q)), _cmulm(r2, rat2))
        r1, r2 = new1, new2
    return r1 if k == 1 else r2


def delta_prime_ratio_closed(rs: RootSystem, k: int, params: up.FactorizationParams) -> float:
    return combo_eval(delta_prime_ratio_monomials(rs, k), params)


def delta_prime_ratio_sum_monomials(rs: RootSystem) -> Combo:
    out: Combo = {}
    for k in range(1, rs.rank + 1):
        out = _cadd(out, delta_prime_ratio_monomials(rs, k))
    return out


def delta_recursion_step(rs: RootSystem, k: int, params: up.FactorizationParams,
                         value_lower: float) -> float:
    """One step of the printed rank recursion for Delta'_k / Delta_k.

    ``value_lower`` is the rank-(L-1) ratio evaluated on the shared
    parameters; returns the rank-L value.
    """
    fam, L = rs.family, rs.rank
    y = params
    if fam is Family.A:
        if k == L:
            return 1.0 / y[(1, L)]
        return 1.0 / y[(L + 1 - k, k)] + y[(L - k, k + 1)] / y[(L + 1 - k, k)] * value_lower
    if fam in (Family.B, Family.C):
        sq = 2 if (fam is Family.C and k == 1) else 1
        if k == L:
            return 1.0 / y[(L, 2)]
        if k == 1:
            q = y[(2, 2 * (L - 1))] / y[(2, 2 * (L - 1) - 1)]
            return (1.0 + q) ** sq / y[(1, L)] + q**sq * value_lower
        top = 2 * (L + 1 - k)
        q = y[(k + 1, 2 * (L - k))] / y[(k + 1, 2 * (L - k) - 1)]
        return (1.0 + q) / y[(k, top)] + (y[(k, top - 1)] / y[(k, top)]) * q * value_lower
    # D
    if k >= 3:
        if k == L:
            return 1.0 / y[(L, 2)]
        top = 2 * (L + 1 - k)
        q = y[(k + 1, 2 * (L - k))] / y[(k + 1, 2 * (L - k) - 1)]
        return (1.0 + q) / y[(k, top)] + (y[(k, top - 1)] / y[(k, top)]) * q * value_lower
    q = y[(3, 2 * (L - 2))] / y[(3, 2 * (L - 2) - 1)]
    b1 = 1 if L % 2 == 0 else 2
    b = b1 if k == 1 else 3 - b1
    rat = y[(3 - b, L - 1)] / y[(b, L - 1)] * q
    return (1.0 + q) / y[(b, L - 1)] + rat * value_lower


# ---------------------------------------------------------------------------
# exterior-power minor oracle


def _subsets(n: int, k: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations(range(n), k))


def _diag_weights(rs: RootSystem) -> np.ndarray:
    n = up.defining_dim(rs)
    out = np.zeros((n, rs.rank))
    for j in range(1, rs.rank + 1):
        _, H, _ = up.defining_chevalley(rs, j)
        out[:, j - 1] = np.diag(H)
    return out


def fundamental_host(rs: RootSystem, i: int):
    """(k, highest-subset) if omega_i lives in the k-th exterior power.

    With the Borel upper-triangular, e_1 ^ ... ^ e_k is a highest-weight
    line of Lambda^k, so the host is found by matching its weight against
    the indicator vector of omega_i.
    """
    n = up.defining_dim(rs)
    wts = _diag_weights(rs)
    want = np.zeros(rs.rank)
    want[i - 1] = 1.0
    for k in range(1, n):
        cvec = wts[:k].sum(axis=0)
        if np.allclose(cvec, want):
            return k, tuple(range(k))
    return None


def is_spin_weight(rs: RootSystem, i: int) -> bool:
    return fundamental_host(rs, i) is None


def _derivation_apply(X: np.ndarray, k: int, vec: Dict[Tuple[int, ...], float]) -> Dict[Tuple[int, ...], float]:
    """Action of the derivation extension of X on a Lambda^k coefficient vector."""
    out: Dict[Tuple[int, ...], float] = {}
    n = X.shape[0]
    nz = [(a, b) for a in range(n) for b in range(n) if X[a, b] != 0.0]
    for subset, coeff in vec.items():
        pos = {s: p for p, s in enumerate(subset)}
        for a, b in nz:
            if b not in pos:
                continue
            if a in pos and a != b:
                continue
            new = list(subset)
            new[pos[b]] = a
            order = np.argsort(new, kind="stable")
            sign = 1.0
            # parity of the sorting permutation
            perm = list(order)
            seen = [False] * len(perm)
            for s in range(len(perm)):
                if seen[s]:
                    continue
                cyc = 0
                t = s
                while not seen[t]:
                    seen[t] = True
                    t = perm[t]
                    cyc += 1
                if cyc % 2 == 0:
                    sign = -sign
            key = tuple(sorted(new))
            out[key] = out.get(key, 0.0) + sign * coeff * X[a, b]
    return out


def _minor_row(M: np.ndarray, rows: Tuple[int, ...], k: int) -> Dict[Tuple[int, ...], float]:
    """All k x k minors det M[rows, T], keyed by column subset T."""
    n = M.shape[0]
    out = {}
    sub = M[list(rows)]
    for T in _subsets(n, k):
        out[T] = float(np.linalg.det(sub[:, list(T)])) if k > 1 else float(sub[0, T[0]])
    return out


def _w0_inv(rs: RootSystem) -> np.ndarray:
    w0 = up.weyl_lift(rs)
    return np.linalg.inv(w0)


def delta_minor(rs: RootSystem, i: int, g: np.ndarray) -> float:
    """<xi^-| pi_i(g w0^{-1}) |xi^+> as an extreme exterior-power minor."""
    host = fundamental_host(rs, i)
    if host is None:
        raise ValueError("spin-type weight: no exterior-power host")
    k, H = host
    M = g @ _w0_inv(rs)
    sub = M[np.ix_(H, H)]
    return float(np.linalg.det(sub)) if k > 1 else float(sub[0, 0])


def delta_prime_minor(rs: RootSystem, i: int, g: np.ndarray) -> float:
    """<xi^-| pi_i(g e_{i*} w0^{-1}) |xi^+> via derivation insertion."""
    host = fundamental_host(rs, i)
    if host is None:
        raise ValueError("spin-type weight: no exterior-power host")
    k, H = host
    istar = rs.star[i - 1]
    E, _, _ = up.defining_chevalley(rs, istar)
    w0inv = _w0_inv(rs)
    # vector = Lambda^k(w0inv) applied to e_H, then derivation of E, then row
    vec = _minor_row(w0inv.T, H, k)  # det w0inv[T, H] keyed by T
    vec = _derivation_apply(E, k, vec)
    row = _minor_row(g, H, k)
    return float(sum(row[T] * c for T, c in vec.items()))


def delta_s_minor(rs: RootSystem, i: int, g: np.ndarray) -> float:
    """<xi^-| pi_i(g f_i) |xi^+> (numerator of the psi_R character)."""
    host = fundamental_host(rs, i)
    if host is None:
        raise ValueError("spin-type weight: no exterior-power host")
    k, H = host
    _, _, F = up.defining_chevalley(rs, i)
    seed = {tuple(H): 1.0}
    vec = _derivation_apply(F, k, seed)
    row = _minor_row(g, H, k)
    return float(sum(row[T] * c for T, c in vec.items()))


# exceptional isomorphisms for the spin cases -------------------------------

_SPIN_ROUTES = {
    (Family.B, 2): ("C", 2, {1: 2, 2: 1}),
    (Family.D, 3): ("A", 3, {1: 1, 2: 3, 3: 2}),
}


def _spin_route_element(rs: RootSystem, params: up.FactorizationParams):
    route = _SPIN_ROUTES.get((rs.family, rs.rank))
    if route is None:
        raise ValueError(
            f"spin weights of {rs.family.value}_{rs.rank} have no wired isomorphism"
        )
    fam2, rank2, sigma = route
    rs2 = build(fam2, rank2)
    word = longest_reduced_word(rs)
    labels = occurrence_labels(word)
    g = np.eye(up.defining_dim(rs2))
    for letter, occ in labels:
        g = g @ up.x_subgroup(rs2, sigma[letter], params[(letter, occ)])
    return rs2, sigma, g


def spin_minor(rs: RootSystem, i: int, params: up.FactorizationParams) -> float:
    """Spin-weight Delta via an exceptional isomorphism, where wired."""
    rs2, sigma, g = _spin_route_element(rs, params)
    return delta_minor(rs2, sigma[i], g)


def spin_prime_minor(rs: RootSystem, i: int, params: up.FactorizationParams) -> float:
    """Spin-weight Delta' via an exceptional isomorphism, where wired."""
    rs2, sigma, g = _spin_route_element(rs, params)
    return delta_prime_minor(rs2, sigma[i], g)


def delta_minor_oracle(rs: RootSystem, i: int, params: up.FactorizationParams) -> float:
    """|Delta_i| from determinants only (independent of the BZ table)."""
    if is_spin_weight(rs, i):
        return spin_minor(rs, i, params)
    g = up.factorized_element(rs, None, params)
    return delta_minor(rs, i, g)


# ---------------------------------------------------------------------------
# refactorization (used by the measure right-invariance check)


def refactorize(rs: RootSystem, target: np.ndarray, start: up.FactorizationParams,
                steps: int = 60) -> up.FactorizationParams:
    """Recover factorization parameters of a matrix by Gauss-Newton.

    Works in log-parameters from the supplied starting point; intended for
    targets in a neighbourhood reached by right multiplication.
    """
    word = longest_reduced_word(rs)
    labels = list(occurrence_labels(word))
    keys = labels
    u = np.array([math.log(start[kk]) for kk in keys])

    def element(uvec):
        vals = {kk: math.exp(uv) for kk, uv in zip(keys, uvec)}
        return up.factorized_element(rs, word, up.FactorizationParams(rs.family, rs.rank, vals))

    for _ in range(steps):
        cur = element(u)
        resid = (cur - target).ravel()
        if np.linalg.norm(resid) < 1e-13:
            break
        J = np.zeros((resid.size, len(keys)))
        h = 1e-7
        for a in range(len(keys)):
            du = u.copy()
            du[a] += h
            J[:, a] = ((element(du) - cur).ravel()) / h
        step, *_ = np.linalg.lstsq(J, -resid, rcond=None)
        nrm = np.linalg.norm(step)
        if nrm > 0.5:
            step *= 0.5 / nrm
        u = u + step
    vals = {kk: math.exp(uv) for kk, uv in zip(keys, u)}
    return up.FactorizationParams(rs.family, rs.rank, vals)
