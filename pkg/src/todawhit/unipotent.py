"""Matrix realizations of the maximal unipotent subgroups N_+.

For each classical family the Chevalley triple (E_i, H_i, F_i) is realized
in the defining representation with the Borel upper-triangular: dimension
l+1 for A, 2l+1 for B, 2l for C and D.  The orthogonal/symplectic groups
are cut out of GL(N) by the involution g* = w0 (g^{-1})^t w0^{-1} with
w0 = S.J, J the antidiagonal and S a signature matrix whose pattern is
fixed per family below.

Two parametrization paths are provided:

* ``factorized_element`` multiplies one-parameter subgroups along a reduced
  word.  With ``convention="exp"`` every letter is exp(t E_i); with
  ``convention="embedded"`` the short B root uses the product of the two
  elementary GL unipotents instead (they differ in a single t^2 entry).
  The embedded convention is the one under which the Givental-type (x, z)
  coordinates reproduce the factorized product exactly.
* ``modified_element`` builds the same matrix from Givental-type
  coordinates through the explicit change of variables
  (``params_from_coords``), which is invertible in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .rootdata import Family, ReducedWord, RootSystem, longest_reduced_word, occurrence_labels, param_counts

__all__ = [
    "FactorizationParams",
    "ModifiedCoords",
    "defining_dim",
    "defining_chevalley",
    "x_subgroup",
    "letter_matrix",
    "factorized_element",
    "modified_element",
    "params_from_coords",
    "coords_from_params",
    "weyl_lift",
    "star_signature",
    "star_involution",
    "lusztig_move3",
    "lusztig_move4",
    "expm_nilpotent",
]


# ---------------------------------------------------------------------------
# parameter containers


@dataclass
class FactorizationParams:
    """Values y_{i,n} > 0 keyed by (letter, occurrence)."""

    family: Family
    rank: int
    values: Dict[Tuple[int, int], float]

    def __post_init__(self):
        counts = param_counts(self.family, self.rank)
        want = {(i + 1, n + 1) for i, c in enumerate(counts) for n in range(c)}
        if set(self.values) != want:
            raise ValueError("parameter index set does not match family/rank")
        if any(v <= 0 for v in self.values.values()):
            raise ValueError("factorization parameters must be positive")

    def __getitem__(self, key):
        return self.values[key]


@dataclass
class ModifiedCoords:
    """Givental-type coordinates x_{k,i} (and z_{k,i} for B, C, D).

    The external layer (k = rank for A's x_{l+1}, B/D's x_l, C's z_l) is not
    stored; the parametrization theorems set it to zero and the evaluator
    reinstates it through the potential's external variables.
    """

    family: Family
    rank: int
    x: Dict[Tuple[int, int], float]
    z: Dict[Tuple[int, int], float]

    def __post_init__(self):
        want_x, want_z = modified_index_sets(self.family, self.rank)
        if set(self.x) != want_x or set(self.z) != want_z:
            raise ValueError("coordinate index set does not match family/rank")


def modified_index_sets(family: Family, rank: int):
    """Internal (x, z) index sets per family at given rank."""
    l = rank
    if family is Family.A:
        xs = {(k, i) for k in range(1, l + 1) for i in range(1, k + 1)}
        return xs, set()
    if family is Family.B:
        xs = {(k, i) for k in range(1, l) for i in range(1, k + 1)}
        zs = {(k, i) for k in range(1, l + 1) for i in range(1, k + 1)}
        return xs, zs
    if family is Family.C:
        xs = {(k, i) for k in range(1, l + 1) for i in range(1, k + 1)}
        zs = {(k, i) for k in range(1, l) for i in range(1, k + 1)}
        return xs, zs
    xs = {(k, i) for k in range(1, l) for i in range(1, k + 1)}
    zs = {(k, i) for k in range(1, l) for i in range(1, k + 1)}
    return xs, zs


# ---------------------------------------------------------------------------
# defining representation


def defining_dim(rs: RootSystem) -> int:
    if rs.family is Family.A:
        return rs.rank + 1
    if rs.family is Family.B:
        return 2 * rs.rank + 1
    return 2 * rs.rank


def _eps(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i - 1, j - 1] = 1.0
    return m


def star_signature(rs: RootSystem) -> np.ndarray:
    """Diagonal of S in w0 = S.J for the ambient GL involution."""
    n = defining_dim(rs)
    s = np.empty(n)
    if rs.family is Family.D:
        l = rs.rank
        for i in range(1, l + 1):
            s[i - 1] = (-1) ** (i + 1)
            s[n - i] = s[i - 1]
    else:
        for i in range(1, n + 1):
            s[i - 1] = (-1) ** (i + 1)
    return s


def star_involution(rs: RootSystem, g: np.ndarray) -> np.ndarray:
    """g* = w0 (g^{-1})^t w0^{-1} with w0 = S.J."""
    n = defining_dim(rs)
    s = star_signature(rs)
    w = np.zeros((n, n))
    for i in range(n):
        w[i, n - 1 - i] = s[i]
    return w @ np.linalg.inv(g).T @ np.linalg.inv(w)


def defining_chevalley(rs: RootSystem, i: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(E_i, H_i, F_i) matrices in the defining representation."""
    l, fam = rs.rank, rs.family
    n = defining_dim(rs)
    if not 1 <= i <= l:
        raise ValueError("generator index out of range")
    if fam is Family.A:
        E = _eps(n, i, i + 1)
        F = _eps(n, i + 1, i)
    elif fam is Family.B:
        if i == 1:
            E = _eps(n, l, l + 1) + _eps(n, l + 1, l + 2)
            F = 2.0 * (_eps(n, l + 1, l) + _eps(n, l + 2, l + 1))
        else:
            p = l + 1 - i
            E = _eps(n, p, p + 1) + _eps(n, n - p, n + 1 - p)
            F = E.T.copy()
    elif fam is Family.C:
        if i == 1:
            E = _eps(n, l, l + 1)
            F = _eps(n, l + 1, l)
        else:
            p = l + 1 - i
            E = _eps(n, p, p + 1) + _eps(n, n - p, n + 1 - p)
            F = E.T.copy()
    else:  # D
        if i == 1:
            E = _eps(n, l - 1, l) + _eps(n, l + 1, l + 2)
            F = E.T.copy()
        elif i == 2:
            E = _eps(n, l - 1, l + 1) + _eps(n, l, l + 2)
            F = E.T.copy()
        else:
            p = l + 1 - i
            E = _eps(n, p, p + 1) + _eps(n, n - p, n + 1 - p)
            F = E.T.copy()
    H = E @ F - F @ E
    return E, H, F


def expm_nilpotent(m: np.ndarray) -> np.ndarray:
    """Exact exponential of a nilpotent matrix (power series terminates)."""
    n = m.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, n + 1):
        term = term @ m / k
        if not term.any():
            break
        out = out + term
    return out


def x_subgroup(rs: RootSystem, i: int, t: float) -> np.ndarray:
    """X_i(t) = exp(t E_i); a genuine one-parameter subgroup."""
    E, _, _ = defining_chevalley(rs, i)
    return expm_nilpotent(t * E)


def letter_matrix(rs: RootSystem, i: int, t: float, convention: str = "exp") -> np.ndarray:
    """Single-letter factor used by ``factorized_element``.

    ``embedded`` replaces the B short-root exponential with the ordered
    product of the two elementary GL unipotents; all other letters have a
    vanishing square of the off-diagonal part, so both conventions agree.
    """
    if convention == "exp" or not (rs.family is Family.B and i == 1):
        return x_subgroup(rs, i, t)
    if convention != "embedded":
        raise ValueError("convention must be 'exp' or 'embedded'")
    n = defining_dim(rs)
    l = rs.rank
    return (np.eye(n) + t * _eps(n, l, l + 1)) @ (np.eye(n) + t * _eps(n, l + 1, l + 2))


def factorized_element(
    rs: RootSystem,
    word: ReducedWord | None,
    params: FactorizationParams,
    convention: str = "exp",
) -> np.ndarray:
    """Ordered product of letters X_{i_1}(t_1) ... X_{i_m}(t_m)."""
    if word is None:
        word = longest_reduced_word(rs)
    labels = occurrence_labels(word)
    n = defining_dim(rs)
    out = np.eye(n)
    for letter, occ in labels:
        t = params[(letter, occ)]
        out = out @ letter_matrix(rs, letter, t, convention)
    return out


# ---------------------------------------------------------------------------
# change of variables between factorized and Givental-type coordinates


def params_from_coords(rs: RootSystem, coords: ModifiedCoords) -> FactorizationParams:
    """The printed change of variables y = y(x, z), external layer = 0."""
    fam, l = rs.family, rs.rank
    x, z = coords.x, coords.z

    def xv(k, i):  # external layer is zero
        if fam is Family.A and k == l + 1:
            return 0.0
        if fam in (Family.B, Family.D) and k == l:
            return 0.0
        return x[(k, i)]

    def zv(k, i):
        if fam is Family.C and k == l:
            return 0.0
        return z[(k, i)]

    vals: Dict[Tuple[int, int], float] = {}
    if fam is Family.A:
        for i in range(1, l + 1):
            for nn in range(1, l + 2 - i):
                vals[(i, nn)] = math.exp(xv(nn + i, i + 1) - xv(nn + i - 1, i))
    elif fam is Family.B:
        vals[(1, 1)] = math.exp(xv(1, 1) - zv(1, 1))
        for k in range(2, l + 1):
            vals[(1, k)] = math.exp(xv(k - 1, 1) - zv(k, 1)) + math.exp(
                xv(k, 1) - zv(k, 1)
            )
        for k in range(2, l + 1):
            for r in range(1, l + 2 - k):
                vals[(k, 2 * r - 1)] = math.exp(zv(k + r - 1, k) - xv(k + r - 2, k - 1))
                vals[(k, 2 * r)] = math.exp(zv(k + r - 1, k) - xv(k + r - 1, k - 1))
    elif fam is Family.C:
        vals[(1, 1)] = math.exp(xv(1, 1) + zv(1, 1))
        for k in range(2, l + 1):
            vals[(1, k)] = math.exp(zv(k - 1, 1) + xv(k, 1)) + math.exp(
                zv(k, 1) + xv(k, 1)
            )
        for k in range(2, l + 1):
            for r in range(1, l + 2 - k):
                vals[(k, 2 * r - 1)] = math.exp(xv(k + r - 1, k) - zv(k + r - 2, k - 1))
                vals[(k, 2 * r)] = math.exp(xv(k + r - 1, k) - zv(k + r - 1, k - 1))
    else:  # D
        for nn in range(1, l):
            vals[(1, nn)] = math.exp(zv(nn, 1) - xv(nn, 1)) + math.exp(
                zv(nn, 1) - xv(nn + 1, 1)
            )
            vals[(2, nn)] = math.exp(zv(nn, 1) + xv(nn, 1)) + math.exp(
                zv(nn, 1) + xv(nn + 1, 1)
            )
        for k in range(3, l + 1):
            for r in range(1, l + 2 - k):
                vals[(k, 2 * r - 1)] = math.exp(
                    zv(k + r - 2, k - 1) - xv(k + r - 2, k - 1)
                )
                vals[(k, 2 * r)] = math.exp(zv(k + r - 2, k - 1) - xv(k + r - 1, k - 1))
    return FactorizationParams(fam, l, vals)


def coords_from_params(rs: RootSystem, params: FactorizationParams) -> ModifiedCoords:
    """Closed-form inverse of ``params_from_coords``."""
    fam, l = rs.family, rs.rank
    y = params.values
    x: Dict[Tuple[int, int], float] = {}
    z: Dict[Tuple[int, int], float] = {}

    if fam is Family.A:
        for k in range(l, 0, -1):
            for i in range(1, k + 1):
                upper = 0.0 if k + 1 == l + 1 else x[(k + 1, i + 1)]
                x[(k, i)] = upper - math.log(y[(i, k + 1 - i)])
        return ModifiedCoords(fam, l, x, z)

    if fam is Family.B:
        for c in range(1, l):
            acc = 0.0  # x_{l,c} = 0
            for a in range(l, c, -1):
                r = a - c
                acc += math.log(y[(c + 1, 2 * r)]) - math.log(y[(c + 1, 2 * r - 1)])
                if a - 1 < l:
                    x[(a - 1, c)] = acc
        z[(1, 1)] = x.get((1, 1), 0.0) - math.log(y[(1, 1)])
        if l == 1:
            z[(1, 1)] = -math.log(y[(1, 1)])
        for a in range(2, l + 1):
            xa = 0.0 if a == l else x[(a, 1)]
            xam = x[(a - 1, 1)]
            z[(a, 1)] = math.log((math.exp(xam) + math.exp(xa)) / y[(1, a)])
        for k in range(2, l + 1):
            for r in range(1, l + 2 - k):
                a = k + r - 1
                xv = 0.0 if (a - 1) == l else x[(a - 1, k - 1)] if (a - 1) >= k - 1 else 0.0
                z[(a, k)] = xv + math.log(y[(k, 2 * r - 1)])
        return ModifiedCoords(fam, l, x, z)

    if fam is Family.C:
        for c in range(1, l):
            acc = 0.0  # z_{l,c} = 0
            for a in range(l, c, -1):
                r = a - c
                acc += math.log(y[(c + 1, 2 * r)]) - math.log(y[(c + 1, 2 * r - 1)])
                if a - 1 < l:
                    z[(a - 1, c)] = acc
        for k in range(2, l + 1):
            for r in range(1, l + 2 - k):
                a = k + r - 1
                zv = 0.0 if (a - 1) == l else z[(a - 1, k - 1)]
                x[(a, k)] = zv + math.log(y[(k, 2 * r - 1)])
        x[(1, 1)] = math.log(y[(1, 1)]) - z.get((1, 1), 0.0)
        if l == 1:
            x[(1, 1)] = math.log(y[(1, 1)])
        for a in range(2, l + 1):
            za = 0.0 if a == l else z[(a, 1)]
            zam = z[(a - 1, 1)]
            x[(a, 1)] = math.log(y[(1, a)] / (math.exp(zam) + math.exp(za)))
        return ModifiedCoords(fam, l, x, z)

    # D
    for c in range(2, l):
        acc = 0.0  # x_{l,c} = 0
        for a in range(l, c, -1):
            r = a - c
            acc += math.log(y[(c + 1, 2 * r)]) - math.log(y[(c + 1, 2 * r - 1)])
            if a - 1 < l:
                x[(a - 1, c)] = acc
    xnext = 0.0  # x_{l,1} = 0
    for nn in range(l - 1, 0, -1):
        x[(nn, 1)] = math.log(y[(2, nn)] / y[(1, nn)]) - xnext
        xnext = x[(nn, 1)]
    for nn in range(1, l):
        xn = x[(nn, 1)]
        xn1 = 0.0 if nn + 1 == l else x[(nn + 1, 1)]
        z[(nn, 1)] = math.log(y[(1, nn)] / (math.exp(-xn) + math.exp(-xn1)))
    for k in range(3, l + 1):
        for r in range(1, l + 2 - k):
            a = k + r - 2
            xv = 0.0 if a == l else x[(a, k - 1)]
            z[(a, k - 1)] = xv + math.log(y[(k, 2 * r - 1)])
    return ModifiedCoords(fam, l, x, z)


def modified_element(rs: RootSystem, coords: ModifiedCoords) -> np.ndarray:
    """Group element parametrized by Givental-type coordinates.

    Defined through the closed-form change of variables; for family A this
    coincides with the upper-triangular two-diagonal block product, which is
    checked in the test-suite.
    """
    convention = "embedded" if rs.family is Family.B else "exp"
    return factorized_element(
        rs, None, params_from_coords(rs, coords), convention=convention
    )


def modified_element_blocks_A(rs: RootSystem, coords: ModifiedCoords) -> np.ndarray:
    """Family-A bidiagonal block product (independent construction)."""
    if rs.family is not Family.A:
        raise ValueError("block construction implemented for family A")
    l = rs.rank
    n = l + 1

    def xv(k, i):
        return 0.0 if k == l + 1 else coords.x[(k, i)]

    def U(k):
        d = [math.exp(-xv(k, i)) if i <= k else 1.0 for i in range(1, n + 1)]
        return np.diag(d)

    def Ut(k):
        m = U(k)
        for i in range(1, k):
            m[i - 1, i] = math.exp(-xv(k - 1, i))
        return m

    out = np.eye(n)
    for k in range(2, n + 1):
        out = out @ Ut(k) @ np.linalg.inv(U(k))
    return out


# ---------------------------------------------------------------------------
# weyl lifts


def simple_reflection_lift(rs: RootSystem, i: int) -> np.ndarray:
    E, _, F = defining_chevalley(rs, i)
    return expm_nilpotent(E) @ expm_nilpotent(-F) @ expm_nilpotent(E)


def weyl_lift(rs: RootSystem, word: Sequence[int] | ReducedWord | None = None) -> np.ndarray:
    """Lift of a Weyl word via s_i -> exp(e_i) exp(-f_i) exp(e_i)."""
    if word is None:
        word = longest_reduced_word(rs)
    indices = word.indices if isinstance(word, ReducedWord) else tuple(word)
    n = defining_dim(rs)
    out = np.eye(n)
    for i in indices:
        out = out @ simple_reflection_lift(rs, i)
    return out


# ---------------------------------------------------------------------------
# Lusztig moves


def lusztig_move3(t1: float, t2: float, t3: float) -> Tuple[float, float, float]:
    """Braid move X_i X_j X_i = X_j X_i X_j for a_ij = a_ji = -1."""
    if t1 + t3 == 0:
        raise ZeroDivisionError("degenerate 3-move: t1 + t3 = 0")
    return (t2 * t3 / (t1 + t3), t1 + t3, t1 * t2 / (t1 + t3))


def lusztig_move4(t1: float, t2: float, t3: float, t4: float) -> Tuple[float, float, float, float]:
    """Braid move X_j X_i X_j X_i = X_i X_j X_i X_j for a_ij = -1, a_ji = -2."""
    p1 = t1 * t2 + (t1 + t3) * t4
    p2 = t1 * t1 * t2 + (t1 + t3) ** 2 * t4
    if p1 == 0 or p2 == 0:
        raise ZeroDivisionError("degenerate 4-move")
    return (t2 * t3 * t3 * t4 / p2, p2 / p1, p1 * p1 / p2, t1 * t2 * t3 / p1)
