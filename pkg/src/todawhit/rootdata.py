"""Root data for the classical families A, B, C, D.

Everything here is exact: simple roots, coroots and fundamental weights are
stored as tuples of :class:`fractions.Fraction` in an orthogonal epsilon
basis, so the structural invariants (Cartan pairings, symmetrizability,
longest-word checks) hold exactly rather than to rounding.

Conventions.  Family A with rank ``l`` models the reductive algebra
gl_{l+1}; its epsilon basis has ``l+1`` components and the stored
fundamental weights are the sl-dual set omega'_i = -(e_1+...+e_i), with the
gl weight basis e_j kept separately.  B, C, D use an ``l``-component
epsilon basis with the first root(s) short/long as usual:

* B_l : alpha_1 = e_1, alpha_k = e_k - e_{k-1}
* C_l : alpha_1 = 2 e_1, alpha_k = e_k - e_{k-1}
* D_l : alpha_1 = e_2 - e_1, alpha_2 = e_2 + e_1, alpha_k = e_k - e_{k-1}
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

Vector = Tuple[Fraction, ...]


class Family(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


def _vec(entries: Iterable) -> Vector:
    return tuple(Fraction(e) for e in entries)


def _basis(dim: int, i: int, scale=1) -> Vector:
    return _vec([scale if j == i else 0 for j in range(dim)])


def vadd(x: Vector, y: Vector) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vector, y: Vector) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in x)


def vdot(x: Vector, y: Vector) -> Fraction:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


@dataclass(frozen=True)
class ReducedWord:
    """A word in simple-reflection indices (1-based)."""

    indices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class CorootOrder:
    """Positive coroots in the order induced by a reduced word for w0."""

    coroots: Tuple[Vector, ...]

    def __len__(self) -> int:
        return len(self.coroots)


@dataclass(frozen=True)
class RootSystem:
    family: Family
    rank: int
    simple_roots: Tuple[Vector, ...]
    simple_coroots: Tuple[Vector, ...]
    fundamental_weights: Tuple[Vector, ...]
    cartan: Tuple[Tuple[int, ...], ...]
    symmetrizers: Tuple[Fraction, ...]
    rho: Vector
    star: Tuple[int, ...]
    # gl only: the l+1 weight-lattice basis vectors e_j
    gl_weights: Tuple[Vector, ...] = field(default=())

    @property
    def epsilon_dim(self) -> int:
        return len(self.simple_roots[0])

    def pairing(self, weight: Vector, coroot: Vector) -> Fraction:
        """<weight, coroot> via the orthogonal epsilon-basis product."""
        return vdot(weight, coroot)

    def reflect_root_side(self, i: int, v: Vector) -> Vector:
        """s_i acting on weight-side vectors: v - <v, a_i^vee> a_i."""
        c = vdot(v, self.simple_coroots[i - 1])
        return vsub(v, vscale(c, self.simple_roots[i - 1]))

    def reflect_coroot_side(self, i: int, v: Vector) -> Vector:
        """s_i acting on coroot-side vectors: v - <a_i, v> a_i^vee."""
        c = vdot(v, self.simple_roots[i - 1])
        return vsub(v, vscale(c, self.simple_coroots[i - 1]))

    def word_action_root_side(self, word: Sequence[int], v: Vector) -> Vector:
        """Apply s_{i_1} s_{i_2} ... s_{i_m} to a weight-side vector."""
        for i in reversed(list(word)):
            v = self.reflect_root_side(i, v)
        return v

    def sl_weights(self) -> Tuple[Vector, ...]:
        """For gl: the traceless sl projection of the stored weights."""
        if self.family is not Family.A:
            raise ValueError("sl view only defined for family A")
        n = self.rank + 1
        omega_top = _vec([-1] * n)  # omega'_{l+1}
        out = []
        for i, w in enumerate(self.fundamental_weights, start=1):
            out.append(vsub(w, vscale(Fraction(i, n), omega_top)))
        return tuple(out)

    def positive_roots(self) -> Tuple[Vector, ...]:
        return _positive_roots(self.family, self.rank, self.epsilon_dim)

    def positive_coroots(self) -> Tuple[Vector, ...]:
        roots = self.positive_roots()
        out = []
        for r in roots:
            n2 = vdot(r, r)
            out.append(vscale(Fraction(2, 1) / n2, r))
        return tuple(out)


def _positive_roots(family: Family, rank: int, dim: int) -> Tuple[Vector, ...]:
    roots = []
    if family is Family.A:
        for i in range(dim):
            for j in range(i + 1, dim):
                roots.append(vsub(_basis(dim, j), _basis(dim, i)))
        return tuple(roots)
    for i in range(rank):
        for j in range(i + 1, rank):
            roots.append(vsub(_basis(rank, j), _basis(rank, i)))
            roots.append(vadd(_basis(rank, j), _basis(rank, i)))
    if family is Family.B:
        roots.extend(_basis(rank, i) for i in range(rank))
    elif family is Family.C:
        roots.extend(_basis(rank, i, 2) for i in range(rank))
    return tuple(roots)


def _star(family: Family, rank: int) -> Tuple[int, ...]:
    if family is Family.A:
        return tuple(rank + 1 - i for i in range(1, rank + 1))
    if family is Family.D:
        perm = list(range(1, rank + 1))
        if rank % 2 == 1:
            perm[0], perm[1] = 2, 1
        return tuple(perm)
    return tuple(range(1, rank + 1))


def build(family: Family | str, rank: int) -> RootSystem:
    """Construct the root system of the given classical family and rank."""
    family = Family(family)
    if family is Family.A:
        if rank < 1:
            raise ValueError("family A needs rank >= 1")
        dim = rank + 1
        roots = tuple(
            vsub(_basis(dim, i + 1), _basis(dim, i)) for i in range(rank)
        )
        coroots = roots
        weights = tuple(
            _vec([-1 if j <= i else 0 for j in range(dim)]) for i in range(rank)
        )
        gl_weights = tuple(_basis(dim, j) for j in range(dim))
        d = tuple(Fraction(1) for _ in range(rank))
    elif family in (Family.B, Family.C):
        if rank < 2:
            raise ValueError(f"family {family.value} needs rank >= 2")
        dim = rank
        if family is Family.B:
            roots = (_basis(dim, 0),) + tuple(
                vsub(_basis(dim, i), _basis(dim, i - 1)) for i in range(1, rank)
            )
            coroots = (_basis(dim, 0, 2),) + roots[1:]
            weights = (vscale(Fraction(1, 2), _vec([1] * dim)),) + tuple(
                _vec([0] * i + [1] * (dim - i)) for i in range(1, rank)
            )
            d = (Fraction(1, 2),) + tuple(Fraction(1) for _ in range(rank - 1))
        else:
            roots = (_basis(dim, 0, 2),) + tuple(
                vsub(_basis(dim, i), _basis(dim, i - 1)) for i in range(1, rank)
            )
            coroots = (_basis(dim, 0),) + roots[1:]
            weights = tuple(
                _vec([0] * i + [1] * (dim - i)) for i in range(rank)
            )
            d = (Fraction(2),) + tuple(Fraction(1) for _ in range(rank - 1))
        gl_weights = ()
    elif family is Family.D:
        if rank < 2:
            raise ValueError("family D needs rank >= 2")
        dim = rank
        roots = (
            vsub(_basis(dim, 1), _basis(dim, 0)),
            vadd(_basis(dim, 1), _basis(dim, 0)),
        ) + tuple(vsub(_basis(dim, i), _basis(dim, i - 1)) for i in range(2, rank))
        coroots = roots
        weights = (
            vscale(Fraction(1, 2), _vec([-1] + [1] * (dim - 1))),
            vscale(Fraction(1, 2), _vec([1] * dim)),
        ) + tuple(_vec([0] * i + [1] * (dim - i)) for i in range(2, rank))
        gl_weights = ()
        d = tuple(Fraction(1) for _ in range(rank))
    else:  # pragma: no cover
        raise ValueError(family)

    cartan = tuple(
        tuple(int(vdot(coroots[i], roots[j])) for j in range(rank))
        for i in range(rank)
    )
    pos = _positive_roots(family, rank, dim)
    rho = _vec([0] * dim)
    for r in pos:
        rho = vadd(rho, r)
    rho = vscale(Fraction(1, 2), rho)

    rs = RootSystem(
        family=family,
        rank=rank,
        simple_roots=roots,
        simple_coroots=coroots,
        fundamental_weights=weights,
        cartan=cartan,
        symmetrizers=d,
        rho=rho,
        star=_star(family, rank),
        gl_weights=gl_weights,
    )
    _check_invariants(rs)
    return rs


def _check_invariants(rs: RootSystem) -> None:
    l = rs.rank
    for i in range(l):
        for j in range(l):
            if vdot(rs.simple_coroots[i], rs.simple_roots[j]) != rs.cartan[i][j]:
                raise AssertionError("Cartan matrix inconsistent with vectors")
            if rs.symmetrizers[i] * rs.cartan[i][j] != rs.symmetrizers[j] * rs.cartan[j][i]:
                raise AssertionError("Cartan matrix not symmetrizable by d")
            want = Fraction(1) if i == j else Fraction(0)
            if vdot(rs.fundamental_weights[j], rs.simple_coroots[i]) != want:
                raise AssertionError("weights not dual to coroots")
    star = rs.star
    if tuple(star[star[i] - 1] for i in range(l)) != tuple(range(1, l + 1)):
        raise AssertionError("star is not an involution")


def rho_components(rs: RootSystem) -> Tuple[Fraction, ...]:
    """The per-coordinate rho_k entering mu_k = i lambda_k - rho_k.

    These follow the conventions of the factorized-representation formulas:
    A: (l-2k+2)/2 for k = 1..l+1;  B: (2k-1)/2;  C: k;  D: k-1.
    """
    l = rs.rank
    if rs.family is Family.A:
        return tuple(Fraction(l - 2 * k + 2, 2) for k in range(1, l + 2))
    if rs.family is Family.B:
        return tuple(Fraction(2 * k - 1, 2) for k in range(1, l + 1))
    if rs.family is Family.C:
        return tuple(Fraction(k) for k in range(1, l + 1))
    return tuple(Fraction(k - 1) for k in range(1, l + 1))


def longest_reduced_word(rs: RootSystem) -> ReducedWord:
    """The canonical recursive reduced word for w0 used throughout."""
    l = rs.rank
    word: list[int] = []
    if rs.family is Family.A:
        for k in range(1, l + 1):
            word.extend(range(k, 0, -1))
    elif rs.family in (Family.B, Family.C):
        for k in range(1, l + 1):
            word.extend(range(k, 1, -1))
            word.extend(range(1, k + 1))
    else:
        for k in range(2, l + 1):
            word.extend(range(k, 2, -1))
            word.extend((1, 2))
            word.extend(range(3, k + 1))
    w = ReducedWord(tuple(word))
    if len(w) != expected_word_length(rs):
        raise AssertionError("reduced-word length mismatch")
    return w


def expected_word_length(rs: RootSystem) -> int:
    l = rs.rank
    if rs.family is Family.A:
        return l * (l + 1) // 2
    if rs.family in (Family.B, Family.C):
        return l * l
    return l * (l - 1)


def word_sends_rho_to_minus_rho(rs: RootSystem) -> bool:
    word = longest_reduced_word(rs)
    image = rs.word_action_root_side(word.indices, rs.rho)
    return image == vscale(-1, rs.rho)


def coroot_order(rs: RootSystem, word: ReducedWord | None = None) -> CorootOrder:
    """gamma_k = s_{i_1} ... s_{i_{k-1}} (alpha_{i_k}^vee) for the word.

    Raises ValueError if the word is not reduced (detected by a repeated or
    non-positive entry in the resulting list).
    """
    if word is None:
        word = longest_reduced_word(rs)
    out = []
    for k, letter in enumerate(word.indices):
        v = rs.simple_coroots[letter - 1]
        for i in reversed(word.indices[:k]):
            v = rs.reflect_coroot_side(i, v)
        out.append(v)
    seen = set()
    positive = set(rs.positive_coroots())
    for v in out:
        if v in seen or v not in positive:
            raise ValueError("word is not reduced for w0")
        seen.add(v)
    return CorootOrder(tuple(out))


def occurrence_labels(word: ReducedWord) -> Tuple[Tuple[int, int], ...]:
    """Position -> (letter, occurrence count) labels for parameters y_{i,n}."""
    counts: dict[int, int] = {}
    out = []
    for letter in word.indices:
        counts[letter] = counts.get(letter, 0) + 1
        out.append((letter, counts[letter]))
    return tuple(out)


def param_counts(family: Family | str, rank: int) -> Tuple[int, ...]:
    """Number of parameters y_{i, 1..n_i} per letter i for the canonical word."""
    family = Family(family)
    l = rank
    if family is Family.A:
        return tuple(l + 1 - i for i in range(1, l + 1))
    if family in (Family.B, Family.C):
        return (l,) + tuple(2 * (l + 1 - k) for k in range(2, l + 1))
    return (l - 1, l - 1) + tuple(2 * (l + 1 - k) for k in range(3, l + 1))
