from fractions import Fraction

import pytest

from todawhit import rootdata as rd
from todawhit.rootdata import Family


ALL_FAMILIES = [Family.A, Family.B, Family.C, Family.D]


def ranks_for(family, up_to=6):
    lo = 1 if family is Family.A else 2
    return range(lo, up_to + 1)


def test_b2_symmetrizers_and_cartan():
    rs = rd.build("B", 2)
    assert rs.symmetrizers == (Fraction(1, 2), Fraction(1))
    assert rs.cartan == ((2, -2), (-1, 2))


def test_c2_symmetrizers():
    rs = rd.build("C", 2)
    assert rs.symmetrizers == (Fraction(2), Fraction(1))
    assert rs.cartan == ((2, -1), (-2, 2))


def test_rho_components_examples():
    assert rd.rho_components(rd.build("A", 2)) == (1, 0, -1)
    assert rd.rho_components(rd.build("C", 3)) == (1, 2, 3)
    assert rd.rho_components(rd.build("D", 2)) == (0, 1)
    assert rd.rho_components(rd.build("B", 2)) == (Fraction(1, 2), Fraction(3, 2))


def test_longest_word_examples():
    assert rd.longest_reduced_word(rd.build("A", 2)).indices == (1, 2, 1)
    assert rd.longest_reduced_word(rd.build("B", 2)).indices == (1, 2, 1, 2)
    assert rd.longest_reduced_word(rd.build("D", 3)).indices == (1, 2, 3, 1, 2, 3)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_word_lengths_and_rho_flip(family):
    for rank in ranks_for(family):
        rs = rd.build(family, rank)
        word = rd.longest_reduced_word(rs)
        assert len(word) == rd.expected_word_length(rs)
        assert rd.word_sends_rho_to_minus_rho(rs)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_coroot_order_covers_positives(family):
    for rank in ranks_for(family):
        rs = rd.build(family, rank)
        order = rd.coroot_order(rs)
        assert set(order.coroots) == set(rs.positive_coroots())
        total = order.coroots[0]
        for v in order.coroots[1:]:
            total = rd.vadd(total, v)
        twice_rho_vee = rs.positive_coroots()[0]
        acc = tuple(Fraction(0) for _ in twice_rho_vee)
        for v in rs.positive_coroots():
            acc = rd.vadd(acc, v)
        assert total == acc


def test_coroot_order_b2_printed():
    rs = rd.build("B", 2)
    a1, a2 = rs.simple_coroots
    order = rd.coroot_order(rs).coroots
    assert order == (a1, rd.vadd(a1, a2), rd.vadd(a1, rd.vscale(2, a2)), a2)


def test_coroot_order_a2_printed():
    rs = rd.build("A", 2)
    a1, a2 = rs.simple_coroots
    order = rd.coroot_order(rs).coroots
    assert order == (a1, rd.vadd(a1, a2), a2)
    rs1 = rd.build("A", 1)
    assert rd.coroot_order(rs1).coroots == (rs1.simple_coroots[0],)


def test_non_reduced_word_rejected():
    rs = rd.build("A", 2)
    with pytest.raises(ValueError):
        rd.coroot_order(rs, rd.ReducedWord((1, 1, 2)))


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_star_involution(family):
    for rank in ranks_for(family):
        rs = rd.build(family, rank)
        star = rs.star
        assert tuple(star[star[i] - 1] for i in range(rank)) == tuple(
            range(1, rank + 1)
        )
        if family is Family.A:
            assert star == tuple(rank + 1 - i for i in range(1, rank + 1))
        elif family in (Family.B, Family.C):
            assert star == tuple(range(1, rank + 1))


def test_sl_view_duality():
    rs = rd.build("A", 3)
    for i, w in enumerate(rs.sl_weights()):
        for j, av in enumerate(rs.simple_coroots):
            want = Fraction(1) if i == j else Fraction(0)
            assert rd.vdot(w, av) == want
    # traceless
    for w in rs.sl_weights():
        assert sum(w, Fraction(0)) == 0


def test_unsupported_rank():
    with pytest.raises(ValueError):
        rd.build("B", 1)
    with pytest.raises(ValueError):
        rd.build("A", 0)


def test_occurrence_labels_match_param_counts():
    for family in ALL_FAMILIES:
        for rank in ranks_for(family, 5):
            rs = rd.build(family, rank)
            word = rd.longest_reduced_word(rs)
            labels = rd.occurrence_labels(word)
            counts = rd.param_counts(family, rank)
            seen: dict[int, int] = {}
            for letter, occ in labels:
                seen[letter] = max(seen.get(letter, 0), occ)
            assert tuple(seen[i] for i in range(1, rank + 1)) == counts
