"""Root datum pairings, reflections and positive-root closures."""

from fractions import Fraction

import pytest

from hodgekl.rootdata import RootDatum, Weight, builtin_root_datum

F = Fraction


@pytest.fixture(scope="module")
def sl2():
    return builtin_root_datum("SL2")


@pytest.fixture(scope="module")
def sl3():
    return builtin_root_datum("SL3")


@pytest.fixture(scope="module")
def sp4():
    return builtin_root_datum("Sp4")


def test_cartan_diagonal(sl2, sl3, sp4):
    for rd in (sl2, sl3, sp4):
        alpha = rd.simple_roots[0]
        assert rd.pair(Weight.make(alpha), rd.simple_coroots[0]) == 2


def test_pair_linear(sl2):
    lam = Weight.make([F(2, 5)])  # 0.4 times the fundamental weight
    assert sl2.pair(lam, sl2.simple_coroots[0]) == F(2, 5)


def test_rho_pairing(sl3):
    assert sl3.pair(sl3.rho(), sl3.simple_coroots[0]) == 1
    assert sl3.pair(sl3.rho(), sl3.simple_coroots[1]) == 1


def test_pair_dimension_mismatch(sl3):
    with pytest.raises(ValueError):
        sl3.pair(Weight.make([1]), sl3.simple_coroots[0])


def test_is_integral_half(sl2):
    lam = Weight.make([F(1, 2)])
    assert not sl2.is_integral(lam, sl2.simple_roots[0])


def test_zero_weight_integral_everywhere(sl3):
    lam = Weight.zero(2)
    for root, _ in sl3.positive_roots():
        assert sl3.is_integral(lam, root)


def test_half_omega1_integral_on_alpha2(sl3):
    lam = Weight.make([F(1, 2), 0])
    assert sl3.pair(lam, sl3.simple_coroots[1]) == 0
    assert sl3.is_integral(lam, sl3.simple_roots[1])
    assert not sl3.is_integral(lam, sl3.simple_roots[0])


def test_is_integral_rejects_nonroot(sl3):
    with pytest.raises(ValueError):
        sl3.is_integral(Weight.zero(2), (5, 5))


def test_reflect_rho(sl3):
    rho = sl3.rho()
    image = sl3.reflect(0, rho)
    alpha = Weight.make(sl3.simple_roots[0])
    assert image == rho - alpha


def test_reflect_zero_and_involution(sl3):
    zero = Weight.zero(2)
    assert sl3.reflect(1, zero) == zero
    lam = Weight.make([F(2, 3), F(-1, 7)])
    assert sl3.reflect(0, sl3.reflect(0, lam)) == lam


def test_reflect_needs_simple(sl3):
    with pytest.raises(ValueError):
        sl3.reflect(2, Weight.zero(2))


def test_positive_counts(sl2, sl3, sp4):
    assert len(sl2.positive_roots()) == 1
    assert len(sl3.positive_roots()) == 3
    assert len(sp4.positive_roots()) == 4
    assert len(builtin_root_datum("SL2xSL2").positive_roots()) == 2


def test_sl3_positive_roots_explicit(sl3):
    roots = [r for r, _ in sl3.positive_roots()]
    assert set(roots) == {(2, -1), (-1, 2), (1, 1)}


def test_reflection_permutes_other_positives(sl3, sp4):
    for rd in (sl3, sp4):
        for i in range(rd.n_simple):
            alpha = rd.simple_roots[i]
            others = {r for r, _ in rd.positive_roots()} - {tuple(alpha)}
            images = {rd.reflect_vector(i, r) for r in others}
            assert images == others


def test_integral_agrees_on_negative_root(sl3):
    lam = Weight.make([F(1, 3), F(1, 5)])
    for root, _ in sl3.positive_roots():
        neg = tuple(-x for x in root)
        assert sl3.is_integral(lam, root) == sl3.is_integral(lam, neg)


def test_non_finite_input_rejected():
    # affine-type Cartan matrix has off-diagonal product 4
    with pytest.raises(ValueError):
        RootDatum([[2, -2], [-2, 2]], [[1, 0], [0, 1]])


def test_json_roundtrip(sp4):
    again = RootDatum.from_json(sp4.to_json(), name="Sp4")
    assert again == sp4
    assert again.positive_roots() == sp4.positive_roots()


def test_coroot_lookup(sp4):
    for root, coroot in sp4.positive_roots():
        assert sp4.coroot(root) == coroot
        assert sp4.coroot(tuple(-x for x in root)) == tuple(-x for x in coroot)
