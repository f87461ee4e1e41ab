import random

import pytest

from helpers import pairwise_convolution
from ncdh.errors import NotInvertible
from ncdh.ncmatrix import SquareMatrix
from ncdh.s3 import (
    CAYLEY,
    CONV_INDEX,
    INVERSE,
    PERM_NAMES,
    PERMUTATIONS,
    SIGNS,
    STD_REP,
    GroupAlgebra,
    algebra_inverse,
    compose,
    is_invertible,
    regular_representation,
    vanishing_components,
    wedderburn_forward,
    wedderburn_inverse,
)
from ncdh.field import Fp


def test_basis_permutations_are_bijections():
    for img in PERMUTATIONS:
        assert sorted(img) == [1, 2, 3]
    assert len(set(PERMUTATIONS)) == 6


def test_composition_examples():
    names = {name: i for i, name in enumerate(PERM_NAMES)}
    e, c3, c3i, t12, t13, t23 = (names[k] for k in ("e", "(123)", "(132)", "(12)", "(13)", "(23)"))
    for g in range(6):
        assert compose(e, g) == g
        assert compose(g, e) == g
    assert compose(t12, c3) == t23
    assert compose(c3, c3i) == e


def test_group_axioms_exhaustive():
    # associativity over all 216 triples, unique identity, unique inverses
    for a in range(6):
        for b in range(6):
            for c in range(6):
                assert CAYLEY[CAYLEY[a][b]][c] == CAYLEY[a][CAYLEY[b][c]]
    identities = [e for e in range(6) if all(CAYLEY[e][g] == g and CAYLEY[g][e] == g for g in range(6))]
    assert identities == [0]
    for g in range(6):
        invs = [h for h in range(6) if CAYLEY[g][h] == 0 and CAYLEY[h][g] == 0]
        assert invs == [INVERSE[g]]


def test_conv_index_table():
    for h in range(6):
        for g in range(6):
            assert CONV_INDEX[h][g] == CAYLEY[INVERSE[h]][g]


def test_pinned_standard_representation():
    assert STD_REP[0] == ((1, 0), (0, 1))
    assert STD_REP[1] == ((0, -1), (1, -1))
    assert STD_REP[3] == ((0, 1), (1, 0))


def test_convolution_examples():
    ga = GroupAlgebra(7)
    x = ga.element((3, 1, 4, 1, 5, 2))
    assert ga.one * x == x
    assert x * ga.one == x
    assert ga.delta(1) * ga.delta(1) == ga.delta(2)
    y = ga.delta(0) + ga.delta(3)
    assert y * y == 2 * ga.delta(0) + 2 * ga.delta(3)


def test_convolution_matches_pairwise_oracle():
    ga = GroupAlgebra(101)
    rng = random.Random(1)
    for _ in range(500):
        a, b = ga.random_element(rng), ga.random_element(rng)
        assert a * b == pairwise_convolution(a, b)


def test_algebra_is_noncommutative():
    ga = GroupAlgebra(7)
    a, b = ga.delta(1), ga.delta(3)
    assert a * b != b * a


def test_wedderburn_forward_examples():
    ga = GroupAlgebra(7)
    w = wedderburn_forward(ga.one)
    assert (w.triv, w.sign, w.std) == (1, 1, ((1, 0), (0, 1)))
    w = wedderburn_forward(ga.delta(3))
    assert (w.triv, w.sign, w.std) == (1, 6, ((0, 1), (1, 0)))
    total = ga.zero
    for g in range(6):
        total = total + ga.delta(g)
    w = wedderburn_forward(total)
    assert (w.triv, w.sign, w.std) == (6, 0, ((0, 0), (0, 0)))


def test_wedderburn_inverse_examples():
    from ncdh.s3 import WedderburnImage

    ga = GroupAlgebra(7)
    assert wedderburn_inverse(WedderburnImage(1, 1, ((1, 0), (0, 1)), 7)) == ga.one
    assert wedderburn_inverse(WedderburnImage(0, 0, ((0, 0), (0, 0)), 7)) == ga.zero


def _std_mul(x, y, p):
    return tuple(
        tuple(sum(x[i][k] * y[k][j] for k in range(2)) % p for j in range(2))
        for i in range(2)
    )


def test_wedderburn_homomorphism_basis_and_random():
    p = 101
    ga = GroupAlgebra(p)
    # all 36 basis pairs
    for g in range(6):
        for h in range(6):
            wa = wedderburn_forward(ga.delta(g))
            wb = wedderburn_forward(ga.delta(h))
            wab = wedderburn_forward(ga.delta(g) * ga.delta(h))
            assert wab.triv == wa.triv * wb.triv % p
            assert wab.sign == wa.sign * wb.sign % p
            assert wab.std == _std_mul(wa.std, wb.std, p)
    rng = random.Random(2)
    for _ in range(10_000):
        a, b = ga.random_element(rng), ga.random_element(rng)
        wa, wb, wab = wedderburn_forward(a), wedderburn_forward(b), wedderburn_forward(a * b)
        assert wab.triv == wa.triv * wb.triv % p
        assert wab.sign == wa.sign * wb.sign % p
        assert wab.std == _std_mul(wa.std, wb.std, p)


def test_wedderburn_roundtrip():
    ga = GroupAlgebra(101)
    rng = random.Random(3)
    for _ in range(10_000):
        a = ga.random_element(rng)
        assert wedderburn_inverse(wedderburn_forward(a)) == a
    # and the reverse composition on images
    for _ in range(500):
        a = ga.random_element(rng)
        w = wedderburn_forward(a)
        assert wedderburn_forward(wedderburn_inverse(w)) == w


def test_inverse_examples():
    ga = GroupAlgebra(7)
    for g in range(6):
        assert algebra_inverse(ga.delta(g)) == ga.delta(INVERSE[g])
    assert algebra_inverse(ga.scalar(2)) == ga.scalar(pow(2, -1, 7))
    with pytest.raises(NotInvertible) as exc:
        algebra_inverse(ga.delta(0) + ga.delta(3))
    assert "sign" in exc.value.components


def test_inverse_is_two_sided():
    ga = GroupAlgebra(101)
    rng = random.Random(4)
    for _ in range(1000):
        a = ga.random_invertible(rng)
        ai = algebra_inverse(a)
        assert a * ai == ga.one
        assert ai * a == ga.one


def test_invertibility_matches_regular_representation_oracle():
    p = 101
    ga = GroupAlgebra(p)
    fp = Fp(p)
    rng = random.Random(5)
    both_kinds = {True: 0, False: 0}
    for _ in range(1000):
        a = ga.random_element(rng)
        reg = SquareMatrix(
            tuple(tuple(fp(v) for v in row) for row in regular_representation(a)), fp
        )
        from helpers import laplace_det

        oracle = not laplace_det(reg).is_zero()
        assert is_invertible(a) == oracle
        both_kinds[oracle] += 1
    assert both_kinds[True] > 0 and both_kinds[False] >= 0


def test_regular_representation_action():
    # column j of the matrix is the coefficient vector of a * delta_j
    ga = GroupAlgebra(101)
    rng = random.Random(6)
    for _ in range(100):
        a = ga.random_element(rng)
        reg = regular_representation(a)
        for j in range(6):
            prod = a * ga.delta(j)
            assert tuple(reg[i][j] for i in range(6)) == prod.coeffs


def test_vanishing_component_report():
    ga = GroupAlgebra(7)
    assert vanishing_components(ga.one) == ()
    assert vanishing_components(ga.zero) == ("trivial", "sign", "standard")
    assert "sign" in vanishing_components(ga.delta(0) + ga.delta(3))


def test_signs_table():
    assert SIGNS == (1, 1, 1, -1, -1, -1)


def test_scalar_multiplication():
    ga = GroupAlgebra(11)
    a = ga.element((1, 2, 3, 4, 5, 6))
    assert 3 * a == a + a + a
    assert a * 3 == 3 * a
    assert -a + a == ga.zero


def test_algebra_pow():
    ga = GroupAlgebra(11)
    rng = random.Random(7)
    a = ga.random_invertible(rng)
    assert a ** 0 == ga.one
    assert a ** 3 == a * a * a
    assert a ** (-1) == algebra_inverse(a)
