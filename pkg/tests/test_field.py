import random

import pytest

from ncdh.errors import ModulusMismatch, NotInvertible
from ncdh.field import Fp, Fp2, FieldElement, legendre, smallest_nonresidue, sqrt_mod


def test_modulus_validation():
    for bad in (0, 1, 2, 3, 4, 6, 9, 1 << 63):
        with pytest.raises(ValueError):
            Fp(bad)
    assert Fp(5).p == 5
    assert Fp((1 << 61) - 1).byte_width == 8


def test_basic_arithmetic_examples():
    f = Fp(7)
    assert f(3) + f(4) == f(0)
    assert f(4) * f(5) == f(6)  # 20 mod 7
    assert -f(0) == f(0)
    assert f(2) - f(5) == f(4)
    assert int(f(10)) == 3


def test_inverse_examples():
    f = Fp(7)
    assert f(1).inv() == f(1)
    assert f(4).inv() == f(2)  # extended-Euclid oracle: 4*2 = 8 = 1
    with pytest.raises(NotInvertible):
        f(0).inv()


def test_pow_examples():
    f = Fp(7)
    assert f(0) ** 0 == f(1)
    assert f(3) ** 4 == f(4)
    rng = random.Random(1)
    for _ in range(50):
        a = f(rng.randrange(1, 7))
        assert a ** 6 == f(1)  # Fermat
    big = Fp(1009)
    for _ in range(200):
        a = big(rng.randrange(1, 1009))
        assert a.inv() * a == big(1)
        assert a ** 1008 == big(1)
    # big exponents (up to 128 bits)
    e = (1 << 127) + 5
    assert f(3) ** e == f(pow(3, e, 7))
    assert f(3) ** (-2) == (f(3).inv()) ** 2


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        Fp(7)(1) + Fp(11)(1)


def test_field_axioms_sampled():
    f = Fp(1009)
    rng = random.Random(2)
    for _ in range(10_000):
        a, b, c = (f(rng.randrange(1009)) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a + b == b + a


def test_sqrt_examples():
    assert sqrt_mod(1, 7) == (1, 6)
    assert sqrt_mod(2, 7) == (3, 4)
    assert sqrt_mod(3, 7) == ()
    assert sqrt_mod(0, 7) == (0,)


def test_sqrt_exhaustive_small_primes():
    # both residue classes of p mod 4, against exhaustive squaring, p < 1000
    primes = [p for p in range(5, 1000) if all(p % q for q in range(2, p)) ]
    assert any(p % 4 == 1 for p in primes) and any(p % 4 == 3 for p in primes)
    for p in primes:
        roots_of = {}
        for r in range(p):
            roots_of.setdefault(r * r % p, []).append(r)
        for a in range(p):
            expected = tuple(sorted(roots_of.get(a, [])))
            assert sqrt_mod(a, p) == expected, (p, a)
        for r in sqrt_mod(2, p):
            assert r * r % p == 2


def test_sqrt_root_property_larger_prime():
    p = 1_000_003  # 3 mod 4
    q = 1_000_117  # 1 mod 4
    rng = random.Random(3)
    for prime in (p, q):
        for _ in range(200):
            a = rng.randrange(prime)
            roots = sqrt_mod(a, prime)
            for r in roots:
                assert r * r % prime == a
            if a != 0 and legendre(a, prime) == 1:
                assert len(roots) == 2


def test_smallest_nonresidue():
    assert smallest_nonresidue(5) == 2
    assert smallest_nonresidue(7) == 3
    assert smallest_nonresidue(11) == 2


def test_quadratic_extension_examples():
    ext = Fp2(7, 3)
    t = ext.element(0, 1)
    assert t * t == ext.element(3, 0)
    assert t.inv() == ext.element(0, 5)
    rng = random.Random(4)
    for _ in range(100):
        a = ext.random_element(rng)
        assert a * ext.one == a


def test_quadratic_extension_rejects_residue():
    with pytest.raises(ValueError):
        Fp2(7, 2)  # 2 = 3^2 mod 7


def test_fp2_inverse_and_pow():
    ext = Fp2(101)
    rng = random.Random(5)
    for _ in range(200):
        a = ext.random_element(rng)
        if a.norm() == 0:
            continue
        assert a * a.inv() == ext.one
        assert a ** (101 * 101 - 1) == ext.one
    with pytest.raises(NotInvertible):
        ext.zero.inv()


def test_frobenius_is_conjugation():
    ext = Fp2(101)
    rng = random.Random(6)
    for _ in range(300):
        a = ext.random_element(rng)
        assert a ** 101 == a.conj()


def test_norm_multiplicativity():
    ext = Fp2(1009)
    rng = random.Random(7)
    for _ in range(300):
        a, b = ext.random_element(rng), ext.random_element(rng)
        assert (a * b).norm() == a.norm() * b.norm() % 1009


def test_sqrt_of_base_covers_everything():
    ext = Fp2(101)
    for a in range(101):
        r = ext.sqrt_of_base(a)
        assert r * r == ext.embed(a)


def test_serialization_roundtrip():
    f = Fp(1009)
    rng = random.Random(8)
    for _ in range(100):
        a = f.random_element(rng)
        assert f.decode(f.encode(a)) == a
        assert f.from_hex(f.to_hex(a)) == a
    assert len(f.encode(f(1))) == 2
    assert f.to_hex(f(255)) == "00ff"
    with pytest.raises(ValueError):
        f.decode(b"\xff\xff")  # 65535 >= p is non-canonical
    with pytest.raises(ValueError):
        f.decode(b"\x01")


def test_field_element_hash_consistency():
    f = Fp(101)
    assert hash(f(5)) == hash(FieldElement(5, 101))
    assert len({f(1), f(1), f(2)}) == 2
