import json
import random

import numpy as np
import pytest

import ncdh._fpmat as fpmat
from helpers import random_invertible_platform
from ncdh.attacks import (
    CommutativeInstance,
    bsgs_dlog,
    charpoly2,
    conjugation_table_attack,
    crt_pair,
    determinant_reduction,
    eigenvalue_attack,
    power_determinant_scan,
    random_commutative_instance,
    report_to_dict,
    solve_torus_conjugator,
)
from ncdh.errors import (
    Exhausted,
    NotInvertible,
    RepeatedEigenvalue,
    ResourceCap,
    ScalarX,
    Uninformative,
)
from ncdh.field import FieldElement, Fp2
from ncdh.platform import warmup_backend
from ncdh.protocol import exchange, setup

warmup_backend()


def test_bsgs_examples():
    assert bsgs_dlog(FieldElement(2, 11), FieldElement(1, 11), 10) == 0
    assert bsgs_dlog(FieldElement(2, 11), FieldElement(7, 11), 10) == 7
    # powers of 3 mod 11 are {3, 9, 5, 4, 1}: 2 is not among them
    assert bsgs_dlog(FieldElement(3, 11), FieldElement(2, 11), 5) is None


def test_bsgs_returns_least_solution():
    p = 101
    rng = random.Random(1)
    for _ in range(300):
        g_val = rng.randrange(2, p)
        g = FieldElement(g_val, p)
        # order of g divides p-1; search with the full group order
        x_true = rng.randrange(0, p - 1)
        h = g ** x_true
        x = bsgs_dlog(g, h, p - 1)
        assert x is not None and g ** x == h
        # least: no smaller solution
        for smaller in range(max(0, x - 3), x):
            assert g ** smaller != h


def test_bsgs_in_quadratic_extension():
    ext = Fp2(101)
    g = ext.element(3, 5)
    order = 101 * 101 - 1
    x_true = 4711
    h = g ** x_true
    x = bsgs_dlog(g, h, order)
    assert x is not None and g ** x == h


def test_crt_pair():
    assert crt_pair(0, 3, 3, 6) == (3, 6)
    assert crt_pair(2, 4, 0, 6) == (6, 12)
    assert crt_pair(1, 4, 0, 6) is None  # parity conflict mod gcd = 2
    r, m = crt_pair(1, 4, 5, 6)
    assert m == 12 and r % 4 == 1 and r % 6 == 5


@pytest.fixture(scope="module")
def transcript31():
    params = setup(31, seed=3, steps=6, min_order=64, max_order=1 << 14)
    result = exchange(params, 11, 12)
    return params, result


def test_table_attack_recovers_key_both_modes(transcript31):
    params, result = transcript31
    q = params.p
    honest = result.alice_secret.K
    reports = {}
    for mode in ("naive", "normalized"):
        rep = conjugation_table_attack(params, result.alice.Y, result.bob.Y, mode=mode)
        assert rep.recovered_key == honest
        reports[mode] = rep
    assert reports["naive"].recovered_key == reports["normalized"].recovered_key
    assert reports["naive"].ops <= params.n + 2 * q * q
    assert reports["normalized"].ops <= params.n + 2 * q
    assert reports["normalized"].candidates_tested <= q - 1
    assert reports["naive"].table_size == params.n


def test_table_attack_soundness_identity(transcript31):
    # any hit (k0, T0) satisfies T0 Y_A T0^-1 = X^k0; check the reported one
    params, result = transcript31
    rep = conjugation_table_attack(params, result.alice.Y, result.bob.Y)
    tx, ty = rep.recovered_torus  # recovered T = T0^-1
    from ncdh.platform import TorusElement

    t_rec = TorusElement(tx, ty, params.p)
    assert t_rec.conjugate(params.X.pow(rep.recovered_a)) == result.alice.Y


def test_table_attack_exhausted_on_random_token(transcript31):
    params, result = transcript31
    rng = random.Random(99)
    for _ in range(5):  # retry the rare accident of a valid random transcript
        bad = random_invertible_platform(rng, params.p)
        try:
            conjugation_table_attack(params, bad, result.bob.Y, mode="normalized")
        except Exhausted:
            return
    pytest.fail("five random tokens all matched the table")


def test_table_attack_resource_caps(transcript31):
    params, result = transcript31
    with pytest.raises(ResourceCap):
        conjugation_table_attack(params, result.alice.Y, result.bob.Y, max_table=16)
    with pytest.raises(ResourceCap):
        conjugation_table_attack(
            params, result.alice.Y, result.bob.Y, mode="naive", max_naive_p=16
        )


def test_table_attack_rejects_bad_tokens(transcript31):
    params, result = transcript31
    from ncdh.s3 import GroupAlgebra
    from ncdh.platform import PlatformMatrix

    ga = GroupAlgebra(params.p)
    singular = PlatformMatrix.from_entries(ga.zero, ga.zero, ga.zero, ga.one)
    with pytest.raises(NotInvertible):
        conjugation_table_attack(params, singular, result.bob.Y)
    other_p = random_invertible_platform(random.Random(1), 61)
    with pytest.raises(ValueError):
        conjugation_table_attack(params, other_p, result.bob.Y)


def test_table_attack_threads_agree(transcript31):
    params, result = transcript31
    for mode in ("naive", "normalized"):
        seq = conjugation_table_attack(params, result.alice.Y, result.bob.Y, mode=mode, threads=1)
        par = conjugation_table_attack(params, result.alice.Y, result.bob.Y, mode=mode, threads=4)
        assert par.recovered_key == seq.recovered_key
        assert par.recovered_a == seq.recovered_a
        assert par.recovered_torus == seq.recovered_torus


def test_charpoly2_examples():
    assert charpoly2(np.eye(2, dtype=np.int64), 7) == (2, 1)
    assert charpoly2(np.array([[1, 2], [3, 4]]), 7) == (5, 5)
    rng = random.Random(2)
    p = 101
    for _ in range(100):
        m = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
        while True:
            pm = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
            if fpmat.det_mod(pm, p):
                break
        conj = fpmat.matmul(fpmat.matmul(pm, m, p), fpmat.inv_mod(pm, p), p)
        assert charpoly2(conj, p) == charpoly2(m, p)


def test_determinant_reduction_example():
    p = 11
    x = np.array([[2, 0], [0, 1]])
    t = np.array([[1, 2], [2, 1]])
    xa = fpmat.matpow(x, 5, p)
    ya = fpmat.matmul(fpmat.matmul(t, xa, p), fpmat.inv_mod(t, p), p)
    inst = CommutativeInstance.build(p, x, ya, ya)
    cong = determinant_reduction(inst)
    assert (cong.residue, cong.modulus) == (5, 10)


def test_determinant_reduction_uninformative():
    p = 11
    x = np.array([[1, 1], [0, 1]])  # det 1
    inst = CommutativeInstance.build(p, x, x, x)
    with pytest.raises(Uninformative):
        determinant_reduction(inst)


def test_determinant_reduction_congruence_property():
    rng = random.Random(3)
    for _ in range(30):
        inst, a, _, _ = random_commutative_instance(rng, 1009)
        try:
            cong = determinant_reduction(inst)
        except Uninformative:
            continue
        assert a % cong.modulus == cong.residue


def test_eigenvalue_attack_worked_example():
    p = 7
    x = np.array([[2, 0], [0, 3]])
    t = np.array([[1, 2], [2, 1]])
    a = 3
    ya = fpmat.matmul(fpmat.matmul(t, fpmat.matpow(x, a, p), p), fpmat.inv_mod(t, p), p)
    t2 = np.array([[2, 1], [1, 2]])
    b = 4
    yb = fpmat.matmul(fpmat.matmul(t2, fpmat.matpow(x, b, p), p), fpmat.inv_mod(t2, p), p)
    honest = fpmat.matmul(fpmat.matmul(t, fpmat.matpow(yb, a, p), p), fpmat.inv_mod(t, p), p)
    rep = eigenvalue_attack(CommutativeInstance.build(p, x, ya, yb))
    # ord(2) = 3, ord(3) = 6 mod 7: the exponent comes back mod lcm = 6
    assert rep.recovered_a == a % 6
    assert np.array_equal(rep.recovered_key, honest)


def test_eigenvalue_attack_nonsplit():
    rng = random.Random(4)
    for _ in range(10):
        inst, a, b, honest = random_commutative_instance(rng, 1009, nonsplit=True)
        tr, det = charpoly2(inst.x, 1009)
        disc = (tr * tr - 4 * det) % 1009
        from ncdh.field import legendre

        assert legendre(disc, 1009) == -1
        rep = eigenvalue_attack(inst)
        assert np.array_equal(rep.recovered_key, honest)


def test_eigenvalue_attack_split():
    rng = random.Random(5)
    for _ in range(10):
        inst, a, b, honest = random_commutative_instance(rng, 1009, nonsplit=False)
        rep = eigenvalue_attack(inst)
        assert np.array_equal(rep.recovered_key, honest)


def test_eigenvalue_attack_degenerate_inputs():
    p = 7
    scalar = np.array([[2, 0], [0, 2]])
    with pytest.raises(ScalarX):
        eigenvalue_attack(CommutativeInstance.build(p, scalar, scalar, scalar))
    shear = np.array([[1, 1], [0, 1]])  # repeated eigenvalue 1
    with pytest.raises(RepeatedEigenvalue):
        eigenvalue_attack(CommutativeInstance.build(p, shear, shear, shear))


def test_eigenvalue_attack_invalid_transcript():
    from ncdh.errors import NoTorusSolution

    p = 7
    x = np.array([[2, 0], [0, 3]])
    fake = np.array([[2, 0], [0, 2]])  # {2, 2} is no {2^k, 3^k} eigenvalue pair
    with pytest.raises(NoTorusSolution):
        eigenvalue_attack(CommutativeInstance.build(p, x, fake, fake))


def test_solve_torus_conjugator():
    p = 101
    rng = random.Random(6)
    for _ in range(50):
        while True:
            tx, ty = rng.randrange(p), rng.randrange(p)
            if (tx * tx - ty * ty) % p:
                break
        t = np.array([[tx, ty], [ty, tx]], dtype=np.int64)
        m = np.array([[rng.randrange(p) for _ in range(2)] for _ in range(2)])
        b = fpmat.matmul(fpmat.matmul(t, m, p), fpmat.inv_mod(t, p), p)
        sol = solve_torus_conjugator(m, b, p)
        assert sol is not None
        sx, sy = sol
        s = np.array([[sx, sy], [sy, sx]], dtype=np.int64)
        assert np.array_equal(fpmat.matmul(s, m, p), fpmat.matmul(b, s, p))
    # no torus relates matrices with different charpolys
    assert solve_torus_conjugator(np.array([[1, 1], [0, 1]]), np.array([[2, 0], [0, 2]]), p) is None


def test_instance_generator_validates():
    with pytest.raises(NotInvertible):
        CommutativeInstance.build(7, [[0, 0], [0, 0]], [[1, 0], [0, 1]], [[1, 0], [0, 1]])


def test_power_determinant_scan_and_embeddings():
    result = power_determinant_scan(101, 100, random.Random(7))
    assert result.trials == 100
    assert 1 <= result.differs <= 100

    # commutative embeddings always agree: scalar-multiple-of-identity entries
    from ncdh.ncmatrix import SquareMatrix, nc_determinant
    from ncdh.s3 import GroupAlgebra

    ga = GroupAlgebra(101)
    rng = random.Random(8)
    for _ in range(20):
        entries = [[ga.scalar(rng.randrange(101)) for _ in range(2)] for _ in range(2)]
        if not (entries[1][1].coeffs[0] and (entries[1][1] * entries[1][1]).coeffs[0]):
            continue
        m = SquareMatrix((tuple(entries[0]), tuple(entries[1])), ga)
        sq = m * m
        try:
            d1, d2 = nc_determinant(m), nc_determinant(sq)
        except NotInvertible:
            continue
        assert d2 == d1 * d1
    ident = SquareMatrix.identity(ga, 2)
    assert nc_determinant(ident * ident) == nc_determinant(ident) * nc_determinant(ident)


def test_report_serialization(transcript31):
    from ncdh.attacks import report_from_dict

    params, result = transcript31
    rep = conjugation_table_attack(params, result.alice.Y, result.bob.Y)
    d = report_to_dict(rep)
    assert {"recovered_a", "T", "ops", "table_size", "elapsed_ms", "mode"} <= set(d)
    assert int(d["recovered_a"], 16) == rep.recovered_a
    assert [int(v, 16) for v in d["T"]] == list(rep.recovered_torus)
    assert d["mode"] == "normalized"
    back = report_from_dict(json.loads(json.dumps(d)), params.p)
    assert back.recovered_a == rep.recovered_a
    assert back.recovered_torus == rep.recovered_torus
    assert back.recovered_key == rep.recovered_key
    assert back.ops == rep.ops
    # the commutative-platform shape reads back too
    rng = random.Random(31)
    inst, a, b, honest = random_commutative_instance(rng, 1009)
    erep = eigenvalue_attack(inst)
    eback = report_from_dict(json.loads(json.dumps(report_to_dict(erep))), 1009)
    assert np.array_equal(eback.recovered_key, erep.recovered_key)
