"""Classification of projective matrix groups over small fields: field and
matrix arithmetic, closure, and the full decision cascade."""

import random
from collections import Counter

import pytest

from galim import dickson
from galim.arith import multiplicative_order
from galim.dickson import ClosureOverflowError, GFq, Mat2, identity_mat


F7 = GFq(7)
F11 = GFq(11)
F13 = GFq(13)
F49 = GFq(7, 2)


def mats(field, *rows):
    return [Mat2(field, *r) for r in rows]


class TestGFq:
    def test_prime_field_ops(self):
        f = GFq(11)
        for a in range(11):
            for b in range(11):
                assert f.add(a, b) == (a + b) % 11
                assert f.mul(a, b) == a * b % 11
            if a:
                assert f.mul(a, f.inv(a)) == 1

    def test_extension_field_is_a_field(self):
        f = GFq(7, 2)
        assert f.q == 49
        assert f.nonresidue == 3  # least nonsquare mod 7
        rng = random.Random(20260814)
        for _ in range(120):
            a, b, c = (rng.randrange(49) for _ in range(3))
            assert f.mul(a, b) == f.mul(b, a)
            assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
            assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
        for a in range(1, 49):
            assert f.mul(a, f.inv(a)) == 1

    def test_extension_embeds_prime_field(self):
        f = GFq(7, 2)
        for a in range(7):
            for b in range(7):
                assert f.mul(a, b) == a * b % 7

    def test_sqrt(self):
        for f in (GFq(11), GFq(7, 2)):
            roots = 0
            for a in range(f.q):
                r = f.sqrt(a)
                if r is not None:
                    roots += 1
                    assert f.mul(r, r) == a
            # 0 plus exactly (q-1)/2 nonzero squares
            assert roots == (f.q - 1) // 2 + 1

    def test_ext_nonresidue(self):
        for f in (GFq(7), GFq(7, 2), GFq(13)):
            n = f.ext_nonresidue()
            assert f.sqrt(n) is None

    def test_inv_table(self):
        f = GFq(13)
        t = f.inv_table()
        assert t[0] == 0
        assert all(f.mul(a, int(t[a])) == 1 for a in range(1, 13))

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            GFq(2)
        with pytest.raises(ValueError):
            GFq(9)
        with pytest.raises(ValueError):
            GFq(7, 3)


class TestMat2:
    def test_multiplication_matches_manual(self):
        rng = random.Random(3)
        f = GFq(13)
        for _ in range(50):
            m = Mat2(f, *(rng.randrange(13) for _ in range(4)))
            n = Mat2(f, *(rng.randrange(13) for _ in range(4)))
            prod = m * n
            assert prod.a == (m.a * n.a + m.b * n.c) % 13
            assert prod.b == (m.a * n.b + m.b * n.d) % 13
            assert prod.c == (m.c * n.a + m.d * n.c) % 13
            assert prod.d == (m.c * n.b + m.d * n.d) % 13

    def test_det_multiplicative(self):
        rng = random.Random(4)
        f = GFq(11)
        for _ in range(40):
            m = Mat2(f, *(rng.randrange(11) for _ in range(4)))
            n = Mat2(f, *(rng.randrange(11) for _ in range(4)))
            assert (m * n).det() == f.mul(m.det(), n.det())

    def test_adjugate_gives_inverse(self):
        f = GFq(11)
        m = Mat2(f, 3, 1, 4, 5)
        prod = m * m.adjugate()
        assert prod.is_scalar() and prod.a == m.det()

    def test_scalar_normalized(self):
        f = GFq(7)
        m = Mat2(f, 2, 4, 6, 2)
        nm = m.scalar_normalized()
        assert nm == Mat2(f, 1, 2, 3, 1)
        assert Mat2(f, 0, 3, 5, 0).scalar_normalized() == Mat2(f, 0, 1, 4, 0)

    def test_entries_validated(self):
        with pytest.raises(ValueError):
            Mat2(F7, 7, 0, 0, 1)
        with pytest.raises(ValueError):
            Mat2(F7, -1, 0, 0, 1)

    def test_projective_order(self):
        assert dickson.projective_order(identity_mat(F7)) == 1
        assert dickson.projective_order(Mat2(F7, 3, 0, 0, 3)) == 1
        for g in range(2, 7):
            m = Mat2(F7, g, 0, 0, 1)
            assert dickson.projective_order(m) == multiplicative_order(g, 7)
        with pytest.raises(ValueError):
            dickson.projective_order(Mat2(F7, 1, 1, 1, 1))


class TestClosure:
    def test_sl2_f7(self):
        got = dickson.closure(mats(F7, (0, 1, 6, 0), (1, 1, 0, 1)))
        assert got is not None and len(got) == 168

    def test_adding_nonsquare_scalar_determinant_doubles(self):
        got = dickson.closure(mats(F7, (0, 1, 6, 0), (1, 1, 0, 1), (3, 0, 0, 1)))
        assert got is not None and len(got) == 336

    def test_all_elements_normalized_and_closed(self):
        got = dickson.closure(mats(F7, (3, 0, 0, 1), (0, 1, 1, 0)))
        assert got is not None
        assert all(m == m.scalar_normalized() for m in got)
        for x in got:
            for y in got:
                assert (x * y).scalar_normalized() in got

    def test_overflow_returns_none(self):
        assert dickson.closure(mats(F7, (0, 1, 6, 0), (1, 1, 0, 1)), budget=100) is None

    def test_rejects_mixed_fields_and_singular(self):
        with pytest.raises(ValueError):
            dickson.closure([identity_mat(F7), identity_mat(F11)])
        with pytest.raises(ValueError):
            dickson.closure(mats(F7, (1, 1, 1, 1)))
        with pytest.raises(ValueError):
            dickson.closure([])


# generator tuples -> expected (order, label) over F7 unless stated
CASCADE_CASES = [
    # trivial and scalar-only input
    ([(1, 0, 0, 1)], 1, "borel"),
    ([(4, 0, 0, 4)], 1, "borel"),
    # split Cartan (cyclic, both fixed lines rational): reducible wins
    ([(3, 0, 0, 1)], 6, "borel"),
    # full Borel
    ([(3, 0, 0, 1), (1, 1, 0, 1)], 42, "borel"),
    # dihedral of order 12 around the split torus
    ([(3, 0, 0, 1), (0, 1, 1, 0)], 12, "dihedral-split"),
    # Klein four group: split and nonsplit normalizers both contain it
    ([(1, 0, 0, 6), (0, 1, 1, 0)], 4, "dihedral-ambiguous"),
    # the full PSL and PGL
    ([(0, 1, 6, 0), (1, 1, 0, 1)], 168, "large-PSL(7)"),
    ([(0, 1, 6, 0), (1, 1, 0, 1), (3, 0, 0, 1)], 336, "large-PGL(7)"),
    # exceptional subgroups (generators found by randomized search, frozen)
    ([(0, 1, 3, 2), (0, 1, 5, 0)], 12, "exceptional-A4"),
    ([(0, 1, 3, 1), (1, 0, 1, 2)], 24, "exceptional-S4"),
]


class TestClassifyCascade:
    @pytest.mark.parametrize("codes,order,label", CASCADE_CASES)
    def test_f7_corpus(self, codes, order, label):
        rep = dickson.classify(mats(F7, *codes))
        assert rep.group_order == order
        assert rep.canonical_label == label
        assert (rep.p, rep.r, rep.q) == (7, 1, 7)

    def test_a5_over_f11(self):
        rep = dickson.classify(mats(F11, (0, 1, 2, 1), (0, 1, 6, 0)))
        assert rep.group_order == 60
        assert rep.exceptional == "A5"
        assert rep.canonical_label == "exceptional-A5"

    def test_exceptional_order_statistics(self):
        # independent structure check: A4 has 3 involutions and 8 elements
        # of order 3; S4 adds 6 four-cycles
        closure = dickson.closure(mats(F7, (0, 1, 3, 2), (0, 1, 5, 0)))
        stats = Counter(dickson.projective_order(m) for m in closure)
        assert dict(stats) == {1: 1, 2: 3, 3: 8}
        closure = dickson.closure(mats(F7, (0, 1, 3, 1), (1, 0, 1, 2)))
        stats = Counter(dickson.projective_order(m) for m in closure)
        assert dict(stats) == {1: 1, 2: 9, 3: 8, 4: 6}

    def test_dihedral_split_structure(self):
        closure = dickson.closure(mats(F7, (3, 0, 0, 1), (0, 1, 1, 0)))
        stats = Counter(dickson.projective_order(m) for m in closure)
        assert dict(stats) == {1: 1, 2: 7, 3: 2, 6: 2}  # dihedral of order 12

    def test_nonsplit_cartan_f7(self):
        # char poly of (1,3,1,1) has discriminant 12 = 5, a nonsquare mod 7,
        # and a cyclic group of order 8 in PGL2(F7) can only be that torus
        g = Mat2(F7, 1, 3, 1, 1)
        assert dickson.projective_order(g) == 8
        rep = dickson.classify([g])
        assert rep.group_order == 8
        assert rep.nonsplit_cartan and not rep.split_cartan and not rep.reducible
        assert rep.canonical_label == "dihedral-nonsplit"

    def test_nonsplit_normalizer_f7(self):
        rep = dickson.classify(mats(F7, (1, 3, 1, 1), (1, 0, 0, 6)))
        assert rep.group_order == 16
        assert rep.in_normalizer_nonsplit and not rep.in_normalizer_split
        assert not rep.nonsplit_cartan  # the flip is not in the torus itself
        assert rep.canonical_label == "dihedral-nonsplit"

    def test_split_cartan_flags(self):
        rep = dickson.classify(mats(F7, (3, 0, 0, 1)))
        assert rep.reducible and rep.split_cartan
        assert rep.in_normalizer_split
        assert rep.canonical_label == "borel"

    def test_involution_cases(self):
        rational = dickson.classify(mats(F7, (0, 1, 1, 0)))
        assert rational.group_order == 2
        assert rational.reducible and rational.canonical_label == "borel"
        assert rational.in_normalizer_split and rational.in_normalizer_nonsplit
        g = Mat2(F7, 0, 1, 3, 0)  # fixes t^2 = 5, nonrational
        nonrational = dickson.classify([g])
        assert nonrational.group_order == 2
        assert not nonrational.reducible
        assert nonrational.canonical_label == "dihedral-ambiguous"

    def test_psl2_f13(self):
        rep = dickson.classify(mats(F13, (0, 1, 12, 0), (1, 1, 0, 1)))
        assert rep.group_order == 1092
        assert rep.canonical_label == "large-PSL(13)"

    def test_dihedral_split_f13(self):
        rep = dickson.classify(mats(F13, (2, 0, 0, 1), (0, 1, 1, 0)))
        assert rep.group_order == 24
        assert rep.canonical_label == "dihedral-split"

    def test_extension_field_psl_and_pgl(self):
        # unipotents with offsets 1 and x (code 7) span GF(49) additively,
        # so they generate the full SL2; 1+x (code 8) is a nonsquare since
        # its norm 5 is a cube root of -1 mod 7
        rep = dickson.classify(mats(F49, (1, 1, 0, 1), (1, 0, 7, 1)))
        assert rep.group_order == 58800
        assert rep.canonical_label == "large-PSL(49)"
        rep = dickson.classify(mats(F49, (1, 1, 0, 1), (1, 0, 7, 1), (8, 0, 0, 1)))
        assert rep.group_order == 117600
        assert rep.canonical_label == "large-PGL(49)"

    def test_nonsquare_determinant_reaches_pgl(self):
        # det of the antidiagonal flip below is -(6+6x), also a nonsquare
        rep = dickson.classify(mats(F49, (0, 1, 48, 0), (1, 1, 0, 1)))
        assert rep.group_order == 117600
        assert rep.canonical_label == "large-PGL(49)"

    def test_prime_field_group_inside_extension(self):
        # the same PSL2(F7) generators, read in GF(49): q0 = p^1 branch
        rep = dickson.classify(mats(F49, (0, 1, 6, 0), (1, 1, 0, 1)))
        assert rep.group_order == 168
        assert rep.canonical_label == "large-PSL(7)"

    def test_overflow_raises(self):
        with pytest.raises(ClosureOverflowError):
            dickson.classify(mats(F7, (0, 1, 6, 0), (1, 1, 0, 1)), budget=50)

    def test_small_characteristic_rejected(self):
        f5 = GFq(5)
        with pytest.raises(ValueError):
            dickson.classify([identity_mat(f5)])


def random_invertible(rng, field):
    while True:
        m = Mat2(field, *(rng.randrange(field.q) for _ in range(4)))
        if m.det() != 0:
            return m


class TestInvariance:
    CASES = [
        (F7, [(3, 0, 0, 1), (0, 1, 1, 0)]),
        (F7, [(0, 1, 3, 2), (0, 1, 5, 0)]),
        (F7, [(0, 1, 6, 0), (1, 1, 0, 1)]),
        (F7, [(1, 3, 1, 1)]),
        (F11, [(0, 1, 2, 1), (0, 1, 6, 0)]),
        (F13, [(2, 0, 0, 1), (0, 1, 1, 0)]),
    ]

    def test_conjugation_invariance(self):
        rng = random.Random(20260814)
        for field, codes in self.CASES:
            base = dickson.classify(mats(field, *codes))
            for _ in range(5):
                h = random_invertible(rng, field)
                hinv = h.adjugate()
                conj = [h * g * hinv for g in mats(field, *codes)]
                rep = dickson.classify(conj)
                assert rep.group_order == base.group_order
                assert rep.canonical_label == base.canonical_label
                assert rep.exceptional == base.exceptional
                assert rep.large == base.large

    def test_scalar_invariance(self):
        rng = random.Random(7)
        for field, codes in self.CASES:
            base = dickson.classify(mats(field, *codes))
            scaled = []
            for g in mats(field, *codes):
                s = rng.randrange(1, field.q)
                scaled.append(Mat2(field, *(field.mul(s, e) for e in (g.a, g.b, g.c, g.d))))
            assert dickson.classify(scaled) == base
