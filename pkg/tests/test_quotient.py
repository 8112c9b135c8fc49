import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from derivedgrowth.quotient import (BudgetExceeded, NotFound, RhoCertificate, compute_rho,
                                    eval_word, find_girth, make_direct_product,
                                    make_finite_perm, make_free_abelian,
                                    make_nilpotent_class2, make_subdirect, random_perm)
from derivedgrowth.words import (PhiSpec, RankMismatch, commutator, free_reduce, inverse,
                                 is_cyclically_reduced, parse_word, word_key)
from oracles import brute_relations, heisenberg

S3 = [[2, 3, 1], [2, 1, 3]]


def W(text):
    return parse_word(text, reduce=False)


def all_oracles():
    return [
        make_free_abelian(2),
        make_free_abelian(3),
        make_nilpotent_class2(2),
        make_nilpotent_class2(3),
        make_finite_perm(2, S3, 3),
        make_subdirect(PhiSpec((1, 0)), make_finite_perm(2, [[2, 3, 4, 5, 1], [2, 1, 3, 4, 5]], 5)),
        make_direct_product(make_free_abelian(2), make_finite_perm(2, [[2, 1], [1, 2]], 2)),
    ]


ORACLES = all_oracles()


def words_for(m, max_size=12):
    letters = [x for i in range(1, m + 1) for x in (i, -i)]
    return st.lists(st.sampled_from(letters), max_size=max_size).map(tuple)


@st.composite
def oracle_and_words(draw, n=2):
    o = draw(st.sampled_from(ORACLES))
    return (o,) + tuple(draw(words_for(o.m)) for _ in range(n))


class TestExamples:
    def test_free_abelian(self):
        o = make_free_abelian(2)
        assert eval_word(o, W("a b A")) == (0, 1)
        assert eval_word(o, commutator(W("a"), W("b"))) == (0, 0)
        assert eval_word(o, W("a a b")) == (2, 1)
        assert eval_word(o, W("a b a")) == (2, 1)
        assert eval_word(o, ()) == o.identity()

    def test_nilpotent(self):
        o = make_nilpotent_class2(2)
        assert eval_word(o, W("a b")) == ((1, 1), (0,))
        assert eval_word(o, W("b a")) == ((1, 1), (-1,))
        assert eval_word(o, W("A B a b")) == ((0, 0), (1,))
        ab = commutator(W("a"), W("b"))
        assert eval_word(o, commutator(ab, W("a"))) == o.identity()

    def test_finite_perm(self):
        triv = make_finite_perm(2, [[1, 2], [1, 2]], 2)
        assert all(triv.is_identity(triv.eval_word(w)) for w in [W("a"), W("b A b")])
        same = make_finite_perm(2, [[2, 1], [2, 1]], 2)
        assert same.is_identity(same.eval_word(W("a B")))
        o = make_finite_perm(2, S3, 3)
        assert o.is_identity(o.eval_word(W("a a a")))
        assert not o.is_identity(o.eval_word(W("a a")))
        assert o.order() == 6

    def test_bad_permutations(self):
        with pytest.raises(ValueError):
            make_finite_perm(2, [[1, 1, 2], [1, 2, 3]], 3)
        with pytest.raises(ValueError):
            make_finite_perm(2, [[1, 2, 4], [1, 2, 3]], 3)
        with pytest.raises(ValueError):
            make_finite_perm(2, [[1, 2, 3]], 3)

    def test_subdirect_is_componentwise(self):
        phi = PhiSpec((1, -1))
        fin = make_finite_perm(2, S3, 3)
        o = make_subdirect(phi, fin)
        rng = random.Random(1)
        for _ in range(50):
            w = tuple(rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 10)))
            z, p = o.eval_word(w)
            assert z == sum(phi.letter_value(x) for x in w)
            assert p == fin.eval_word(w)

    def test_subdirect_with_trivial_finite_part_is_Z(self):
        o = make_subdirect(PhiSpec((1, 0)), make_finite_perm(2, [[1], [1]], 1))
        assert o.eval_word(W("a b a")) == (2, (0,))
        res = compute_rho(o, 4)
        assert res.rho == 1 and res.witness == W("b")

    def test_rank_mismatch(self):
        with pytest.raises(RankMismatch):
            make_free_abelian(2).eval_word((3,))
        with pytest.raises(RankMismatch):
            make_subdirect(PhiSpec((1, 0, 0)), make_finite_perm(2, S3, 3))


class TestHomomorphism:
    @given(oracle_and_words())
    def test_product(self, case):
        o, u, v = case
        assert o.eval_word(u + v) == o.mul(o.eval_word(u), o.eval_word(v))

    @given(oracle_and_words(n=1))
    def test_inverse_and_reduction(self, case):
        o, u = case
        assert o.eval_word(inverse(u)) == o.inv(o.eval_word(u))
        assert o.eval_word(free_reduce(u)) == o.eval_word(u)

    @given(oracle_and_words(n=1))
    def test_encoding_round_trip(self, case):
        o, u = case
        g = o.eval_word(u)
        b = o.encode(g)
        assert len(b) == o.width
        assert o.decode(b) == g

    @given(oracle_and_words(n=1))
    def test_batch_step_matches_scalar(self, case):
        o, u = case
        g = o.eval_word(u)
        arr = o.encode_batch([g, o.identity()])
        for x in [1, -1, 2, -2]:
            out = o.step_batch(arr, x)
            assert out[0].tobytes() == o.encode(o.step(g, x))
            assert out[1].tobytes() == o.encode(o.generator(x))


class TestNilpotentClass2:
    o = make_nilpotent_class2(3)

    @given(words_for(3), words_for(3), words_for(3))
    def test_associative(self, u, v, w):
        o = self.o
        x, y, z = o.eval_word(u), o.eval_word(v), o.eval_word(w)
        assert o.mul(o.mul(x, y), z) == o.mul(x, o.mul(y, z))

    def test_commutators_central(self):
        o = self.o
        for i in range(1, 4):
            for j in range(1, 4):
                c = o.eval_word(commutator((i,), (j,)))
                for k in (1, -1, 2, -2, 3, -3):
                    g = o.generator(k)
                    assert o.mul(c, g) == o.mul(g, c)
                    assert o.eval_word(commutator(commutator((i,), (j,)), (k,))) == o.identity()

    @given(words_for(2, 16), words_for(2, 16))
    def test_rank2_matches_heisenberg(self, u, v):
        o = make_nilpotent_class2(2)
        assert (o.eval_word(u) == o.eval_word(v)) == (heisenberg(u) == heisenberg(v))


class TestRho:
    @pytest.mark.parametrize("o", ORACLES, ids=lambda o: o.kind)
    def test_matches_brute_force(self, o):
        top = 8 if o.m == 2 else 6
        res = compute_rho(o, top)
        brute = None
        for length in range(1, top + 1):
            rel = brute_relations(o, length)
            if rel:
                brute = (length, min(rel, key=word_key))
                break
        if brute is None:
            assert isinstance(res, NotFound) and res.lower_bound == top + 1
        else:
            assert (res.rho, res.witness) == brute

    def test_free_abelian(self):
        for m in (2, 3, 4):
            res = compute_rho(make_free_abelian(m), 10)
            assert res.rho == 4
            assert res.witness == W("a b A B")

    def test_nilpotent_class2(self):
        o = make_nilpotent_class2(2)
        res = compute_rho(o, 10)
        assert res.rho == 8
        assert res.witness == W("a a b A B B A b")
        # another length-8 relation: a conjugate of [[a,b],a]
        assert o.is_identity(o.eval_word(W("B A b A B a b a")))
        for length in range(1, 8):
            assert brute_relations(o, length) == []

    def test_trivial_quotient(self):
        res = compute_rho(make_finite_perm(2, [[1], [1]], 1), 5)
        assert res == RhoCertificate(1, (1,), 1)

    def test_not_found(self):
        res = compute_rho(make_free_abelian(2), 3)
        assert isinstance(res, NotFound) and res.lower_bound == 4

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as exc:
            compute_rho(make_nilpotent_class2(2), 12, max_states=100)
        assert exc.value.depth is not None

    @pytest.mark.parametrize("seed", range(12))
    def test_random_subdirect_against_brute_force(self, seed):
        rng = random.Random(seed)
        deg = rng.choice([4, 5, 6, 7])
        fin = make_finite_perm(2, [random_perm(rng, deg) for _ in range(2)], deg)
        o = make_subdirect(PhiSpec(rng.choice([(1, 0), (1, 1), (2, -1)])), fin)
        res = compute_rho(o, 7)
        fin_res = compute_rho(fin, 7)
        found = None
        for length in range(1, 8):
            rel = brute_relations(o, length)
            if rel:
                found = (length, min(rel, key=word_key))
                break
        if found is None:
            assert not res.found
        else:
            assert (res.rho, res.witness) == found
            assert is_cyclically_reduced(res.witness)
        # relations of the subdirect product are relations of the finite factor
        assert res.lower_bound >= fin_res.lower_bound

    def test_thread_count_does_not_change_result(self):
        o = make_subdirect(PhiSpec((1, 0)), make_finite_perm(2, [[3, 1, 4, 2, 6, 5], [2, 3, 1, 5, 6, 4]], 6))
        assert compute_rho(o, 12, threads=1) == compute_rho(o, 12, threads=4)


class TestFindGirth:
    def test_seeded_and_reproducible(self):
        phi = PhiSpec((1, 0))
        o1, r1, n1 = find_girth(phi, 12, tries=6, target=15, seed=3)
        o2, r2, n2 = find_girth(phi, 12, tries=6, target=15, seed=3)
        assert (r1, n1) == (r2, n2)
        assert o1.finite.perms == o2.finite.perms
        if r1.found:
            assert o1.is_identity(o1.eval_word(r1.witness))

    def test_encoding_is_fixed_width_bytes(self):
        o = make_finite_perm(1, [list(range(2, 301)) + [1]], 300)
        g = o.eval_word((1, 1))
        assert len(o.encode(g)) == 600
        arr = o.encode_batch([g])
        assert np.array_equal(o.step_batch(arr, -1)[0], np.frombuffer(o.encode(o.generator(1)), np.uint8))
