import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fewn.errors import DegenerateSampleError, DomainError, InsufficientDataError
from fewn.sample_tests import (
    EffectSample,
    Sidedness,
    cohens_d,
    paired_t_test,
    pool_samples,
    sign_test,
)

from oracles import sign_test_enumeration

finite = st.floats(-1e3, 1e3, allow_nan=False)
diff_lists = st.lists(finite, min_size=2, max_size=30).filter(lambda v: max(v) - min(v) > 1e-6)


class TestPairedT:
    def test_two_animal_boundary(self):
        r = paired_t_test([10, 8.5408], 0.05, "two-sided")
        assert r.statistic == pytest.approx(12.7062, abs=1e-3)
        assert r.statistic == pytest.approx(18.5408 / 1.4592, rel=1e-12)
        assert r.p_value == pytest.approx(0.05, abs=1e-5)
        assert r.df == 1

    def test_zero_two(self):
        r = paired_t_test([0, 2], 0.05, Sidedness.TWO)
        assert r.statistic == pytest.approx(1.0, rel=1e-14)
        assert r.df == 1
        assert r.p_value == pytest.approx(2 * (1 - (0.5 + math.atan(1) / math.pi)), rel=1e-12)
        assert r.p_value == pytest.approx(0.5)
        assert not r.significant

    def test_one_sided_directions(self):
        pos = paired_t_test([1.0, 2.0, 1.5, 0.7], 0.05, "one-sided-positive")
        neg = paired_t_test([1.0, 2.0, 1.5, 0.7], 0.05, "one-sided-negative")
        assert pos.p_value + neg.p_value == pytest.approx(1.0, abs=1e-12)
        assert pos.significant and not neg.significant

    def test_insufficient(self):
        with pytest.raises(InsufficientDataError):
            paired_t_test([5.0])

    @pytest.mark.parametrize("values", [[3, 3, 3], [0, 0]])
    def test_degenerate(self, values):
        with pytest.raises(DegenerateSampleError):
            paired_t_test(values)

    def test_non_finite(self):
        with pytest.raises(DomainError):
            paired_t_test([1.0, math.nan])

    @given(diff_lists, st.floats(0.01, 100))
    def test_scale_invariance(self, values, c):
        a = paired_t_test(values)
        b = paired_t_test([c * v for v in values])
        assert b.statistic == pytest.approx(a.statistic, rel=1e-9, abs=1e-9)
        assert b.p_value == pytest.approx(a.p_value, rel=1e-8, abs=1e-12)

    @given(diff_lists, st.randoms(use_true_random=False))
    def test_permutation_invariance(self, values, rnd):
        shuffled = list(values)
        rnd.shuffle(shuffled)
        assert paired_t_test(shuffled).statistic == pytest.approx(paired_t_test(values).statistic, rel=1e-12, abs=1e-12)

    @given(finite, finite)
    def test_two_value_identity(self, d1, d2):
        if abs(d1 - d2) < 1e-6:
            return
        expected = (d1 + d2) / abs(d1 - d2)
        assert paired_t_test([d1, d2]).statistic == pytest.approx(expected, rel=1e-9, abs=1e-9)

    @given(diff_lists, st.sampled_from([0.01, 0.05, 0.2]))
    def test_two_sided_is_twice_smaller_tail(self, values, alpha):
        pos = paired_t_test(values, alpha, "one-sided-positive").p_value
        neg = paired_t_test(values, alpha, "one-sided-negative").p_value
        two = paired_t_test(values, alpha, "two-sided")
        assert two.p_value == pytest.approx(min(1.0, 2 * min(pos, neg)), rel=1e-12, abs=1e-15)
        assert two.significant == (two.p_value < alpha)


class TestCohensD:
    def test_zero_two(self):
        assert cohens_d([0, 2]) == pytest.approx(1 / math.sqrt(2), abs=1e-5)

    def test_boundary_pair(self):
        assert cohens_d([10, 8.5408]) == pytest.approx(8.9846, abs=1e-4)

    @pytest.mark.parametrize("shift", [-5.0, 0.0, 3.0])
    def test_shift_moves_mean_not_spread(self, shift):
        c, k = 2.0 + shift, 1.5
        assert cohens_d([c, c + k, c - k]) == pytest.approx(c / k, rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            cohens_d([1, 1])


class TestSignTest:
    def test_five_one_sided(self):
        r = sign_test("+++++", 0.05, "one-sided-positive")
        assert r.p_value == 0.03125 and r.significant

    def test_six_two_sided(self):
        r = sign_test(["+"] * 6, 0.05, "two-sided")
        assert r.p_value == 0.03125 and r.significant

    def test_five_two_sided(self):
        r = sign_test(["+"] * 5, 0.05, "two-sided")
        assert r.p_value == 0.0625 and not r.significant

    def test_four_one_sided(self):
        r = sign_test(["+"] * 4, 0.05, "one-sided-positive")
        assert r.p_value == 0.0625 and not r.significant

    def test_numeric_signs(self):
        assert sign_test([0.3, 2, 5, 1, 8], 0.05, "one").p_value == 0.03125

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            sign_test([1, 0, 2])

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            sign_test([])

    @pytest.mark.parametrize("sided", [s.value for s in Sidedness])
    def test_enumeration(self, sided):
        for n in range(1, 13):
            for n_plus in range(n + 1):
                signs = ["+"] * n_plus + ["-"] * (n - n_plus)
                r = sign_test(signs, 0.05, sided)
                assert r.p_value == pytest.approx(sign_test_enumeration(n_plus, n, sided), abs=1e-14)
                assert r.significant == (r.p_value < 0.05)


class TestPool:
    def test_sixty_forty(self):
        rng = random.Random(3)
        a1 = EffectSample(tuple(rng.gauss(1, 1) for _ in range(60)), "animal-1")
        a2 = EffectSample(tuple(rng.gauss(1, 1) for _ in range(40)), "animal-2")
        pooled = pool_samples([a1, a2])
        assert pooled.n == 100
        assert pooled.composition == (("animal-1", 60), ("animal-2", 40))
        assert "60 from animal-1" in pooled.label and "40 from animal-2" in pooled.label
        assert paired_t_test(pooled).df == 99

    def test_singleton_identity(self):
        x = EffectSample((1.0, 2.0, 4.0), "a")
        assert pool_samples([x]) is x

    def test_order_does_not_change_statistic(self):
        a = EffectSample((1.0, 2.0, 0.5), "a")
        b = EffectSample((3.0, -1.0), "b")
        s1 = paired_t_test(pool_samples([a, b])).statistic
        s2 = paired_t_test(pool_samples([b, a])).statistic
        assert s1 == pytest.approx(s2, rel=1e-14)

    def test_nested_pool_keeps_sources(self):
        a, b, c = (EffectSample((1.0, 2.0), n) for n in "abc")
        assert pool_samples([pool_samples([a, b]), c]).composition == (("a", 2), ("b", 2), ("c", 2))

    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            pool_samples([])


def test_sidedness_parse():
    assert Sidedness.parse("one") is Sidedness.POSITIVE
    assert Sidedness.parse("two") is Sidedness.TWO
    assert Sidedness.parse("one-sided-negative") is Sidedness.NEGATIVE
    with pytest.raises(DomainError):
        Sidedness.parse("three")
