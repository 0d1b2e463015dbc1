import numpy as np
import pytest

from cpvi.params import (
    ParameterSet,
    SamplingError,
    degenerate_replace,
    genericity_margin,
    partial_sum,
    sample_degenerate,
    sample_generic,
    sample_rational_generic,
)


def make_set(alpha, eta=0.0, degeneracy=0):
    n = len(alpha) // 2 - 1
    return ParameterSet(n, tuple(complex(a) for a in alpha), complex(eta), degeneracy)


P1 = make_set([0.1, 0.2, 0.3, 0.4])


class TestPartialSum:
    def test_negative_window_is_empty(self):
        assert partial_sum(P1, 0, -3) == 0
        assert partial_sum(P1, 5, -1) == 0

    def test_full_period_is_one(self):
        p = sample_generic(2, seed=11)
        for k in range(0, 2 * p.n + 2, 2):
            assert abs(partial_sum(p, k + 2, 2 * p.n + 1) - 1.0) < 1e-12

    def test_direct_window(self):
        assert abs(partial_sum(P1, 2, 1) - 0.7) < 1e-15

    def test_additivity(self):
        p = sample_generic(3, seed=5)
        for k in range(-3, 9):
            for l in range(4):
                for m in range(4):
                    left = partial_sum(p, k, l) + partial_sum(p, k + l + 1, m)
                    assert abs(left - partial_sum(p, k, l + m + 1)) < 1e-13

    def test_periodicity_in_start(self):
        p = sample_generic(2, seed=2)
        period = 2 * p.n + 2
        for k in range(period):
            for l in range(7):
                assert partial_sum(p, k, l) == partial_sum(p, k + period, l)

    def test_windows_longer_than_period_pick_up_full_sums(self):
        assert abs(partial_sum(P1, 3, 3 + 4) - (partial_sum(P1, 3, 3) + 1.0)) < 1e-14


class TestInvariants:
    def test_sum_constraint_enforced(self):
        with pytest.raises(ValueError):
            make_set([0.1, 0.2, 0.3, 0.5])

    def test_degenerate_zero_slots_enforced(self):
        with pytest.raises(ValueError):
            make_set([0.1, 0.2, 0.3, 0.4], degeneracy=1)
        make_set([0.0, 0.3, 0.3, 0.4], degeneracy=1)  # fine

    def test_shift_relabels_cyclically(self):
        p = make_set([0.1, 0.2, 0.3, 0.4])
        q = p.shifted(3)
        assert q.alpha == (0.4 + 0j, 0.1 + 0j, 0.2 + 0j, 0.3 + 0j)

    def test_json_round_trip(self):
        p = sample_degenerate(2, 2, seed=9)
        q = ParameterSet.from_json(p.to_json())
        assert q == p


class TestSampling:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_generic_margin_and_constraint(self, n):
        p = sample_generic(n, seed=7)
        assert abs(sum(p.alpha) - 1.0) < 1e-12
        assert genericity_margin(p) >= 0.05

    def test_determinism(self):
        assert sample_generic(3, seed=3) == sample_generic(3, seed=3)
        assert sample_degenerate(2, 1, seed=4) == sample_degenerate(2, 1, seed=4)

    def test_unreasonable_margin_fails(self):
        with pytest.raises(SamplingError):
            sample_generic(2, seed=1, margin=0.49, max_attempts=50)

    @pytest.mark.parametrize("n,r", [(1, 1), (1, 2), (2, 1), (2, 3), (3, 2)])
    def test_degenerate_sets(self, n, r):
        p = sample_degenerate(n, r, seed=13)
        assert p.degeneracy == r
        for i in range(r):
            assert p.alpha[2 * i] == 0
        assert abs(sum(p.alpha) - 1.0) < 1e-12
        assert genericity_margin(p) >= 0.05

    def test_rational_sampler_is_exact(self):
        p = sample_rational_generic(2, seed=21)
        assert sum(p.alpha) == 1
        m = 2 * p.n + 2
        for start in range(m):
            for card in range(2, m, 2):
                assert p.partial_sum(start, card - 1).denominator != 1


class TestDegenerateReplace:
    def test_substitution_values(self):
        p = make_set([0.0, 0.3, 0.3, 0.4])
        q = degenerate_replace(p, 0.01)
        assert q.alpha[0] == -100
        assert abs(q.alpha[1] - 100.3) < 1e-9
        assert q.alpha[2:] == p.alpha[2:]

    def test_sum_invariance_on_chain_input(self):
        p = sample_degenerate(2, 2, seed=8).with_degeneracy(1)
        q = degenerate_replace(p, 1e-3)
        assert abs(sum(q.alpha) - sum(p.alpha)) < 1e-9
        assert q.alpha[2] == -1000
        assert abs(q.alpha[3] - (p.alpha[3] + 1000)) < 1e-9

    def test_zero_eps_rejected(self):
        with pytest.raises(ValueError):
            degenerate_replace(P1, 0.0)
