import math
from itertools import product

import numpy as np
import pytest

from heisenbn import Node, StateSpace, binary_space, build_network, count_space, ranked5_space
from heisenbn.cpds import (
    BinomialCpd,
    NoisyOrCpd,
    PoissonCpd,
    RankedCpd,
    SubtractCpd,
    TableCpd,
)
from heisenbn.errors import (
    CpdShapeMismatch,
    IncompatibleIntervals,
    ParameterOutOfRange,
)


def expand(cpd, parent_spaces, child_space):
    return cpd.expand(tuple(parent_spaces), child_space)


def tnormal_bins_riemann(mu, variance, slices=10 ** 6):
    """Independent oracle: midpoint Riemann sum of the truncated-normal density."""
    sigma = math.sqrt(variance)
    xs = (np.arange(slices) + 0.5) / slices
    density = np.exp(-0.5 * ((xs - mu) / sigma) ** 2)
    bins = np.array([density[(xs >= lo) & (xs < hi)].sum()
                     for lo, hi in [(0.0, 0.2), (0.2, 0.4), (0.4, 0.6), (0.6, 0.8), (0.8, 1.0001)]])
    return bins / bins.sum()


class TestNoisyOr:
    def test_two_parents_no_leak(self):
        table = expand(NoisyOrCpd((0.2, 0.3)), [binary_space()] * 2, binary_space())
        assert table[1, 1, 1] == pytest.approx(0.94, abs=1e-15)

    def test_all_parents_false_no_leak(self):
        table = expand(NoisyOrCpd((0.2, 0.3)), [binary_space()] * 2, binary_space())
        assert table[0, 0, 1] == 0.0

    def test_single_parent_with_leak(self):
        table = expand(NoisyOrCpd((0.5,), leak=0.1), [binary_space()], binary_space())
        assert table[1, 0] == pytest.approx(0.45, abs=1e-15)

    def test_product_formula_exhaustive_up_to_six_parents(self):
        rng = np.random.default_rng(5)
        for n in range(1, 7):
            q = tuple(rng.random(n))
            leak = float(rng.random() * 0.3)
            table = expand(NoisyOrCpd(q, leak), [binary_space()] * n, binary_space())
            for config in product((0, 1), repeat=n):
                expected_false = (1 - leak) * math.prod(
                    q[i] for i in range(n) if config[i] == 1)
                assert table[config + (0,)] == pytest.approx(expected_false, abs=1e-12)

    def test_zero_q_zero_leak_is_deterministic_or(self):
        table = expand(NoisyOrCpd((0.0, 0.0)), [binary_space()] * 2, binary_space())
        for config in product((0, 1), repeat=2):
            assert table[config + (1,)] == (1.0 if any(config) else 0.0)

    def test_monotone_in_active_parents(self):
        table = expand(NoisyOrCpd((0.4, 0.6, 0.2), leak=0.05), [binary_space()] * 3,
                       binary_space())
        for config in product((0, 1), repeat=3):
            for i in range(3):
                if config[i] == 0:
                    raised = tuple(1 if j == i else config[j] for j in range(3))
                    assert table[raised + (1,)] >= table[config + (1,)] - 1e-15

    def test_parameter_out_of_range(self):
        with pytest.raises(ParameterOutOfRange):
            expand(NoisyOrCpd((1.2,)), [binary_space()], binary_space())

    def test_arity_mismatch(self):
        with pytest.raises(CpdShapeMismatch):
            expand(NoisyOrCpd((0.2, 0.3)), [binary_space()], binary_space())


class TestRanked:
    def test_degenerate_variance_is_point_mass(self):
        table = expand(RankedCpd((1.0,), 1e-9), [ranked5_space()], ranked5_space())
        assert table[2, 2] == pytest.approx(1.0, abs=1e-9)

    def test_symmetry_of_opposite_parents(self):
        table = expand(RankedCpd((1.0, 1.0), 0.05), [ranked5_space()] * 2, ranked5_space())
        row = table[0, 4]  # VeryLow and VeryHigh -> mu = 0.5
        assert np.argmax(row) == 2
        assert row[0] == pytest.approx(row[4], abs=1e-9)
        assert row[1] == pytest.approx(row[3], abs=1e-9)

    def test_against_riemann_oracle(self):
        table = expand(RankedCpd((1.0,), 0.05), [ranked5_space()], ranked5_space())
        oracle = tnormal_bins_riemann(0.7, 0.05)
        assert np.allclose(table[3], oracle, atol=1e-9)

    def test_weighted_mean_against_oracle(self):
        table = expand(RankedCpd((2.0, 1.0), 0.02), [ranked5_space()] * 2, ranked5_space())
        mu = (2.0 * 0.9 + 1.0 * 0.3) / 3.0
        oracle = tnormal_bins_riemann(mu, 0.02)
        assert np.allclose(table[4, 1], oracle, atol=1e-9)

    def test_rows_normalized(self):
        table = expand(RankedCpd((1.0, 2.0, 0.5), 0.1), [ranked5_space()] * 3, ranked5_space())
        assert np.allclose(table.sum(axis=-1), 1.0, atol=1e-12)

    def test_first_order_stochastic_dominance_in_parents(self):
        table = expand(RankedCpd((1.0, 3.0), 0.05), [ranked5_space()] * 2, ranked5_space())
        for i in range(5):
            for j in range(4):
                lo_cdf = np.cumsum(table[i, j])
                hi_cdf = np.cumsum(table[i, j + 1])
                assert np.all(hi_cdf <= lo_cdf + 1e-12)

    def test_rejects_bad_variance(self):
        with pytest.raises(ParameterOutOfRange):
            expand(RankedCpd((1.0,), 0.0), [ranked5_space()], ranked5_space())

    def test_rejects_all_zero_weights(self):
        with pytest.raises(ParameterOutOfRange):
            expand(RankedCpd((0.0,), 0.1), [ranked5_space()], ranked5_space())

    def test_rejects_non_ranked_parent(self):
        with pytest.raises(ParameterOutOfRange):
            expand(RankedCpd((1.0,), 0.1), [binary_space()], ranked5_space())


class TestPoisson:
    def test_vanishing_rate(self):
        space = count_space([(0, 0), (1, None)])
        table = expand(PoissonCpd((1e-9,)), [], space)
        assert table[0] == pytest.approx(1.0, abs=1e-8)

    def test_unit_rate_pmf(self):
        space = count_space([(0, 0), (1, 1), (2, None)])
        table = expand(PoissonCpd((1.0,)), [], space)
        e = math.exp(-1.0)
        assert table[0] == pytest.approx(e, abs=1e-12)
        assert table[1] == pytest.approx(e, abs=1e-12)
        assert table[2] == pytest.approx(1 - 2 * e, abs=1e-12)

    def test_rows_sum_to_one(self):
        space = count_space([(0, 0), (1, 2), (3, 5), (6, 10), (11, None)])
        table = expand(PoissonCpd((5.0, 0.5, 40.0)),
                       [StateSpace(("a", "b", "c"))], space)
        assert np.allclose(table.sum(axis=-1), 1.0, atol=1e-12)

    def test_matches_pmf_sums(self):
        space = count_space([(0, 0), (1, 2), (3, 5), (6, None)])
        lam = 2.5
        table = expand(PoissonCpd((lam,)), [], space)
        pmf = lambda k: math.exp(-lam) * lam ** k / math.factorial(k)
        assert table[0] == pytest.approx(pmf(0), abs=1e-12)
        assert table[1] == pytest.approx(pmf(1) + pmf(2), abs=1e-12)
        assert table[2] == pytest.approx(pmf(3) + pmf(4) + pmf(5), abs=1e-12)

    def test_rejects_nonpositive_rate(self):
        with pytest.raises(ParameterOutOfRange):
            expand(PoissonCpd((0.0,)), [], count_space([(0, 0), (1, None)]))

    def test_rate_count_mismatch(self):
        with pytest.raises(CpdShapeMismatch):
            expand(PoissonCpd((1.0, 2.0)), [], count_space([(0, 0), (1, None)]))


class TestBinomialThinning:
    def quality(self):
        return StateSpace(("lo", "hi"))

    def test_point_interval_pmf(self):
        parent = count_space([(i, i) for i in range(11)])
        child = count_space([(i, i) for i in range(10)] + [(10, None)])
        table = expand(BinomialCpd((0.5, 0.9)), [parent, self.quality()], child)
        assert table[10, 0, 5] == pytest.approx(math.comb(10, 5) / 2 ** 10, abs=1e-12)

    def test_zero_detection_point_mass_on_zero(self):
        parent = count_space([(0, 0), (1, 5), (6, None)])
        child = count_space([(0, 0), (1, 5), (6, None)])
        table = expand(BinomialCpd((0.0, 0.5)), [parent, self.quality()], child)
        assert np.all(table[:, 0, 0] == 1.0)

    def test_perfect_detection_recovers_parent(self):
        parent = count_space([(0, 0), (1, 2), (3, None)])
        child = count_space([(0, 0), (1, 2), (3, None)])
        table = expand(BinomialCpd((1.0, 1.0)), [parent, self.quality()], child)
        for i in range(3):
            n = round(parent.representative(i))
            assert table[i, 1, child.interval_index(n)] == 1.0

    def test_thinning_mean_on_point_intervals(self):
        parent = count_space([(0, 19), (20, 20)])
        child = count_space([(i, i) for i in range(20)] + [(20, None)])
        table = expand(BinomialCpd((0.3, 0.7)), [parent, self.quality()], child)
        reps = child.representatives()
        mean = float(table[1, 0] @ reps)
        assert mean == pytest.approx(20 * 0.3, abs=1e-9)

    def test_incompatible_child_intervals(self):
        parent = count_space([(0, 0), (1, None)])
        child = count_space([(1, 2), (3, None)])  # does not start at 0
        with pytest.raises(IncompatibleIntervals):
            expand(BinomialCpd((0.5, 0.5)), [parent, self.quality()], child)

    def test_rows_sum_to_one(self):
        parent = count_space([(0, 0), (1, 2), (3, 5), (6, None)])
        child = count_space([(0, 0), (1, 2), (3, 5), (6, None)])
        table = expand(BinomialCpd((0.2, 0.8)), [parent, self.quality()], child)
        assert np.allclose(table.sum(axis=-1), 1.0, atol=1e-12)


class TestSubtract:
    def spaces(self):
        iv = [(0, 0), (1, 2), (3, 5), (6, 10), (11, None)]
        return count_space(iv), count_space(iv), count_space(iv)

    def test_point_difference(self):
        a = count_space([(0, 9), (10, 10)])
        b = count_space([(0, 3), (4, 4)])
        child = count_space([(0, 5), (6, 6), (7, None)])
        table = expand(SubtractCpd(), [a, b], child)
        assert table[1, 1, 1] == 1.0  # 10 - 4 = 6

    def test_clamped_at_zero(self):
        a = count_space([(0, 2), (3, 3)])
        b = count_space([(0, 4), (5, 5)])
        child = count_space([(0, 0), (1, None)])
        table = expand(SubtractCpd(), [a, b], child)
        assert table[1, 1, 0] == 1.0  # max(0, 3-5) = 0

    def test_zero_minus_zero(self):
        a, b, child = self.spaces()
        table = expand(SubtractCpd(), [a, b], child)
        assert table[0, 0, 0] == 1.0

    def test_each_row_is_point_mass(self):
        a, b, child = self.spaces()
        table = expand(SubtractCpd(), [a, b], child)
        assert np.all(table.sum(axis=-1) == 1.0)
        assert np.all((table == 0.0) | (table == 1.0))

    def test_incompatible_child(self):
        a = count_space([(0, 0), (1, 10)])
        b = count_space([(0, 0), (1, 10)])
        child = count_space([(0, 0), (1, 2)])  # cannot hold 5.5 - 0
        with pytest.raises(IncompatibleIntervals):
            expand(SubtractCpd(), [a, b], child)


class TestExpandedNetworksNormalize:
    def test_all_gate_families_build(self):
        iv = [(0, 0), (1, 2), (3, 5), (6, None)]
        nodes = [
            Node("q", ranked5_space(), TableCpd((tuple([0.2] * 5),))),
            Node("r", ranked5_space(), RankedCpd((1.0,), 0.05), ("q",)),
            Node("ins", count_space(iv), PoissonCpd(tuple(range(1, 6))), ("q",)),
            Node("found", count_space(iv), BinomialCpd((0.3, 0.5, 0.7, 0.85, 0.95)),
                 ("ins", "q")),
            Node("resid", count_space(iv), SubtractCpd(), ("ins", "found")),
        ]
        net = build_network(nodes)
        for nid in net.node_ids:
            rows = net.table(nid).reshape(-1, net.space(nid).card)
            assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-9)
