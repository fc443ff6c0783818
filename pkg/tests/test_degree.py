import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_consistent_prefs, random_prefs
from prefdom.core import Alternative, PreferenceSet, margin_matrix, subset_universe
from prefdom.degree import (
    GramTable,
    InconsistentPreferences,
    feasible_at_degree,
    intersection_kernel,
    min_degree,
)
from prefdom.reference import negative_synergy_instance, singleton_chain_instance


def explicit_feasible(r: PreferenceSet, tau: int) -> bool:
    """Independent oracle: strict separation with explicit augmented vectors."""
    from scipy.optimize import linprog

    u = subset_universe(r.n, tau)
    d = margin_matrix(r, u)
    res = linprog(
        np.zeros(d.shape[1]),
        A_ub=-d,
        b_ub=-np.ones(d.shape[0]),
        bounds=[(None, None)] * d.shape[1],
        method="highs",
    )
    return res.status == 0


def explicit_min_degree(r: PreferenceSet) -> int | None:
    for tau in range(1, r.n + 1):
        if explicit_feasible(r, tau):
            return tau
    return None


class TestKernel:
    def test_worked_example(self):
        x = Alternative.from_indices(4, [0, 1, 2])
        y = Alternative.from_indices(4, [0, 1, 3])
        assert intersection_kernel(x, y, 2) == 3  # C(2,1) + C(2,2)

    def test_empty_intersection(self):
        x = Alternative.from_indices(4, [0, 1])
        assert intersection_kernel(x, Alternative.empty(4), 3) == 0

    def test_tau_one_is_intersection_size(self):
        x = Alternative.from_indices(5, [0, 2, 4])
        y = Alternative.from_indices(5, [0, 1, 4])
        assert intersection_kernel(x, y, 1) == 2

    def test_tau_out_of_range(self):
        x = Alternative.empty(3)
        with pytest.raises(ValueError):
            intersection_kernel(x, x, 0)
        with pytest.raises(ValueError):
            intersection_kernel(x, x, 4)

    @settings(max_examples=120, deadline=None)
    @given(
        n=st.integers(min_value=1, max_value=10),
        data=st.data(),
    )
    def test_matches_augmented_dot_product(self, n, data):
        xm = data.draw(st.integers(min_value=0, max_value=(1 << n) - 1))
        ym = data.draw(st.integers(min_value=0, max_value=(1 << n) - 1))
        tau = data.draw(st.integers(min_value=1, max_value=n))
        x, y = Alternative(xm, n), Alternative(ym, n)
        u = subset_universe(n, tau)
        dot = sum(
            int(s & ~xm == 0) * int(s & ~ym == 0) for s in u
        )
        assert intersection_kernel(x, y, tau) == dot


class TestGramTable:
    def test_symmetric_and_psd(self):
        rng = np.random.default_rng(0)
        r, _, _ = random_consistent_prefs(rng, 5, 10)
        for tau in (1, 3, 5):
            q = GramTable.build(r, tau).q
            assert np.allclose(q, q.T)
            eigs = np.linalg.eigvalsh(q)
            assert eigs.min() > -1e-8

    def test_incremental_matches_direct(self):
        rng = np.random.default_rng(1)
        r, _, _ = random_consistent_prefs(rng, 6, 8)
        table = GramTable.build(r, 1)
        for tau in range(2, 7):
            table.raise_degree()
            assert np.array_equal(table.q, GramTable.build(r, tau).q)

    def test_entries_are_kernel_combinations(self):
        r = PreferenceSet.from_masks(4, [(0b0111, 0b1011), (0b0011, 0b0100)])
        table = GramTable.build(r, 2)
        (a, b), (c, d) = [
            (Alternative(x, 4), Alternative(y, 4)) for x, y in r.pair_masks
        ]
        k = lambda u, v: intersection_kernel(u, v, 2)
        assert table.q[0, 1] == k(a, c) - k(a, d) - k(b, c) + k(b, d)


class TestFeasibleAtDegree:
    def test_synergy_closure_infeasible_at_one(self):
        inst = negative_synergy_instance()
        assert feasible_at_degree(inst.prefs, 1) is False

    def test_synergy_closure_feasible_at_three(self):
        inst = negative_synergy_instance()
        assert feasible_at_degree(inst.prefs, 3) is True

    def test_consistent_always_feasible_at_n(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            r, _, _ = random_consistent_prefs(rng, 4, 8)
            if len(r):
                assert feasible_at_degree(r, 4) is True

    def test_monotone_in_tau(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            r = random_prefs(rng, 5, 8)
            flags = [feasible_at_degree(r, t) for t in range(1, 6)]
            for lo, hi in zip(flags, flags[1:]):
                assert (not lo) or hi


class TestMinDegree:
    def test_synergy_closure_needs_three(self):
        assert min_degree(negative_synergy_instance().prefs) == 3

    def test_singleton_chain_is_additive(self):
        assert min_degree(singleton_chain_instance().prefs) == 1

    def test_single_pair_is_additive(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            a, b = (int(x) for x in rng.integers(0, 32, size=2))
            if a == b:
                continue
            r = PreferenceSet.from_masks(5, [(a, b)])
            assert min_degree(r) == 1

    def test_two_cycle_is_inconsistent(self):
        r = PreferenceSet.from_masks(
            3, [(0b001, 0b010), (0b010, 0b100), (0b100, 0b001)]
        )
        with pytest.raises(InconsistentPreferences):
            min_degree(r)

    def test_empty_preferences(self):
        assert min_degree(PreferenceSet(3, ())) == 0

    def test_agrees_with_explicit_oracle(self):
        rng = np.random.default_rng(5)
        for trial in range(25):
            n = int(rng.integers(2, 7))
            if trial % 2 == 0:
                r, _, _ = random_consistent_prefs(rng, n, int(rng.integers(2, 12)))
            else:
                r = random_prefs(rng, n, int(rng.integers(2, 12)))
            if len(r) == 0:
                continue
            ref = explicit_min_degree(r)
            if ref is None:
                with pytest.raises(InconsistentPreferences):
                    min_degree(r)
            else:
                assert min_degree(r) == ref

    def test_monotone_under_pair_removal(self):
        rng = np.random.default_rng(6)
        for _ in range(12):
            r, _, _ = random_consistent_prefs(rng, 5, 10)
            if len(r) < 2:
                continue
            keep = [p for i, p in enumerate(r.pairs) if i % 2 == 0]
            sub = PreferenceSet(r.n, tuple(keep))
            if len(sub) == 0:
                continue
            assert min_degree(sub) <= min_degree(r)
