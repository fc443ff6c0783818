import numpy as np
import pytest

from _gen import random_consistent_prefs
from prefdom.core import Alternative, Model, PreferenceSet
from prefdom.degree import InconsistentPreferences
from prefdom.dominance import predict, robust_dominates, Verdict
from prefdom.lexmodel import lex_signature
from prefdom.oracle import (
    BudgetExceeded,
    EnumerationBudget,
    enumerate_simplest,
    enumerate_theta_r,
    oracle_robust_dominates,
)
from prefdom.reference import single_pair_instance, singleton_chain_instance


def alt(n, mask):
    return Alternative(mask, n)


class TestEnumerateThetaR:
    def test_empty_preferences_small(self):
        r = PreferenceSet(3, ())
        models = enumerate_theta_r(r)
        assert len(models) == 1 << 7  # every selection out of the 7 subsets

    def test_two_cycle_yields_nothing(self):
        r = PreferenceSet.from_masks(3, [(1, 2), (2, 4), (4, 1)])
        assert enumerate_theta_r(r) == []

    def test_upward_closed(self):
        rng = np.random.default_rng(1)
        r, _, _ = random_consistent_prefs(rng, 3, 5)
        models = enumerate_theta_r(r)
        fams = {frozenset(m.masks) for m in models}
        pool = [1, 2, 4, 3, 5, 6, 7]
        for fam in fams:
            for extra in pool:
                if extra not in fam:
                    assert frozenset(fam | {extra}) in fams

    def test_increasing_card(self):
        rng = np.random.default_rng(2)
        r, _, _ = random_consistent_prefs(rng, 3, 4)
        models = enumerate_theta_r(r)
        cards = [m.card for m in models]
        assert cards == sorted(cards)

    def test_budget_guard(self):
        r = PreferenceSet(4, ())
        with pytest.raises(BudgetExceeded):
            enumerate_theta_r(r, EnumerationBudget(max_n=3))


class TestEnumerateSimplest:
    def test_two_pair_example(self):
        # {f1,f2} beats {f3,f4} and beats {f1,f3}
        r = PreferenceSet.from_masks(4, [(0b0011, 0b1100), (0b0011, 0b0101)])
        by_card = enumerate_simplest(r, "card")
        fams = {frozenset(m.masks) for m in by_card}
        assert frozenset({0b0010}) in fams  # the single subset {f2}
        assert fams == {frozenset({0b0010}), frozenset({0b0100})}
        assert {frozenset(m.masks) for m in enumerate_simplest(r, "ws")} == fams
        assert {frozenset(m.masks) for m in enumerate_simplest(r, "lex")} == fams
        for m in enumerate_simplest(r, "deg"):
            assert m.deg == 1

    def test_single_pair_lex_minimal(self):
        inst = single_pair_instance()
        members = enumerate_simplest(inst.prefs, "lex")
        fams = {frozenset(m.masks) for m in members}
        assert fams == {frozenset({0b01}), frozenset({0b10})}

    def test_empty_preferences(self):
        members = enumerate_simplest(PreferenceSet(3, ()), "lex")
        assert [m.card for m in members] == [0]

    def test_inconsistent_raises(self):
        r = PreferenceSet.from_masks(3, [(1, 2), (2, 1 | 4), (1 | 4, 1), (2 | 4, 7), (7, 2 | 4)])
        # force a genuine cycle: x > y > x via two pairs
        r = PreferenceSet.from_masks(3, [(1, 2), (2, 4), (4, 1)])
        with pytest.raises(InconsistentPreferences):
            enumerate_simplest(r, "lex")

    def test_lex_members_share_triple_with_signature(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            r, _, _ = random_consistent_prefs(rng, 4, 6)
            if len(r) == 0:
                continue
            members = enumerate_simplest(r, "lex")
            sig = lex_signature(r)
            triples = {(m.deg, m.card, m.ws) for m in members}
            assert triples == {sig.triple}


class TestOracleRobustDominates:
    def test_observed_pair(self):
        inst = singleton_chain_instance()
        a, b = inst.prefs.pairs[0]
        assert oracle_robust_dominates(inst.prefs, "lex", a, b) is True

    def test_single_pair_join_vs_empty(self):
        inst = single_pair_instance()
        assert (
            oracle_robust_dominates(inst.prefs, "lex", alt(2, 0b11), alt(2, 0b00))
            is False
        )

    def test_matches_mip_path_on_random_instances(self):
        rng = np.random.default_rng(4)
        for _ in range(4):
            r, _, _ = random_consistent_prefs(rng, 3, 5)
            if len(r) == 0:
                continue
            sig = lex_signature(r)
            for am in range(8):
                for bm in range(am + 1, 8):
                    a, b = alt(3, am), alt(3, bm)
                    assert robust_dominates(r, sig, a, b) == oracle_robust_dominates(
                        r, "lex", a, b
                    )
                    assert robust_dominates(r, sig, b, a) == oracle_robust_dominates(
                        r, "lex", b, a
                    )
