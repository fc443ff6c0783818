import numpy as np
import pytest

from _gen import random_consistent_prefs
from prefdom.core import Model, PreferenceSet
from prefdom.degree import InconsistentPreferences
from prefdom.lexmodel import (
    LexSignature,
    active_universe,
    lex_signature,
    model_feasible,
)
from prefdom.reference import (
    negative_synergy_instance,
    single_pair_instance,
    singleton_chain_instance,
)


@pytest.fixture(scope="module")
def synergy():
    return negative_synergy_instance()


class TestModelFeasible:
    def test_singletons_cannot_explain_synergy(self, synergy):
        singles = Model.from_masks(4, [1, 2, 4, 8])
        assert model_feasible(synergy.prefs, singles) is False

    def test_generating_model_fits(self, synergy):
        assert model_feasible(synergy.prefs, synergy.model) is True

    def test_empty_preferences_fit_anything(self):
        r = PreferenceSet(3, ())
        assert model_feasible(r, Model.from_masks(3, [1, 6])) is True
        assert model_feasible(r, Model(3, ())) is True

    def test_superset_of_feasible_is_feasible(self, synergy):
        bigger = Model.from_masks(4, list(synergy.model.masks) + [0b1100, 0b1111])
        assert model_feasible(synergy.prefs, bigger) is True


class TestLexSignature:
    def test_synergy_closure(self, synergy):
        sig = lex_signature(synergy.prefs)
        assert sig.triple == (3, 5, 7)
        assert set(sig.witness.masks) == set(synergy.model.masks)

    def test_single_pair(self):
        sig = lex_signature(single_pair_instance().prefs)
        assert sig.triple == (1, 1, 1)
        assert sig.witness.masks in ((0b01,), (0b10,))

    def test_singleton_chain(self):
        sig = lex_signature(singleton_chain_instance().prefs)
        assert sig.triple == (1, 3, 3)
        assert sig.witness.card == 3
        assert all(s.size == 1 for s in sig.witness)

    def test_empty_preferences(self):
        sig = lex_signature(PreferenceSet(4, ()))
        assert sig.triple == (0, 0, 0)
        assert sig.witness.card == 0

    def test_inconsistent_raises(self):
        r = PreferenceSet.from_masks(3, [(1, 2), (2, 4), (4, 1)])
        with pytest.raises(InconsistentPreferences):
            lex_signature(r)

    def test_big_m_escalation_recovers(self, synergy):
        # a deliberately tiny box saturates and forces the escalation path
        sig = lex_signature(synergy.prefs, big_m=4.0)
        assert sig.triple == (3, 5, 7)

    def test_witness_always_feasible(self):
        rng = np.random.default_rng(13)
        for _ in range(8):
            r, _, _ = random_consistent_prefs(rng, 4, 8)
            if len(r) == 0:
                continue
            sig = lex_signature(r)
            assert model_feasible(r, sig.witness)
            assert (sig.witness.deg, sig.witness.card, sig.witness.ws) == sig.triple

    def test_monotone_under_subset(self):
        rng = np.random.default_rng(14)
        for _ in range(6):
            r, _, _ = random_consistent_prefs(rng, 4, 10)
            if len(r) < 4:
                continue
            sub = PreferenceSet(r.n, r.pairs[: len(r) // 2])
            assert lex_signature(sub).triple <= lex_signature(r).triple

    def test_triple_validation(self):
        with pytest.raises(ValueError):
            LexSignature(1, 2, 5, Model.from_masks(2, [1, 2]))


class TestActiveUniverse:
    def test_drops_indistinguishable_subsets(self):
        # both sides of the only pair contain f1, so {f1} never separates
        r = PreferenceSet.from_masks(3, [(0b011, 0b101)])
        masks = active_universe(r, 1)
        assert masks == [0b010, 0b100]

    def test_empty_preferences(self):
        assert active_universe(PreferenceSet(3, ()), 2) == []
