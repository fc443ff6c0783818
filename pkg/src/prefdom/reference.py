"""Small built-in instances used by the verify command and the test suite.

Each instance is tiny enough for exhaustive model enumeration, which makes
them the anchor points for cross-checking the optimization paths.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Alternative, Model, PreferenceSet, ValueFunction, evaluate


@dataclass(frozen=True)
class ReferenceInstance:
    name: str
    n: int
    prefs: PreferenceSet
    model: Model | None = None
    values: ValueFunction | None = None


def negative_synergy_instance() -> ReferenceInstance:
    """Four features, additive weights 1..4, and a -10 penalty when the first
    three co-occur; preferences are the full strict closure of the induced
    weak order over all 16 subsets (the two zero-utility subsets tie)."""
    n = 4
    model = Model.from_masks(n, [0b0001, 0b0010, 0b0100, 0b1000, 0b0111])
    values = ValueFunction.for_model(model, [1.0, 2.0, 3.0, 4.0, -10.0])
    score = {m: evaluate(model, values, Alternative(m, n)) for m in range(16)}
    pairs = [
        (a, b)
        for a in range(16)
        for b in range(16)
        if score[a] > score[b]
    ]
    return ReferenceInstance(
        "negative-synergy", n, PreferenceSet.from_masks(n, pairs), model, values
    )


def singleton_chain_instance() -> ReferenceInstance:
    """Four singleton alternatives strictly ordered f4 > f3 > f2 > f1."""
    n = 4
    chain = [0b1000, 0b0100, 0b0010, 0b0001]
    pairs = [
        (chain[i], chain[j]) for i in range(len(chain)) for j in range(i + 1, len(chain))
    ]
    return ReferenceInstance("singleton-chain", n, PreferenceSet.from_masks(n, pairs))


def single_pair_instance(n: int = 2) -> ReferenceInstance:
    """One observed preference: {f1} strictly preferred to {f2}."""
    return ReferenceInstance(
        "single-pair", n, PreferenceSet.from_masks(n, [(0b01, 0b10)])
    )


BY_NAME = {
    "negative-synergy": negative_synergy_instance,
    "singleton-chain": singleton_chain_instance,
    "single-pair": single_pair_instance,
}
