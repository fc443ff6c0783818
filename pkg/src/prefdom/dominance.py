"""Pairwise dominance tests and three-way prediction.

A model-level test asks whether every value function fitting the pairs ranks
``a`` above ``b``.  The robust test asks the same of every lexicographically
minimal model at once, via a selection program that searches for one minimal
model admitting the opposite ranking: if none exists (the program is
infeasible or can only finish above the minimal weighted size), the dominance
is robust.  Prediction runs the robust test in both directions and returns
better / worse / unknown.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .core import Alternative, Model, PreferenceSet, indicator_matrix, margin_matrix
from .lexmodel import (
    BIG_M_DEFAULT,
    BIG_M_LIMIT,
    BIG_M_STEP,
    LexSignature,
    active_universe,
    feasibility_lp,
    selected_masks,
    selection_mip,
)
from .solver import (
    EPS_STRICT,
    LinearProgram,
    SolveStatus,
    SolverError,
    solve_lp,
    solve_mip,
)


class Verdict(Enum):
    LEFT_BETTER = "left"
    RIGHT_BETTER = "right"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class PredictionOutcome:
    verdict: Verdict
    forward_ws: Optional[float] = None  # selection objective against a > b
    reverse_ws: Optional[float] = None  # selection objective against b > a


class ModelNotCompatible(ValueError):
    """The queried model admits no value function fitting the pairs."""


def model_dominates(
    r: PreferenceSet,
    model: Model,
    a: Alternative,
    b: Alternative,
    *,
    eps_strict: float = EPS_STRICT,
) -> bool:
    """True iff f(a) > f(b) for every value function on the model fitting r.

    Observed pairs dominate by definition; for the rest, the margin system is
    built over r minus the queried pair and the minimum of f(a) - f(b) must
    be strictly positive.
    """
    if a.mask == b.mask:
        raise ValueError("queried alternatives must differ")
    if (a.mask, b.mask) in r.pair_masks:
        return True
    masks = model.masks
    rest = [p for p, pm in zip(r.pairs, r.pair_masks) if pm != (a.mask, b.mask)]
    d = margin_matrix(r.restricted_to(rest), masks)
    c = (
        indicator_matrix(np.array([a.mask]), np.array(masks))
        - indicator_matrix(np.array([b.mask]), np.array(masks))
    )[0]
    k = len(masks)
    lp = LinearProgram(
        c,
        d,
        np.ones(len(rest), dtype=np.int8),
        np.ones(len(rest)),
        np.full(k, -np.inf),
        np.full(k, np.inf),
    )
    res = solve_lp(lp)
    if res.status is SolveStatus.INFEASIBLE:
        raise ModelNotCompatible("model admits no fitting value function")
    if res.status is SolveStatus.UNBOUNDED:
        return False
    return res.value > eps_strict


def _counter_model_lp(
    r: PreferenceSet, masks: tuple[int, ...], a: Alternative, b: Alternative
) -> LinearProgram:
    """Feasibility of one value function on the given subsets that fits every
    pair and weakly ranks b above a."""
    d = margin_matrix(r, masks)
    diff = (
        indicator_matrix(np.array([b.mask]), np.array(masks))
        - indicator_matrix(np.array([a.mask]), np.array(masks))
    )
    k = len(masks)
    a_mat = np.concatenate([d, diff], axis=0)
    senses = np.ones(len(r) + 1, dtype=np.int8)
    rhs = np.concatenate([np.ones(len(r)), np.zeros(1)])
    return LinearProgram(
        np.zeros(k), a_mat, senses, rhs, np.full(k, -np.inf), np.full(k, np.inf)
    )


def _admits_reversal(
    r: PreferenceSet, model: Model, a: Alternative, b: Alternative
) -> bool:
    res = solve_lp(_counter_model_lp(r, model.masks, a, b))
    return res.status is SolveStatus.OPTIMAL


@dataclass
class DominanceCache:
    """Known lexicographically minimal models for one preference set.

    When ``complete`` is True the list is the whole minimal family and every
    robust query reduces to small feasibility programs over its members.
    """

    sig: LexSignature
    members: list[Model] = field(default_factory=list)
    complete: bool = False

    def add(self, model: Model) -> None:
        masks = set(model.masks)
        if not any(set(m.masks) == masks for m in self.members):
            self.members.append(model)


def enumerate_lex_minimal(
    r: PreferenceSet,
    sig: LexSignature,
    *,
    limit: int = 64,
    big_m: float = BIG_M_DEFAULT,
    node_limit: int = 200_000,
) -> DominanceCache:
    """List lexicographically minimal models by repeatedly excluding the ones
    already found; stops early (incomplete cache) at the limit."""
    cache = DominanceCache(sig)
    if sig.card == 0:
        cache.complete = True
        return cache
    cache.add(sig.witness)
    masks = active_universe(r, sig.deg)
    k = len(masks)
    sizes = np.array([m.bit_count() for m in masks], dtype=float)
    while len(cache.members) < limit:
        cuts = []
        for member in cache.members:
            row = np.zeros(2 * k)
            sel = set(member.masks)
            row[k:] = [1.0 if m in sel else 0.0 for m in masks]
            cuts.append((row, -1, float(sig.card - 1)))
        mp = selection_mip(
            r, masks, big_m, weights=sizes, card_cap=sig.card, extra_rows=cuts
        )
        try:
            res = solve_mip(
                mp,
                objective_cutoff=float(sig.ws),
                stop_at_objective=float(sig.ws),
                node_limit=node_limit,
            )
        except SolverError:
            return cache  # incomplete
        if res.status is SolveStatus.INFEASIBLE:
            cache.complete = True
            return cache
        if res.status is not SolveStatus.OPTIMAL:
            return cache
        found = Model.from_masks(r.n, selected_masks(res.point, masks))
        before = len(cache.members)
        cache.add(found)
        if len(cache.members) == before:
            return cache  # defensive: no progress
    return cache


def _robust_direction(
    r: PreferenceSet,
    sig: LexSignature,
    a: Alternative,
    b: Alternative,
    cache: Optional[DominanceCache],
    *,
    big_m: float,
    node_limit: int,
) -> tuple[bool, Optional[float]]:
    """One direction of the robust test; value is the selection objective of
    the counter-model search when it ran to optimality."""
    if (a.mask, b.mask) in r.pair_masks:
        return True, None
    if sig.card == 0:
        return False, None
    if (b.mask, a.mask) in r.pair_masks:
        return False, float(sig.ws)
    if cache is not None:
        for member in cache.members:
            if _admits_reversal(r, member, a, b):
                return False, float(sig.ws)
        if cache.complete:
            return True, None
    masks = active_universe(r, sig.deg)
    k = len(masks)
    sizes = np.array([m.bit_count() for m in masks], dtype=float)
    diff_row = np.zeros(2 * k)
    diff_row[:k] = (
        indicator_matrix(np.array([b.mask]), np.array(masks))
        - indicator_matrix(np.array([a.mask]), np.array(masks))
    )[0]
    m_cur = big_m
    while True:
        mp = selection_mip(
            r,
            masks,
            m_cur,
            weights=sizes,
            card_cap=sig.card,
            extra_rows=[(diff_row, 1, 0.0)],
        )
        res = solve_mip(
            mp,
            objective_cutoff=float(sig.ws),
            stop_at_objective=float(sig.ws),
            node_limit=node_limit,
        )
        if res.status is SolveStatus.INFEASIBLE:
            return True, None
        if res.status is not SolveStatus.OPTIMAL:
            raise SolverError(f"counter-model search ended {res.status}")
        if np.any(np.abs(res.point[:k]) >= 0.99 * m_cur) and m_cur < BIG_M_LIMIT:
            m_cur *= BIG_M_STEP
            continue
        value = int(round(res.value))
        if value < sig.ws:
            raise SolverError(
                f"counter-model search beat the minimal weighted size ({value} < {sig.ws})"
            )
        if value == sig.ws and cache is not None:
            cache.add(Model.from_masks(r.n, selected_masks(res.point, masks)))
        return value > sig.ws, float(value)


def robust_dominates(
    r: PreferenceSet,
    sig: LexSignature,
    a: Alternative,
    b: Alternative,
    cache: Optional[DominanceCache] = None,
    *,
    big_m: float = BIG_M_DEFAULT,
    node_limit: int = 1_000_000,
) -> bool:
    """True iff every lexicographically minimal model strictly ranks a over b."""
    if a.mask == b.mask:
        raise ValueError("queried alternatives must differ")
    out, _ = _robust_direction(
        r, sig, a, b, cache, big_m=big_m, node_limit=node_limit
    )
    return out


def predict(
    r: PreferenceSet,
    sig: LexSignature,
    a: Alternative,
    b: Alternative,
    cache: Optional[DominanceCache] = None,
    *,
    big_m: float = BIG_M_DEFAULT,
    node_limit: int = 1_000_000,
) -> PredictionOutcome:
    """Three-way robust comparison of two alternatives."""
    if a.mask == b.mask:
        return PredictionOutcome(Verdict.UNKNOWN)
    fwd, fv = _robust_direction(r, sig, a, b, cache, big_m=big_m, node_limit=node_limit)
    rev, rv = _robust_direction(r, sig, b, a, cache, big_m=big_m, node_limit=node_limit)
    if fwd and rev:
        raise AssertionError("both directions robustly dominate; asymmetry violated")
    if fwd:
        return PredictionOutcome(Verdict.LEFT_BETTER, fv, rv)
    if rev:
        return PredictionOutcome(Verdict.RIGHT_BETTER, fv, rv)
    return PredictionOutcome(Verdict.UNKNOWN, fv, rv)
