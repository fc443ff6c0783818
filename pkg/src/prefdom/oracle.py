"""Brute-force reference paths: enumerate every candidate model.

Only usable for tiny ground sets; the optimization modules are cross-checked
against these enumerations in the test suite and the verify command.  Model
feasibility reuses the shared slack program; the independence of this module
comes from enumerating models rather than searching for them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import Alternative, Model, PreferenceSet, margin_matrix, subset_universe
from .degree import InconsistentPreferences
from .dominance import model_dominates
from .lexmodel import slack_lp
from .solver import EPS_FEAS, SolveStatus, solve_lp


class BudgetExceeded(RuntimeError):
    """The instance is too large for exhaustive model enumeration."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_n: int = 4
    max_subset_pool: int = 15

    def check(self, r: PreferenceSet, pool_size: int) -> None:
        if r.n > self.max_n:
            raise BudgetExceeded(f"{r.n} features exceed the budget of {self.max_n}")
        if pool_size > self.max_subset_pool:
            raise BudgetExceeded(
                f"{pool_size} candidate subsets exceed the budget of {self.max_subset_pool}"
            )


DEFAULT_BUDGET = EnumerationBudget()


class _Enumerator:
    """Feasibility memo over selections out of the full subset pool."""

    def __init__(self, r: PreferenceSet):
        self.r = r
        self.pool = subset_universe(r.n, r.n)
        self.sizes = [m.bit_count() for m in self.pool]
        self._d_full = margin_matrix(r, self.pool)
        self._memo: dict[int, bool] = {}
        # one LP settles inconsistent instances: an unfit full pool means
        # every submodel is unfit too
        full = (1 << len(self.pool)) - 1
        self.any_feasible = len(r) == 0 or self._solve(full)
        self._memo[full] = self.any_feasible

    def _solve(self, sel: int) -> bool:
        cols = [i for i in range(len(self.pool)) if sel >> i & 1]
        res = solve_lp(slack_lp(self._d_full[:, cols]))
        if res.status is not SolveStatus.OPTIMAL:
            raise RuntimeError(f"slack program ended {res.status}")
        return res.value <= EPS_FEAS

    def feasible(self, sel: int) -> bool:
        if len(self.r) == 0:
            return True
        if not self.any_feasible:
            return False
        known = self._memo.get(sel)
        if known is not None:
            return known
        # a feasible submodel makes every supermodel feasible
        probe = sel
        while probe:
            low = probe & -probe
            if self._memo.get(sel ^ low) is True:
                self._memo[sel] = True
                return True
            probe ^= low
        out = self._solve(sel)
        self._memo[sel] = out
        return out

    def model_of(self, sel: int) -> Model:
        return Model.from_masks(
            self.r.n, (self.pool[i] for i in range(len(self.pool)) if sel >> i & 1)
        )

    def stats(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(card, ws, deg) arrays over every selection bitmask."""
        npool = len(self.pool)
        total = 1 << npool
        card = np.zeros(total, dtype=np.int64)
        ws = np.zeros(total, dtype=np.int64)
        deg = np.zeros(total, dtype=np.int64)
        for sel in range(1, total):
            low = sel & -sel
            rest = sel ^ low
            i = low.bit_length() - 1
            card[sel] = card[rest] + 1
            ws[sel] = ws[rest] + self.sizes[i]
            deg[sel] = max(deg[rest], self.sizes[i])
        return card, ws, deg


def enumerate_theta_r(
    r: PreferenceSet, budget: EnumerationBudget = DEFAULT_BUDGET
) -> list[Model]:
    """Every model (over the full subset pool) fitting all pairs, by card."""
    en = _Enumerator(r)
    budget.check(r, len(en.pool))
    card, _, _ = en.stats()
    order = np.lexsort((np.arange(card.size), card))
    return [en.model_of(int(sel)) for sel in order if en.feasible(int(sel))]


_RELATION_KEYS = {"deg", "card", "ws", "lex"}


def enumerate_simplest(
    r: PreferenceSet,
    relation: str,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> list[Model]:
    """The minimal fitting models under one simplicity relation.

    For "lex" the order is the (deg, card, ws) triple compared
    lexicographically; for the single-statistic relations every fitting model
    attaining the minimal statistic is returned.
    """
    if relation not in _RELATION_KEYS:
        raise ValueError(f"relation must be one of {sorted(_RELATION_KEYS)}")
    en = _Enumerator(r)
    budget.check(r, len(en.pool))
    card, ws, deg = en.stats()
    idx = np.arange(card.size)
    if relation == "deg":
        order = np.lexsort((idx, ws, card, deg))
        key = lambda sel: int(deg[sel])
    elif relation == "card":
        order = np.lexsort((idx, ws, deg, card))
        key = lambda sel: int(card[sel])
    elif relation == "ws":
        order = np.lexsort((idx, deg, card, ws))
        key = lambda sel: int(ws[sel])
    else:
        order = np.lexsort((idx, ws, card, deg))
        key = lambda sel: (int(deg[sel]), int(card[sel]), int(ws[sel]))
    best = None
    members: list[Model] = []
    for sel in order:
        sel = int(sel)
        if best is not None and key(sel) != best:
            break
        if en.feasible(sel):
            if best is None:
                best = key(sel)
            members.append(en.model_of(sel))
    if best is None:
        raise InconsistentPreferences("no model of any shape fits the pairs")
    return members


def oracle_robust_dominates(
    r: PreferenceSet,
    relation: str,
    a: Alternative,
    b: Alternative,
    budget: EnumerationBudget = DEFAULT_BUDGET,
) -> bool:
    """Dominance under every minimal model, checked one model at a time."""
    members = enumerate_simplest(r, relation, budget)
    return all(model_dominates(r, m, a, b) for m in members)
