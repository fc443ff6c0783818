"""Lexicographically simplest model signature: (degree, count, weighted size).

Every minimal model under the lexicographic simplicity order shares one
(deg, card, ws) triple.  The degree comes from the kernel-space test; the
other two components come from a pair of mixed-integer programs over binary
selection variables with big-M links between a subset's selection bit and its
value.  The triple is always handled as a triple and compared
lexicographically; the single-scalar encoding overflows and is never used.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import Model, PreferenceSet, margin_matrix, subset_universe
from .degree import InconsistentPreferences, min_degree
from .solver import (
    EPS_FEAS,
    LinearProgram,
    MixedProgram,
    SolveResult,
    SolveStatus,
    SolverError,
    solve_lp,
    solve_mip,
)

BIG_M_DEFAULT = 1e6
BIG_M_LIMIT = 1e12
BIG_M_STEP = 100.0


class BigMSaturation(SolverError):
    """Optimal values keep hitting the big-M box even at the escalation cap."""


@dataclass(frozen=True)
class LexSignature:
    """The (deg, card, ws) triple shared by all lexicographically minimal
    models, with one such model as a witness."""

    deg: int
    card: int
    ws: int
    witness: Model

    def __post_init__(self):
        if self.card and not self.card <= self.ws <= self.card * self.deg:
            raise ValueError("weighted size outside card..card*deg")

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.deg, self.card, self.ws)


def slack_lp(d: np.ndarray) -> LinearProgram:
    """min sum(e) s.t. d v + e >= 1, e >= 0; zero optimum iff d v >= 1 is
    feasible."""
    m, k = d.shape
    c = np.concatenate([np.zeros(k), np.ones(m)])
    a = np.concatenate([d, np.eye(m)], axis=1)
    lower = np.concatenate([np.full(k, -np.inf), np.zeros(m)])
    upper = np.full(k + m, np.inf)
    return LinearProgram(c, a, np.ones(m, dtype=np.int8), np.ones(m), lower, upper)


def feasibility_lp(r: PreferenceSet, masks: Sequence[int]) -> LinearProgram:
    """Slack program over one model's subsets."""
    return slack_lp(margin_matrix(r, masks))


def model_feasible(r: PreferenceSet, model: Model, *, eps_feas: float = EPS_FEAS) -> bool:
    """True iff some value function on the model reproduces every pair."""
    if r.n != model.n:
        raise ValueError("preference set and model widths differ")
    if len(r) == 0:
        return True
    res = solve_lp(feasibility_lp(r, model.masks))
    if res.status is not SolveStatus.OPTIMAL:
        raise SolverError(f"slack program ended {res.status}")
    return res.value <= eps_feas


def active_universe(r: PreferenceSet, deg: int) -> list[int]:
    """Subsets of size <= deg whose indicator differs on at least one pair.

    A subset identical on both sides of every pair can never appear in a
    lexicographically minimal model (dropping it preserves fit and shrinks
    the model), so the selection programs skip it.
    """
    universe = subset_universe(r.n, deg)
    if len(r) == 0:
        return []
    d = margin_matrix(r, universe)
    keep = np.flatnonzero(np.any(d != 0.0, axis=0))
    return [universe[int(j)] for j in keep]


def selection_mip(
    r: PreferenceSet,
    masks: Sequence[int],
    big_m: float,
    *,
    weights: np.ndarray,
    card_cap: Optional[int] = None,
    extra_rows: Sequence[tuple[np.ndarray, int, float]] = (),
) -> MixedProgram:
    """Margin constraints over v plus big-M links to selection bits b.

    Columns are [v_1..v_k, b_1..b_k]; ``weights`` is the objective on b.
    ``extra_rows`` are (coefficient row over all 2k columns, sense, rhs).
    """
    d = margin_matrix(r, masks)
    m, k = d.shape
    rows = [np.concatenate([d, np.zeros((m, k))], axis=1)]
    senses = [np.ones(m, dtype=np.int8)]
    rhs = [np.ones(m)]
    eye = np.eye(k)
    # v_S - M b_S <= 0  and  v_S + M b_S >= 0
    rows.append(np.concatenate([eye, -big_m * eye], axis=1))
    senses.append(np.full(k, -1, dtype=np.int8))
    rhs.append(np.zeros(k))
    rows.append(np.concatenate([eye, big_m * eye], axis=1))
    senses.append(np.ones(k, dtype=np.int8))
    rhs.append(np.zeros(k))
    if card_cap is not None:
        row = np.concatenate([np.zeros(k), np.ones(k)])
        rows.append(row.reshape(1, -1))
        senses.append(np.array([-1], dtype=np.int8))
        rhs.append(np.array([float(card_cap)]))
    for row, sense, b in extra_rows:
        rows.append(np.asarray(row, dtype=float).reshape(1, -1))
        senses.append(np.array([sense], dtype=np.int8))
        rhs.append(np.array([float(b)]))
    a = np.concatenate(rows, axis=0)
    c = np.concatenate([np.zeros(k), np.asarray(weights, dtype=float)])
    lower = np.concatenate([np.full(k, -big_m), np.zeros(k)])
    upper = np.concatenate([np.full(k, big_m), np.ones(k)])
    lp = LinearProgram(c, a, np.concatenate(senses), np.concatenate(rhs), lower, upper)
    return MixedProgram(lp, np.arange(k, 2 * k))


def _saturated(point: np.ndarray, k: int, big_m: float) -> bool:
    return bool(np.any(np.abs(point[:k]) >= 0.99 * big_m))


def selected_masks(point: np.ndarray, masks: Sequence[int]) -> list[int]:
    k = len(masks)
    flags = point[k : 2 * k] > 0.5
    return [m for m, f in zip(masks, flags) if f]


def lex_signature(
    r: PreferenceSet,
    *,
    big_m: float = BIG_M_DEFAULT,
    node_limit: int = 1_000_000,
) -> LexSignature:
    """deg via the kernel test, then two selection programs: first minimize
    the number of selected subsets, then their total size at that count."""
    if len(r) == 0:
        return LexSignature(0, 0, 0, Model(r.n, ()))
    deg = min_degree(r)
    masks = active_universe(r, deg)
    sizes = np.array([m.bit_count() for m in masks], dtype=float)
    k = len(masks)
    m_cur = big_m
    while True:
        p1 = solve_mip(
            selection_mip(r, masks, m_cur, weights=np.ones(k)),
            node_limit=node_limit,
        )
        if p1.status is not SolveStatus.OPTIMAL:
            raise SolverError(f"count-minimizing program ended {p1.status}")
        card = int(round(p1.value))
        p2 = solve_mip(
            selection_mip(r, masks, m_cur, weights=sizes, card_cap=card),
            node_limit=node_limit,
        )
        if p2.status is not SolveStatus.OPTIMAL:
            raise SolverError(f"size-minimizing program ended {p2.status}")
        if _saturated(p1.point, k, m_cur) or _saturated(p2.point, k, m_cur):
            if m_cur >= BIG_M_LIMIT:
                raise BigMSaturation(
                    f"values pinned at the big-M box even at M={m_cur:g}"
                )
            m_cur *= BIG_M_STEP
            continue
        break
    ws = int(round(p2.value))
    witness = Model.from_masks(r.n, selected_masks(p2.point, masks))
    if not model_feasible(r, witness):
        raise SolverError("selected model failed the feasibility re-check")
    return LexSignature(deg, card, ws, witness)
