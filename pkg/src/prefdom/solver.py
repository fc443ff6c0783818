"""Dense linear-programming and binary mixed-integer-programming engine.

The LP path is a two-phase primal simplex on the full tableau with general
variable bounds (free, boxed, or fixed columns are all handled natively, so
big-M linking rows are the only extra rows a caller ever pays for).  Dantzig
pricing is used until the objective stalls, then Bland's rule takes over to
prevent cycling.  The MIP path is depth-first branch and bound on the LP
relaxation, branching on the most fractional binary, with bound pruning
against the incumbent and an optional objective cutoff.

Everything is float64; callers pass eps_feas for the feasibility tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

EPS_FEAS = 1e-6
EPS_STRICT = 1e-7

_PIVOT_TOL = 1e-9
_RATIO_TOL = 1e-9
_DJ_TOL = 1e-9
_INT_TOL = 1e-6


class SolverError(RuntimeError):
    """Numerical failure or malformed program; never a silent wrong answer."""


class NodeLimitExceeded(SolverError):
    """Branch and bound ran out of nodes before proving optimality."""

    def __init__(self, limit: int, best_value: Optional[float]):
        self.limit = limit
        self.best_value = best_value
        super().__init__(f"node limit {limit} exceeded (incumbent: {best_value})")


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class SolveResult:
    status: SolveStatus
    value: Optional[float] = None
    point: Optional[np.ndarray] = None
    duals: Optional[np.ndarray] = None
    nodes: int = 0


@dataclass
class LinearProgram:
    """min c.x  s.t.  A x (<=|=|>=) b,  lower <= x <= upper.

    senses: -1 for <=, 0 for =, +1 for >= per row.  Bounds may be +-inf.
    """

    c: np.ndarray
    a_mat: np.ndarray
    senses: np.ndarray
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64)
        self.a_mat = np.asarray(self.a_mat, dtype=np.float64)
        if self.a_mat.ndim != 2:
            self.a_mat = self.a_mat.reshape(0, self.c.size)
        self.senses = np.asarray(self.senses, dtype=np.int8)
        self.rhs = np.asarray(self.rhs, dtype=np.float64)
        self.lower = np.asarray(self.lower, dtype=np.float64)
        self.upper = np.asarray(self.upper, dtype=np.float64)
        m, n = self.a_mat.shape
        if self.c.shape != (n,):
            raise SolverError("objective length does not match variable count")
        if self.senses.shape != (m,) or self.rhs.shape != (m,):
            raise SolverError("constraint arrays do not match row count")
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise SolverError("bound arrays do not match variable count")
        if not np.all(np.isfinite(self.a_mat)) or not np.all(np.isfinite(self.rhs)):
            raise SolverError("constraint data must be finite")
        if not np.all(np.isfinite(self.c)):
            raise SolverError("objective must be finite")
        if np.any(self.lower > self.upper + 1e-12):
            raise SolverError("lower bound exceeds upper bound")

    @property
    def n_vars(self) -> int:
        return self.a_mat.shape[1]

    @property
    def n_rows(self) -> int:
        return self.a_mat.shape[0]

    def with_bounds(self, lower: np.ndarray, upper: np.ndarray) -> "LinearProgram":
        lp = object.__new__(LinearProgram)
        lp.c = self.c
        lp.a_mat = self.a_mat
        lp.senses = self.senses
        lp.rhs = self.rhs
        lp.lower = lower
        lp.upper = upper
        return lp


@dataclass
class MixedProgram:
    """A linear program plus a set of variables restricted to {0, 1}."""

    lp: LinearProgram
    binary: np.ndarray

    def __post_init__(self):
        self.binary = np.asarray(self.binary, dtype=np.intp)
        if self.binary.size and (
            self.binary.min() < 0 or self.binary.max() >= self.lp.n_vars
        ):
            raise SolverError("binary index out of range")
        # relaxation must carry [0, 1] boxes on the binary columns
        lo = self.lp.lower.copy()
        hi = self.lp.upper.copy()
        lo[self.binary] = np.maximum(lo[self.binary], 0.0)
        hi[self.binary] = np.minimum(hi[self.binary], 1.0)
        self.lp = self.lp.with_bounds(lo, hi)


# ---------------------------------------------------------------------------
# Simplex core
# ---------------------------------------------------------------------------

_AT_LB = 0
_AT_UB = 1
_FREE0 = 2
_BASIC = 3


class _Tableau:
    """Mutable simplex state over columns = structural vars then row slacks."""

    def __init__(self, lp: LinearProgram):
        m, n = lp.n_rows, lp.n_vars
        self.m, self.n_struct = m, n
        ncols = n + m
        self.lower = np.concatenate([lp.lower, np.zeros(m)])
        self.upper = np.concatenate([lp.upper, np.zeros(m)])
        # slack bounds encode the row sense: a.x + s = b
        le = lp.senses == -1
        ge = lp.senses == 1
        self.lower[n:][le] = 0.0
        self.upper[n:][le] = np.inf
        self.lower[n:][ge] = -np.inf
        self.upper[n:][ge] = 0.0
        self.fixed = self.upper - self.lower <= 1e-12
        # row equilibration keeps big-M rows from wrecking pivot tolerances;
        # slack bounds only carry sign structure, so they are scale invariant
        scale = np.abs(lp.a_mat).max(axis=1, initial=0.0) if m else np.ones(0)
        scale = np.where(scale <= 0.0, 1.0, scale)
        self.row_scale = scale
        self.tab = np.concatenate([lp.a_mat / scale[:, None], np.eye(m)], axis=1)
        self.rhs = lp.rhs / scale
        self.ncols = ncols
        # nonbasic start: nearest finite bound, else free at zero
        self.state = np.full(ncols, _AT_LB, dtype=np.int8)
        self.state[np.isinf(self.lower) & np.isinf(self.upper)] = _FREE0
        only_ub = np.isinf(self.lower) & ~np.isinf(self.upper)
        self.state[only_ub] = _AT_UB
        self.basis = np.full(m, -1, dtype=np.int64)  # >=0 real col, -(i+1) artificial
        self.art_sign = np.zeros(m)
        self.beta = np.zeros(m)
        self.row_active = np.ones(m, dtype=bool)
        self._install_start_basis()

    def _nonbasic_values(self) -> np.ndarray:
        x = np.where(self.state == _AT_UB, self.upper, self.lower)
        x[self.state == _FREE0] = 0.0
        x[np.isinf(x)] = 0.0
        return x

    def _install_start_basis(self):
        x0 = self._nonbasic_values()
        resid = self.rhs - self.tab[:, : self.n_struct] @ x0[: self.n_struct]
        n = self.n_struct
        for i in range(self.m):
            s = n + i
            lo, hi = self.lower[s], self.upper[s]
            if lo - 1e-12 <= resid[i] <= hi + 1e-12:
                self.basis[i] = s
                self.state[s] = _BASIC
                self.beta[i] = resid[i]
            else:
                clamped = min(max(resid[i], lo), hi)
                self.state[s] = _AT_LB if clamped == lo else _AT_UB
                short = resid[i] - clamped
                self.basis[i] = -(i + 1)
                self.art_sign[i] = math.copysign(1.0, short)
                if self.art_sign[i] < 0:
                    self.tab[i] *= -1.0
                self.beta[i] = abs(short)

    def solution(self) -> np.ndarray:
        x = self._nonbasic_values()
        real = self.basis >= 0
        x[self.basis[real]] = self.beta[real]
        return x[: self.n_struct]

    def basic_costs(self, c_full: np.ndarray, phase1: bool) -> np.ndarray:
        cb = np.zeros(self.m)
        real = self.basis >= 0
        cb[real] = c_full[self.basis[real]]
        if phase1:
            cb[~real] = 1.0
        return cb

    def phase1_value(self) -> float:
        return float(self.beta[self.basis < 0].sum())


def _simplex_loop(t: _Tableau, c_full: np.ndarray, phase1: bool, max_iter: int) -> str:
    """Runs pivots until optimal/unbounded for the given costs.

    Returns "optimal" or "unbounded".
    """
    d = c_full - t.basic_costs(c_full, phase1) @ t.tab
    d[t.fixed] = 0.0
    bland = False
    stall = 0
    stall_limit = 4 * (t.m + t.ncols) + 64
    for it in range(max_iter):
        if it % 256 == 255:  # refresh reduced costs to shed drift
            d = c_full - t.basic_costs(c_full, phase1) @ t.tab
            d[t.fixed] = 0.0
        state = t.state
        can_up = ((state == _AT_LB) | (state == _FREE0)) & (d < -_DJ_TOL) & ~t.fixed
        can_dn = ((state == _AT_UB) | (state == _FREE0)) & (d > _DJ_TOL) & ~t.fixed
        cand = np.flatnonzero(can_up | can_dn)
        if cand.size == 0:
            return "optimal"
        if bland:
            e = int(cand[0])
        else:
            e = int(cand[np.argmax(np.abs(d[cand]))])
        direction = 1.0 if can_up[e] else -1.0
        col = t.tab[:, e]
        move = direction * col
        # blocking ratios among active basic rows
        act = t.row_active
        lob = np.where(t.basis >= 0, t.lower[np.maximum(t.basis, 0)], 0.0)
        upb = np.where(t.basis >= 0, t.upper[np.maximum(t.basis, 0)], np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            drop = act & (move > _RATIO_TOL) & np.isfinite(lob)
            rise = act & (move < -_RATIO_TOL) & np.isfinite(upb)
            ratios = np.full(t.m, np.inf)
            ratios[drop] = (t.beta[drop] - lob[drop]) / move[drop]
            ratios[rise] = (t.beta[rise] - upb[rise]) / move[rise]
        ratios = np.maximum(ratios, 0.0)
        if t.m:
            t_basic = float(ratios.min())
        else:
            t_basic = np.inf
        span = t.upper[e] - t.lower[e]
        t_flip = span if np.isfinite(span) and t.state[e] != _FREE0 else np.inf
        t_star = min(t_basic, t_flip)
        if not np.isfinite(t_star):
            return "unbounded"
        r = -1
        if np.isfinite(t_basic):
            ties = np.flatnonzero(ratios <= t_basic + 1e-9 * (1.0 + t_basic))
            if bland:
                keys = np.where(
                    t.basis[ties] >= 0, t.basis[ties], t.ncols - t.basis[ties]
                )
                r = int(ties[np.argmin(keys)])
            else:
                # largest pivot magnitude among the tied blockers (stability)
                r = int(ties[np.argmax(np.abs(move[ties]))])
            t_star = min(float(ratios[r]), t_flip)
        gain = abs(d[e]) * t_star
        if gain <= 1e-12:
            stall += 1
            if stall > stall_limit and not bland:
                bland = True
        else:
            stall = 0
        if r < 0 or t_flip < ratios[r] - 1e-15:
            # bound flip: no basis change
            t.beta -= t_flip * move
            t.state[e] = _AT_UB if t.state[e] == _AT_LB else _AT_LB
            continue
        t_star = float(ratios[r])
        # pivot on (r, e)
        piv = t.tab[r, e]
        if abs(piv) < _PIVOT_TOL:
            # numerically unusable pivot; mark and retry under Bland
            if not bland:
                bland = True
                continue
            raise SolverError("pivot breakdown: no usable pivot element")
        leaving = t.basis[r]
        enter_val = (
            0.0
            if t.state[e] == _FREE0
            else (t.upper[e] if t.state[e] == _AT_UB else t.lower[e])
        )
        t.beta -= t_star * move
        if leaving >= 0:
            hit_lower = move[r] > 0
            t.state[leaving] = _AT_LB if hit_lower else _AT_UB
        row = t.tab[r] / piv
        colv = t.tab[:, e].copy()
        t.tab -= np.outer(colv, row)
        t.tab[r] = row
        t.beta[r] = enter_val + direction * t_star
        t.basis[r] = e
        t.state[e] = _BASIC
        d = d - d[e] * row
        d[e] = 0.0
    raise SolverError(f"simplex iteration limit ({max_iter}) exceeded")


def _drive_out_artificials(t: _Tableau):
    for i in range(t.m):
        if t.basis[i] >= 0:
            continue
        row = t.tab[i, : t.ncols]
        usable = np.flatnonzero(
            (np.abs(row) > 1e-7) & ~t.fixed & (t.state[: t.ncols] != _BASIC)
        )
        if usable.size:
            e = int(usable[0])
            piv = t.tab[i, e]
            nrow = t.tab[i] / piv
            colv = t.tab[:, e].copy()
            t.tab -= np.outer(colv, nrow)
            t.tab[i] = nrow
            enter_val = (
                0.0
                if t.state[e] == _FREE0
                else (t.upper[e] if t.state[e] == _AT_UB else t.lower[e])
            )
            t.basis[i] = e
            t.state[e] = _BASIC
            t.beta[i] = enter_val  # degenerate: artificial sat at zero
        else:
            t.row_active[i] = False


def solve_lp(
    lp: LinearProgram,
    *,
    eps_feas: float = EPS_FEAS,
    max_iter: Optional[int] = None,
    want_duals: bool = False,
) -> SolveResult:
    """Two-phase bounded-variable simplex.

    Returns Optimal with a minimizing point, Infeasible, or Unbounded.
    Raises SolverError on dimension mismatch or numerical failure.
    """
    m, n = lp.n_rows, lp.n_vars
    if max_iter is None:
        max_iter = 2000 + 40 * (m + n)
    if m == 0:
        return _solve_unconstrained(lp)
    t = _Tableau(lp)
    c_full = np.concatenate([lp.c, np.zeros(m)])
    if np.any(t.basis < 0):
        status = _simplex_loop(t, np.zeros(t.ncols), phase1=True, max_iter=max_iter)
        if status != "optimal":
            raise SolverError("phase-1 reported unbounded; artificial costs are bounded")
        scale = max(1.0, float(np.abs(lp.rhs).max(initial=0.0)))
        if t.phase1_value() > 1e-7 * scale:
            return SolveResult(SolveStatus.INFEASIBLE)
        _drive_out_artificials(t)
    status = _simplex_loop(t, c_full, phase1=False, max_iter=max_iter)
    if status == "unbounded":
        return SolveResult(SolveStatus.UNBOUNDED)
    x = t.solution()
    value = float(lp.c @ x)
    viol = _max_violation(lp, x)
    if viol > eps_feas:
        raise SolverError(f"optimal point violates constraints by {viol:.3e}")
    duals = None
    if want_duals:
        cb = t.basic_costs(c_full, phase1=False)
        duals = (cb @ t.tab[:, t.n_struct :]) / t.row_scale
    return SolveResult(SolveStatus.OPTIMAL, value=value, point=x, duals=duals)


def _solve_unconstrained(lp: LinearProgram) -> SolveResult:
    x = np.zeros(lp.n_vars)
    for j in range(lp.n_vars):
        cj, lo, hi = lp.c[j], lp.lower[j], lp.upper[j]
        if cj > 0:
            if not np.isfinite(lo):
                return SolveResult(SolveStatus.UNBOUNDED)
            x[j] = lo
        elif cj < 0:
            if not np.isfinite(hi):
                return SolveResult(SolveStatus.UNBOUNDED)
            x[j] = hi
        else:
            x[j] = lo if np.isfinite(lo) else (hi if np.isfinite(hi) else 0.0)
    return SolveResult(SolveStatus.OPTIMAL, value=float(lp.c @ x), point=x)


def _max_violation(lp: LinearProgram, x: np.ndarray) -> float:
    if lp.n_rows:
        ax = lp.a_mat @ x
        le = np.where(lp.senses <= 0, ax - lp.rhs, -np.inf)
        ge = np.where(lp.senses >= 0, lp.rhs - ax, -np.inf)
        row_v = max(float(le.max(initial=-np.inf)), float(ge.max(initial=-np.inf)))
    else:
        row_v = 0.0
    lo_v = float((lp.lower - x).max(initial=-np.inf))
    hi_v = float((x - lp.upper).max(initial=-np.inf))
    return max(row_v, lo_v, hi_v, 0.0)


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------

def _objective_is_integral(mp: MixedProgram) -> bool:
    c = mp.lp.c
    cont = np.ones(mp.lp.n_vars, dtype=bool)
    cont[mp.binary] = False
    if np.any(np.abs(c[cont]) > 1e-12):
        return False
    cb = c[mp.binary]
    return bool(np.all(np.abs(cb - np.round(cb)) < 1e-9))


def solve_mip(
    mp: MixedProgram,
    *,
    eps_feas: float = EPS_FEAS,
    node_limit: int = 1_000_000,
    objective_cutoff: Optional[float] = None,
    stop_at_objective: Optional[float] = None,
    rounding_heuristic: bool = True,
) -> SolveResult:
    """Depth-first branch and bound over the binary variables.

    Branches on the most fractional binary; prunes nodes whose relaxation
    bound cannot beat the incumbent (or exceeds ``objective_cutoff``, which
    acts as an implicit constraint ``c.x <= cutoff``).  Infeasible means no
    feasible assignment (within the cutoff, when one is given).  When
    ``stop_at_objective`` is set, the search stops as soon as an incumbent
    with value <= that target is found and returns it.
    """
    lp = mp.lp
    binary = mp.binary
    if binary.size == 0:
        res = solve_lp(lp, eps_feas=eps_feas)
        if (
            objective_cutoff is not None
            and res.status is SolveStatus.OPTIMAL
            and res.value > objective_cutoff + 1e-9
        ):
            return SolveResult(SolveStatus.INFEASIBLE, nodes=1)
        return res
    integral = _objective_is_integral(mp)
    tol = 0.5 if integral else 1e-9

    best_val = math.inf
    best_point: Optional[np.ndarray] = None
    nodes = 0

    def acceptable(value: float) -> bool:
        return objective_cutoff is None or value <= objective_cutoff + tol

    def done() -> bool:
        return (
            stop_at_objective is not None
            and best_point is not None
            and best_val <= stop_at_objective + tol
        )

    stack: list[tuple[np.ndarray, np.ndarray]] = [(lp.lower.copy(), lp.upper.copy())]
    while stack and not done():
        lo, hi = stack.pop()
        nodes += 1
        if nodes > node_limit:
            raise NodeLimitExceeded(node_limit, None if best_point is None else best_val)
        res = solve_lp(lp.with_bounds(lo, hi), eps_feas=eps_feas)
        if res.status is SolveStatus.INFEASIBLE:
            continue
        if res.status is SolveStatus.UNBOUNDED:
            return SolveResult(SolveStatus.UNBOUNDED, nodes=nodes)
        bound = math.ceil(res.value - 1e-6) if integral else res.value
        if best_point is not None and bound >= best_val - 1e-12:
            continue
        if objective_cutoff is not None and bound > objective_cutoff + tol:
            continue
        b_vals = res.point[binary]
        frac = np.abs(b_vals - np.round(b_vals))
        j_rel = int(np.argmax(np.minimum(frac, 1 - frac)))
        if frac[j_rel] <= _INT_TOL:
            val = round(res.value) if integral else res.value
            if val < best_val - 1e-12 and acceptable(val):
                best_val, best_point = val, res.point.copy()
            continue
        if rounding_heuristic and nodes % 8 == 1:
            cand = _ceil_fix_candidate(lp, binary, lo, hi, b_vals, eps_feas)
            if cand is not None:
                cval = round(cand[0]) if integral else cand[0]
                if cval < best_val - 1e-12 and acceptable(cval):
                    best_val, best_point = cval, cand[1]
        j = int(binary[j_rel])
        near = int(round(b_vals[j_rel]))
        for side in (1 - near, near):  # near side on top of the stack
            lo2, hi2 = lo.copy(), hi.copy()
            lo2[j] = hi2[j] = float(side)
            stack.append((lo2, hi2))
    if best_point is None:
        return SolveResult(SolveStatus.INFEASIBLE, nodes=nodes)
    return SolveResult(SolveStatus.OPTIMAL, value=float(best_val), point=best_point, nodes=nodes)


def _ceil_fix_candidate(lp, binary, lo, hi, b_vals, eps_feas):
    """Round strictly-positive binaries up, resolve the continuous rest."""
    lo2, hi2 = lo.copy(), hi.copy()
    up = b_vals > 1e-7
    lo2[binary] = np.where(up, 1.0, 0.0)
    hi2[binary] = lo2[binary]
    try:
        res = solve_lp(lp.with_bounds(lo2, hi2), eps_feas=eps_feas)
    except SolverError:
        return None
    if res.status is not SolveStatus.OPTIMAL:
        return None
    return res.value, res.point
