"""Minimum model degree via the intersection-counting kernel.

The strict system "margin >= 1 on every preference" over all subsets of size
<= tau is feasible exactly when the origin lies outside the convex hull of
the preference difference vectors in the augmented space.  The Gram matrix of
those vectors is computable from pairwise intersection sizes alone, so the
test runs in the kernel space: feasible iff

    min over the probability simplex of lam' Q lam  >  eps_sep.

The minimum is located by projected gradient, with a fully-corrective
Frank-Wolfe (minimum-norm-point) fallback that supplies duality-gap
certificates when projected gradient alone cannot resolve the threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PreferenceSet, Alternative, popcount

EPS_SEP = 1e-8


class InconsistentPreferences(ValueError):
    """No additive-with-interactions model of any degree fits the pairs."""


def intersection_kernel(x: Alternative, y: Alternative, tau: int) -> int:
    """Number of non-empty subsets of size <= tau contained in both x and y.

    Equals the dot product of the two augmented characteristic vectors over
    the subsets of size <= tau; runs in O(n).
    """
    if x.n != y.n:
        raise ValueError("alternatives belong to different ground sets")
    if not 1 <= tau <= x.n:
        raise ValueError(f"degree must be in 1..{x.n}")
    k = (x.mask & y.mask).bit_count()
    return sum(math.comb(k, i) for i in range(1, tau + 1))


def _pair_intersections(r: PreferenceSet) -> tuple[np.ndarray, ...]:
    left = np.array([a for a, _ in r.pair_masks], dtype=np.int64)
    right = np.array([b for _, b in r.pair_masks], dtype=np.int64)
    inter = lambda u, v: popcount(u[:, None] & v[None, :]).astype(np.int64)
    return inter(left, left), inter(left, right), inter(right, left), inter(right, right)


@dataclass
class GramTable:
    """Gram matrix of augmented difference vectors at the current degree."""

    q: np.ndarray
    tau: int
    _kac: np.ndarray
    _kad: np.ndarray
    _kbc: np.ndarray
    _kbd: np.ndarray
    _binom: np.ndarray

    @classmethod
    def build(cls, r: PreferenceSet, tau: int = 1) -> "GramTable":
        kac, kad, kbc, kbd = _pair_intersections(r)
        n = r.n
        binom = np.zeros((n + 1, n + 1), dtype=np.int64)
        for k in range(n + 1):
            for i in range(n + 1):
                binom[k, i] = math.comb(k, i)
        cum = np.cumsum(binom[:, 1:], axis=1)  # cum[k, t-1] = sum_{i=1..t} C(k, i)
        q = (
            cum[kac, tau - 1]
            - cum[kad, tau - 1]
            - cum[kbc, tau - 1]
            + cum[kbd, tau - 1]
        ).astype(np.float64)
        return cls(q, tau, kac, kad, kbc, kbd, binom)

    def raise_degree(self) -> None:
        """Add the size-(tau+1) binomial terms, as in the incremental update."""
        t = self.tau + 1
        b = self._binom[:, t]
        self.q += (b[self._kac] - b[self._kad] - b[self._kbc] + b[self._kbd]).astype(
            np.float64
        )
        self.tau = t


def _project_simplex(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _affine_minimizer(q: np.ndarray, support: list[int]) -> np.ndarray:
    """Minimize mu' Q_SS mu subject to sum(mu) = 1 over the support."""
    k = len(support)
    qs = q[np.ix_(support, support)]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = 2.0 * qs
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    return sol[:k]


def _min_norm_point(q: np.ndarray, lam0: np.ndarray, eps: float, max_outer: int = 500):
    """Wolfe-style fully-corrective descent; returns (upper, lower) bounds."""
    k = q.shape[0]
    start = int(np.argmin(np.diag(q)))
    lam = np.zeros(k)
    lam[start] = 1.0
    if lam0 @ q @ lam0 < lam @ q @ lam:
        lam = lam0.copy()
    support = [i for i in range(k) if lam[i] > 0]
    best_ub = float(lam @ q @ lam)
    best_lb = -math.inf
    for _ in range(max_outer):
        g = q @ lam
        ub = float(lam @ g)
        lb = float(2.0 * g.min() - ub)
        best_ub = min(best_ub, ub)
        best_lb = max(best_lb, lb)
        if best_lb > eps or best_ub <= eps or best_ub - best_lb <= 0.1 * eps:
            break
        j = int(np.argmin(g))
        if j not in support:
            support.append(j)
        # inner minor cycle: affine minimizer, clipped back into the simplex
        for _ in range(2 * k + 4):
            mu = _affine_minimizer(q, support)
            if np.all(mu >= -1e-12):
                lam = np.zeros(k)
                lam[support] = np.maximum(mu, 0.0)
                lam /= lam.sum()
                break
            cur = lam[support]
            delta = mu - cur
            steps = [
                cur[i] / -delta[i]
                for i in range(len(support))
                if delta[i] < -1e-15
            ]
            t = min(1.0, min(steps)) if steps else 1.0
            new = cur + t * delta
            lam = np.zeros(k)
            lam[support] = np.maximum(new, 0.0)
            total = lam.sum()
            if total <= 0:
                lam[support] = 1.0 / len(support)
            else:
                lam /= total
            support = [i for i in range(k) if lam[i] > 1e-14]
            if not support:
                support = [start]
                lam = np.zeros(k)
                lam[start] = 1.0
        ub2 = float(lam @ q @ lam)
        if ub2 > best_ub - 1e-16 and abs(ub2 - ub) < 1e-16:
            break  # no further progress
    return best_ub, best_lb


def _simplex_quadratic_min(q: np.ndarray, eps: float) -> float:
    """Approximate min of lam' Q lam over the simplex, sharp around eps."""
    k = q.shape[0]
    if k == 0:
        return math.inf
    scale = float(np.abs(q).max())
    if scale == 0.0:
        return 0.0
    qn = q / scale
    eps_n = eps / scale
    lam = np.full(k, 1.0 / k)
    lip = float(np.abs(qn).sum(axis=1).max())  # Gershgorin bound on the top eigenvalue
    step = 1.0 / (2.0 * max(lip, 1e-12))
    best_ub, best_lb = math.inf, -math.inf
    for it in range(2000):
        g = qn @ lam
        if it % 8 == 0 or it == 1999:
            ub = float(lam @ g)
            lb = float(2.0 * g.min() - ub)
            best_ub = min(best_ub, ub)
            best_lb = max(best_lb, lb)
            if best_lb > eps_n or best_ub <= 0.5 * eps_n:
                return best_ub * scale if best_ub <= 0.5 * eps_n else best_lb * scale
        lam = _project_simplex(lam - 2.0 * step * g)
    ub, lb = _min_norm_point(qn, lam, eps_n)
    best_ub = min(best_ub, ub)
    best_lb = max(best_lb, lb)
    # report a value on whichever side of the threshold is certified
    if best_lb > eps_n:
        return best_lb * scale
    return best_ub * scale


def _gram_feasible(q: np.ndarray, eps: float = EPS_SEP) -> bool:
    return _simplex_quadratic_min(q, eps) > eps


def feasible_at_degree(r: PreferenceSet, tau: int) -> bool:
    """True iff some model of degree <= tau fits every pair with unit margin."""
    if not 1 <= tau <= r.n:
        raise ValueError(f"degree must be in 1..{r.n}")
    if len(r) == 0:
        return True
    return _gram_feasible(GramTable.build(r, tau).q)


def min_degree(r: PreferenceSet) -> int:
    """Smallest degree whose subset family admits a fitting model.

    Raises InconsistentPreferences when even degree n fails (cyclic pairs).
    """
    if len(r) == 0:
        return 0
    table = GramTable.build(r, 1)
    while not _gram_feasible(table.q):
        if table.tau >= r.n:
            raise InconsistentPreferences(
                f"no model up to degree {r.n} fits the {len(r)} pairs"
            )
        table.raise_degree()
    return table.tau
