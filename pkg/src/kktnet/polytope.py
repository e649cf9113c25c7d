"""Dense linear programming core and the polytope tests built on it.

The solver is a bounded-variable primal simplex with Bland's least-index
rule. Problems here are tiny (a few dozen rows), so every iteration simply
re-solves with the dense basis matrix.  Every result carries a certificate
that can be re-checked by plain arithmetic: convex weights for an
intersection, a Farkas vector for infeasibility, a separating functional for
disjoint hulls, and a gap functional for points outside a zonotope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    IterationLimit,
    KKTNetError,
    NotSeparable,
    SingularBasis,
    Unbounded,
)

FEAS_TOL = 1e-9
SEP_TOL = 1e-9

_COST_TOL = 1e-11
_PIVOT_TOL = 1e-9

_AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2


@dataclass(frozen=True, eq=False)
class StandardLP:
    """min cost.x  subject to  A x = b,  lower <= x <= upper."""

    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    cost: np.ndarray | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        lo = np.asarray(self.lower, dtype=float).ravel()
        hi = np.asarray(self.upper, dtype=float).ravel()
        m, q = A.shape
        if b.shape != (m,) or lo.shape != (q,) or hi.shape != (q,):
            raise DimensionMismatch("inconsistent LP shapes")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("LP data must be finite")
        if np.any(lo > hi) or np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("inconsistent variable bounds")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if self.cost is not None:
            c = np.asarray(self.cost, dtype=float).ravel()
            if c.shape != (q,):
                raise DimensionMismatch("cost length must match the number of columns")
            object.__setattr__(self, "cost", c)


@dataclass(frozen=True, eq=False)
class Feasible:
    x: np.ndarray


@dataclass(frozen=True, eq=False)
class Infeasible:
    """Farkas vector y: y.b exceeds max of y.(A x) over the variable box by ``margin``."""

    farkas_y: np.ndarray
    margin: float


class _BoundedSimplex:
    """Two-phase simplex state for one LP; artificials occupy the trailing columns."""

    def __init__(self, lp: StandardLP):
        A, b = lp.A, lp.b
        m, q = A.shape
        row_scale = np.max(np.abs(A), axis=1) if q else np.zeros(m)
        row_scale[row_scale == 0] = 1.0
        self.row_scale = row_scale
        self.m, self.q = m, q
        As = A / row_scale[:, None]
        bs = b / row_scale

        lo, hi = lp.lower, lp.upper
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        state = np.where(
            np.isfinite(lo), _AT_LOWER, np.where(np.isfinite(hi), _AT_UPPER, _FREE)
        )
        resid = bs - As @ x
        signs = np.where(resid >= 0, 1.0, -1.0)

        self.A = np.hstack([As, np.diag(signs)])
        self.b = bs
        self.lo = np.concatenate([lo, np.zeros(m)])
        self.hi = np.concatenate([hi, np.full(m, np.inf)])
        self.x = np.concatenate([x, np.abs(resid)])
        self.state = np.concatenate([state, np.full(m, _AT_LOWER)])
        self.basis = list(range(q, q + m))
        self.is_basic = np.zeros(q + m, dtype=bool)
        self.is_basic[q:] = True
        self.max_iter = 50 * (m + q) + 10
        self.pi = np.zeros(m)

    def _refresh(self, c):
        B = self.A[:, self.basis]
        nb = ~self.is_basic
        try:
            self.x[self.basis] = np.linalg.solve(B, self.b - self.A[:, nb] @ self.x[nb])
            self.pi = np.linalg.solve(B.T, c[self.basis])
        except np.linalg.LinAlgError:
            raise SingularBasis("basis matrix became singular") from None
        return B, c - self.A.T @ self.pi

    def run(self, c):
        """Minimise c.x from the current basic feasible solution."""
        for _ in range(self.max_iter):
            B, d = self._refresh(c)
            movable = ~self.is_basic & (self.lo < self.hi)
            can_inc = movable & (self.state != _AT_UPPER) & (d < -_COST_TOL)
            can_dec = movable & (self.state != _AT_LOWER) & (d > _COST_TOL)
            candidates = np.flatnonzero(can_inc | can_dec)
            if candidates.size == 0:
                return
            j = int(candidates[0])
            direction = 1.0 if can_inc[j] else -1.0

            try:
                alpha = np.linalg.solve(B, self.A[:, j])
            except np.linalg.LinAlgError:
                raise SingularBasis("basis matrix became singular") from None
            delta = -direction * alpha  # change of x_B per unit step
            basis = np.array(self.basis)
            xb = self.x[basis]
            ratios = np.full(self.m, np.inf)
            dec = delta < -_PIVOT_TOL
            inc = delta > _PIVOT_TOL
            ratios[dec] = (xb[dec] - self.lo[basis[dec]]) / -delta[dec]
            ratios[inc] = (self.hi[basis[inc]] - xb[inc]) / delta[inc]
            ratios = np.maximum(ratios, 0.0)
            theta = ratios.min() if self.m else np.inf
            span = self.hi[j] - self.lo[j]

            if span <= theta:
                if not np.isfinite(span):
                    raise Unbounded("LP objective is unbounded below")
                self.x[j] = self.hi[j] if direction > 0 else self.lo[j]
                self.state[j] = _AT_UPPER if direction > 0 else _AT_LOWER
                continue

            tied = np.flatnonzero(ratios <= theta + 1e-12 * (1.0 + theta))
            # least index among tied rows, skipping pivots far smaller than the best one
            pivots = np.abs(delta[tied])
            tied = tied[pivots >= 1e-3 * pivots.max()]
            k = int(min(tied, key=lambda r: basis[r]))
            leaving = basis[k]
            self.x[j] += direction * theta
            if delta[k] < 0:
                self.x[leaving] = self.lo[leaving]
                self.state[leaving] = _AT_LOWER
            else:
                self.x[leaving] = self.hi[leaving]
                self.state[leaving] = _AT_UPPER
            self.basis[k] = j
            self.is_basic[leaving] = False
            self.is_basic[j] = True
            if self.state[j] == _FREE:
                self.state[j] = _AT_LOWER  # irrelevant while basic
        raise IterationLimit(f"simplex exceeded {self.max_iter} pivots")

    def phase1(self) -> float:
        c = np.concatenate([np.zeros(self.q), np.ones(self.m)])
        self.run(c)
        self._refresh(c)
        return float(self.x[self.q:].sum())

    def phase2(self, cost):
        # pin artificials at zero; basic ones at ~0 block any step that moves them
        self.hi[self.q:] = 0.0
        c = np.concatenate([cost, np.zeros(self.m)])
        self.run(c)
        self._refresh(c)

    @property
    def structural_x(self):
        return self.x[: self.q].copy()


def farkas_margin(lp: StandardLP, y) -> float:
    """y.b - max{y.(A x) : lower <= x <= upper}; positive means y proves infeasibility."""
    y = np.asarray(y, dtype=float)
    coef = y @ lp.A
    scale = np.abs(y) @ np.abs(lp.A) + 1e-300
    coef = np.where(np.abs(coef) <= 1e-12 * scale, 0.0, coef)
    with np.errstate(invalid="ignore"):
        best = np.where(coef > 0, coef * lp.upper, np.where(coef < 0, coef * lp.lower, 0.0))
    return float(y @ lp.b - best.sum())


def lp_phase1_feasible(lp: StandardLP) -> Union[Feasible, Infeasible]:
    """Decide A x = b, lower <= x <= upper; tolerance 1e-9 on row-equilibrated residuals."""
    solver = _BoundedSimplex(lp)
    infeasibility = solver.phase1()
    if infeasibility <= FEAS_TOL:
        x = np.clip(solver.structural_x, lp.lower, lp.upper)
        return Feasible(x)
    y = solver.pi / solver.row_scale
    return Infeasible(y, farkas_margin(lp, y))


def lp_minimize(lp: StandardLP):
    """Return (x, objective) of an LP known to be feasible."""
    if lp.cost is None:
        raise ValueError("lp_minimize needs a cost vector")
    solver = _BoundedSimplex(lp)
    if solver.phase1() > FEAS_TOL:
        raise KKTNetError("LP expected to be feasible is infeasible")
    solver.phase2(lp.cost)
    x = np.clip(solver.structural_x, lp.lower, lp.upper)
    return x, float(lp.cost @ x)


# ---------------------------------------------------------------- polytopes


@dataclass(frozen=True, eq=False)
class Intersect:
    lamhat: np.ndarray
    muhat: np.ndarray
    point: np.ndarray

    intersects = True


@dataclass(frozen=True, eq=False)
class Disjoint:
    """a.u >= b + delta on the first set, a.v <= b - delta on the second, ||a||_inf <= 1."""

    a: np.ndarray
    b: float
    delta: float

    intersects = False


HullIntersectionResult = Union[Intersect, Disjoint]


@dataclass(frozen=True, eq=False)
class Member:
    t: np.ndarray

    contains = True


@dataclass(frozen=True, eq=False)
class Outside:
    """a.s exceeds sum_i |a.g_i| (the support of the zonotope along a) by ``gap``."""

    a: np.ndarray
    gap: float

    contains = False


ZonotopeMembershipResult = Union[Member, Outside]


def _point_set(points, name) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        raise EmptyInput(f"{name} is empty")
    P = np.atleast_2d(P)
    if P.ndim != 2:
        raise DimensionMismatch(f"{name} must be a list of vectors")
    return P


def separating_hyperplane(U, V):
    """Max-margin separation of conv(U) from conv(V) with ||a||_inf <= 1.

    Returns ``(a, b, delta)``; raises NotSeparable when the best margin is not
    above the separation threshold.
    """
    U = _point_set(U, "U")
    V = _point_set(V, "V")
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatch("U and V must share a dimension")
    m, ku, kv = U.shape[1], U.shape[0], V.shape[0]
    # columns: a (m) | b | delta | slack_U (ku) | slack_V (kv)
    A = np.zeros((ku + kv, m + 2 + ku + kv))
    A[:ku, :m] = U
    A[:ku, m] = -1.0
    A[:ku, m + 1] = -1.0
    A[:ku, m + 2: m + 2 + ku] = -np.eye(ku)
    A[ku:, :m] = -V
    A[ku:, m] = 1.0
    A[ku:, m + 1] = -1.0
    A[ku:, m + 2 + ku:] = -np.eye(kv)
    lower = np.concatenate([-np.ones(m), [-np.inf, -np.inf], np.zeros(ku + kv)])
    upper = np.concatenate([np.ones(m), [np.inf, np.inf], np.full(ku + kv, np.inf)])
    cost = np.zeros(A.shape[1])
    cost[m + 1] = -1.0
    x, _ = lp_minimize(StandardLP(A, np.zeros(ku + kv), lower, upper, cost))
    a = x[:m]
    top = float(np.min(U @ a))
    bottom = float(np.max(V @ a))
    delta = 0.5 * (top - bottom)
    if not delta > SEP_TOL:
        raise NotSeparable(f"best separation margin {delta:.3g} is within tolerance")
    return a, 0.5 * (top + bottom), delta


def hull_intersect(U, V) -> HullIntersectionResult:
    """Decide whether conv(U) and conv(V) share a point."""
    U = _point_set(U, "U")
    V = _point_set(V, "V")
    if U.shape[1] != V.shape[1]:
        raise DimensionMismatch("U and V must share a dimension")
    m, ku, kv = U.shape[1], U.shape[0], V.shape[0]
    A = np.zeros((m + 2, ku + kv))
    A[:m, :ku] = U.T
    A[:m, ku:] = -V.T
    A[m, :ku] = 1.0
    A[m + 1, ku:] = 1.0
    b = np.concatenate([np.zeros(m), [1.0, 1.0]])
    lp = StandardLP(A, b, np.zeros(ku + kv), np.ones(ku + kv))
    result = lp_phase1_feasible(lp)
    if isinstance(result, Feasible):
        lam = result.x[:ku] / result.x[:ku].sum()
        mu = result.x[ku:] / result.x[ku:].sum()
        return Intersect(lam, mu, lam @ U)
    a, b_off, delta = separating_hyperplane(U, V)
    return Disjoint(a, b_off, delta)


def _zonotope_gap(G: np.ndarray, s: np.ndarray):
    """Maximise a.s - sum_i |a.g_i| over ||a||_inf <= 1."""
    k, m = G.shape
    if k == 0:
        a = np.sign(s)
        return a, float(np.abs(s).sum())
    # columns: a (m) | e (k) | p (k) | r (k);  e - G a - p = 0,  e + G a - r = 0
    A = np.zeros((2 * k, m + 3 * k))
    A[:k, :m] = -G
    A[k:, :m] = G
    A[:k, m: m + k] = np.eye(k)
    A[k:, m: m + k] = np.eye(k)
    A[:k, m + k: m + 2 * k] = -np.eye(k)
    A[k:, m + 2 * k:] = -np.eye(k)
    lower = np.concatenate([-np.ones(m), np.zeros(3 * k)])
    upper = np.concatenate([np.ones(m), np.full(3 * k, np.inf)])
    cost = np.concatenate([-s, np.ones(k), np.zeros(2 * k)])
    x, _ = lp_minimize(StandardLP(A, np.zeros(2 * k), lower, upper, cost))
    a = x[:m]
    return a, float(a @ s - np.abs(G @ a).sum())


def zonotope_contains(gens, s) -> ZonotopeMembershipResult:
    """Decide s in {sum_i t_i g_i : t in [-1, 1]^k}.

    Membership is an LP in u = (t + 1) / 2 in [0, 1]^k. ``gens`` may be empty,
    in which case the zonotope is the origin.
    """
    s = np.asarray(s, dtype=float).ravel()
    G = np.asarray(gens, dtype=float)
    if G.size == 0:
        G = np.zeros((0, s.size))
    G = np.atleast_2d(G)
    if G.shape[1] != s.size:
        raise DimensionMismatch("generators and target point must share a dimension")
    k = G.shape[0]
    if k == 0:
        if np.max(np.abs(s), initial=0.0) <= FEAS_TOL:
            return Member(np.zeros(0))
    else:
        lp = StandardLP(2.0 * G.T, s + G.sum(axis=0), np.zeros(k), np.ones(k))
        result = lp_phase1_feasible(lp)
        if isinstance(result, Feasible):
            return Member(np.clip(2.0 * result.x - 1.0, -1.0, 1.0))
    a, gap = _zonotope_gap(G, s)
    if not gap > SEP_TOL:
        raise NotSeparable(f"zonotope gap {gap:.3g} is within tolerance")
    return Outside(a, gap)
