"""Candidate parameter generators and test oracles.

``bisect_uniform_no_hidden`` solves the uniform no-hidden-layer problem
globally: with a strictly increasing activation, |sigma(w.T_i + w0) - f_i| <= z
is the pair of linear constraints

    sigma^{-1}(f_i - z) <= w.T_i + w0 <= sigma^{-1}(f_i + z)

(either side dropped when it runs past the activation's image), so each level
set is a polyhedron and the optimal level can be bracketed by bisection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .deviation import LossMode
from .errors import ActivationNotInvertible, GridTooLarge, NoFiniteBracket
from .model import (
    Activation,
    Dataset,
    NetworkParams,
    NoHidden,
    OneHidden,
    Unit,
    batch_evaluate,
    evaluate,
    param_gradients,
)
from .polytope import Feasible, StandardLP, lp_phase1_feasible

log = logging.getLogger(__name__)

MAX_GRID = 10**7


def loss(params: NetworkParams, act: Activation, dataset: Dataset, mode) -> float:
    r = evaluate(params, act, dataset.points) - dataset.targets
    if LossMode.parse(mode) is LossMode.UNIFORM:
        return float(np.max(np.abs(r)))
    return float(np.sum(np.abs(r)))


def _level_bounds(act: Activation, targets: np.ndarray, z: float):
    """Bounds on the pre-activations w.T_i + w0 at level z, or None when some point is out of reach."""
    low_y = targets - z
    high_y = targets + z
    if np.any(low_y >= act.range_high) or np.any(high_y <= act.range_low):
        return None
    lower = np.full(targets.shape, -np.inf)
    upper = np.full(targets.shape, np.inf)
    has_low = low_y > act.range_low
    has_high = high_y < act.range_high
    lower[has_low] = act.inverse(low_y[has_low])
    upper[has_high] = act.inverse(high_y[has_high])
    return lower, upper


def uniform_level_feasible(dataset: Dataset, act: Activation, z: float) -> NoHidden | None:
    """Return parameters with uniform deviation at most z, or None if the level is empty."""
    bounds = _level_bounds(act, dataset.targets, z)
    if bounds is None:
        return None
    lower, upper = bounds
    N, d = dataset.n_points, dataset.dim
    # columns: w0, w_1..w_d (free) | s_1..s_N in [lower_i, upper_i];  w0 + w.T_i - s_i = 0
    A = np.hstack([np.ones((N, 1)), dataset.points, -np.eye(N)])
    lp = StandardLP(
        A,
        np.zeros(N),
        np.concatenate([np.full(d + 1, -np.inf), lower]),
        np.concatenate([np.full(d + 1, np.inf), upper]),
    )
    result = lp_phase1_feasible(lp)
    if not isinstance(result, Feasible):
        return None
    return NoHidden(w=result.x[1: d + 1], w0=result.x[0])


def bisect_uniform_no_hidden(dataset: Dataset, act: Activation, eps: float = 1e-6):
    """Minimise max_i |sigma(w.T_i + w0) - f_i| to absolute accuracy ``eps``.

    Returns ``(params, z_star)`` with z_opt <= z_star <= z_opt + eps and
    ``params`` feasible at level z_star.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not isinstance(act, Activation) or not math.isfinite(act.range_low) and not math.isfinite(act.range_high):
        raise ActivationNotInvertible(f"{act!r} has no usable inverse")
    z_lo = 0.0
    z_hi = float(np.max(np.abs(act.midpoint_value - dataset.targets))) + 1.0
    best = uniform_level_feasible(dataset, act, z_hi)
    if best is None:
        raise NoFiniteBracket(f"level z={z_hi} is infeasible although the zero network attains it")
    iterations = 0
    while z_hi - z_lo > eps:
        mid = 0.5 * (z_lo + z_hi)
        candidate = uniform_level_feasible(dataset, act, mid)
        if candidate is None:
            z_lo = mid
        else:
            z_hi, best = mid, candidate
        iterations += 1
    log.debug("bisection finished after %d levels, z in [%g, %g]", iterations, z_lo, z_hi)
    return best, z_hi


def subgradient_descent(params0: NetworkParams, act: Activation, dataset: Dataset, mode, steps: int = 100, step0: float = 0.1) -> NetworkParams:
    """Diminishing-step subgradient method; returns the best iterate seen (x_0 included)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not step0 > 0:
        raise ValueError("step0 must be positive")
    mode = LossMode.parse(mode)
    x = params0.to_vector()
    best_x, best_loss = x.copy(), loss(params0, act, dataset, mode)
    for k in range(steps):
        current = params0.with_vector(x)
        r = evaluate(current, act, dataset.points) - dataset.targets
        grads = param_gradients(current, act, dataset.points)
        if mode is LossMode.UNIFORM:
            i = int(np.argmax(np.abs(r)))
            g = np.sign(r[i]) * grads[i]
        else:
            g = np.sign(r) @ grads
        x = x - step0 / math.sqrt(k + 1) * g
        value = loss(params0.with_vector(x), act, dataset, mode)
        if value < best_loss:
            best_x, best_loss = x.copy(), value
    return params0.with_vector(best_x)


@dataclass(frozen=True)
class Grid:
    """Per-parameter grid: ``resolution`` points from ``lo`` to ``hi`` (scalars broadcast)."""

    lo: float | Sequence[float] = -10.0
    hi: float | Sequence[float] = 10.0
    resolution: int | Sequence[int] = 201

    def axes(self, n_params: int) -> list:
        lo = np.broadcast_to(np.asarray(self.lo, dtype=float), (n_params,))
        hi = np.broadcast_to(np.asarray(self.hi, dtype=float), (n_params,))
        res = np.broadcast_to(np.asarray(self.resolution, dtype=int), (n_params,))
        return [np.linspace(l, h, int(r)) for l, h, r in zip(lo, hi, res)]


def template_for(arch: str, dim: int, n_units: int = 1) -> NetworkParams:
    if arch == "no_hidden":
        return NoHidden(w=np.zeros(dim), w0=0.0)
    if arch == "one_hidden":
        return OneHidden(tuple(Unit(w=np.zeros(dim), w0=0.0, a=0.0) for _ in range(n_units)))
    raise ValueError(f"unknown architecture {arch!r}")


def brute_force_oracle(dataset: Dataset, act: Activation, mode, arch: str = "no_hidden", grid: Grid = Grid(), n_units: int = 1, chunk: int = 20000):
    """Exhaustive grid search; ties go to the lexicographically smallest parameter vector."""
    mode = LossMode.parse(mode)
    template = template_for(arch, dataset.dim, n_units)
    axes = grid.axes(template.n_params)
    shape = tuple(len(a) for a in axes)
    total = math.prod(shape)
    if total > MAX_GRID:
        raise GridTooLarge(f"grid has {total} points (limit {MAX_GRID})")
    best_index, best_loss = 0, math.inf
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.unravel_index(flat, shape)
        vectors = np.column_stack([axes[k][idx[k]] for k in range(len(axes))])
        r = batch_evaluate(template, vectors, act, dataset.points) - dataset.targets
        values = np.max(np.abs(r), axis=1) if mode is LossMode.UNIFORM else np.sum(np.abs(r), axis=1)
        k = int(np.argmin(values))
        if values[k] < best_loss:
            best_index, best_loss = int(flat[k]), float(values[k])
    idx = np.unravel_index(best_index, shape)
    vector = np.array([axes[k][idx[k]] for k in range(len(axes))])
    return template.with_vector(vector), best_loss


@dataclass(frozen=True)
class GradCheckReport:
    max_rel_err: float
    worst_point: int
    worst_param: int
    threshold: float
    h: float

    @property
    def ok(self) -> bool:
        return self.max_rel_err <= self.threshold


def finite_difference_gradients(params: NetworkParams, act: Activation, points, h: float = 1e-5) -> np.ndarray:
    """Central differences of the model output, shape (N, p)."""
    x = params.to_vector()
    steps = h * np.eye(x.size)
    values = batch_evaluate(params, np.vstack([x + steps, x - steps]), act, points)
    return ((values[: x.size] - values[x.size:]) / (2 * h)).T


def grad_check(params: NetworkParams, act: Activation, dataset: Dataset, h: float = 1e-5, threshold: float = 1e-6) -> GradCheckReport:
    """Compare analytic parameter gradients with central differences.

    The error of each entry is |analytic - numeric| / max(1, |analytic|).
    """
    if not h > 0:
        raise ValueError("h must be positive")
    analytic = param_gradients(params, act, dataset.points)
    numeric = finite_difference_gradients(params, act, dataset.points, h)
    err = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))
    i, j = np.unravel_index(int(np.argmax(err)), err.shape)
    return GradCheckReport(float(err[i, j]), int(i), int(j), threshold, h)
