"""Random problem instances with prescribed deviation patterns."""

from __future__ import annotations

import numpy as np

from .deviation import LossMode
from .model import ACTIVATIONS, Dataset, NoHidden, OneHidden, Unit, evaluate


def random_params(rng: np.random.Generator, dim: int, arch: str | None = None, max_units: int = 3):
    arch = arch or rng.choice(["no_hidden", "one_hidden"])
    if arch == "no_hidden":
        return NoHidden(w=rng.uniform(-2, 2, dim), w0=rng.uniform(-2, 2))
    n = int(rng.integers(1, max_units + 1))
    return OneHidden(tuple(
        Unit(w=rng.uniform(-2, 2, dim), w0=rng.uniform(-2, 2), a=rng.uniform(-2, 2))
        for _ in range(n)
    ))


def random_instance(rng: np.random.Generator, mode, max_dim: int = 3, max_points: int = 10):
    """Draw (params, activation, dataset) whose residual signs are chosen up front.

    Uniform: every point is a positive or negative maximal deviation point or
    strictly inside the band (at least one of each sign).  Manhattan: points
    get positive, negative or exactly zero residuals.
    """
    mode = LossMode.parse(mode)
    dim = int(rng.integers(1, max_dim + 1))
    act = ACTIVATIONS[str(rng.choice(sorted(ACTIVATIONS)))]
    params = random_params(rng, dim)
    N = int(rng.integers(3, max_points + 1))
    T = rng.uniform(-1, 1, (N, dim))
    y = evaluate(params, act, T)
    if mode is LossMode.UNIFORM:
        z = 0.1
        labels = rng.choice(3, N, p=[0.4, 0.4, 0.2])
        labels[:2] = rng.permutation([0, 1])
        shift = np.where(labels == 0, z, np.where(labels == 1, -z, rng.uniform(-0.8, 0.8, N) * z))
    else:
        labels = rng.choice(3, N, p=[0.25, 0.25, 0.5])
        size = rng.uniform(0.05, 0.3, N)
        shift = np.where(labels == 0, size, np.where(labels == 1, -size, 0.0))
    return params, act, Dataset(T, y - shift)
