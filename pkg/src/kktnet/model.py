"""Shallow network models: smooth activations, parameters and evaluation.

Flattened parameter vectors use one fixed layout everywhere in the package:

* ``NoHidden``:  ``(w0, w_1, ..., w_d)``
* ``OneHidden``: ``(w0^1, w_1^1, ..., w_d^1, ..., w0^n, ..., w_d^n, a_1, ..., a_n)``

i.e. bias first within each unit, then the output coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import expit, logit

from .errors import DimensionMismatch, OutOfRange


def _sech2(x):
    # 4 e^{-2|x|} / (1 + e^{-2|x|})^2, no overflow for large |x|
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def _softplus_inverse(y):
    return y + np.log(-np.expm1(-y))


_EVAL = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "softplus": lambda x: np.logaddexp(0.0, x),
}
_DERIV = {
    "sigmoid": lambda x: expit(x) * expit(-x),
    "tanh": _sech2,
    "softplus": expit,
}
_INVERSE = {
    "sigmoid": logit,
    "tanh": np.arctanh,
    "softplus": _softplus_inverse,
}


@dataclass(frozen=True)
class Activation:
    """A smooth, strictly increasing activation with known image (range_low, range_high)."""

    kind: str
    range_low: float
    range_high: float

    def __call__(self, x):
        return _EVAL[self.kind](x)

    def derivative(self, x):
        return _DERIV[self.kind](x)

    def inverse(self, y):
        """Preimage of ``y``; raises OutOfRange unless range_low < y < range_high."""
        y_arr = np.asarray(y, dtype=float)
        if np.any(y_arr <= self.range_low) or np.any(y_arr >= self.range_high):
            raise OutOfRange(
                f"{self.kind} inverse needs {self.range_low} < y < {self.range_high}, got {y}"
            )
        return _INVERSE[self.kind](y)

    @property
    def midpoint_value(self) -> float:
        """sigma(0), the value of the zero network."""
        return float(self(0.0))


SIGMOID = Activation("sigmoid", 0.0, 1.0)
TANH = Activation("tanh", -1.0, 1.0)
SOFTPLUS = Activation("softplus", 0.0, math.inf)

ACTIVATIONS = {a.kind: a for a in (SIGMOID, TANH, SOFTPLUS)}


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown activation {name!r}; choose from {sorted(ACTIVATIONS)}"
        ) from None


def _as_float_tuple(values) -> tuple:
    out = tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))
    if not all(math.isfinite(v) for v in out):
        raise ValueError("parameters must be finite")
    return out


@dataclass(frozen=True)
class NoHidden:
    """sigma(w . T + w0); the output coefficient is fixed to 1."""

    w: tuple
    w0: float

    def __post_init__(self):
        object.__setattr__(self, "w", _as_float_tuple(self.w))
        object.__setattr__(self, "w0", float(self.w0))
        if len(self.w) < 1:
            raise ValueError("need at least one weight")
        if not math.isfinite(self.w0):
            raise ValueError("parameters must be finite")

    @property
    def dim(self) -> int:
        return len(self.w)

    @property
    def n_units(self) -> int:
        return 1

    @property
    def n_params(self) -> int:
        return self.dim + 1

    def arrays(self):
        """Return (W, b, a) with shapes (1, d), (1,), (1,)."""
        return np.array([self.w]), np.array([self.w0]), np.ones(1)

    def to_vector(self) -> np.ndarray:
        return np.array((self.w0,) + self.w)

    def with_vector(self, x) -> "NoHidden":
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise DimensionMismatch(f"expected {self.n_params} parameters, got {x.shape}")
        return NoHidden(w=x[1:], w0=x[0])


@dataclass(frozen=True)
class Unit:
    w: tuple
    w0: float
    a: float

    def __post_init__(self):
        object.__setattr__(self, "w", _as_float_tuple(self.w))
        object.__setattr__(self, "w0", float(self.w0))
        object.__setattr__(self, "a", float(self.a))
        if len(self.w) < 1:
            raise ValueError("need at least one weight")
        if not (math.isfinite(self.w0) and math.isfinite(self.a)):
            raise ValueError("parameters must be finite")


@dataclass(frozen=True)
class OneHidden:
    """sum_j a_j sigma(w^j . T + w0^j)."""

    units: tuple

    def __post_init__(self):
        units = tuple(self.units)
        if not units:
            raise ValueError("need at least one hidden unit")
        if len({len(u.w) for u in units}) != 1:
            raise DimensionMismatch("all hidden units must share the input dimension")
        object.__setattr__(self, "units", units)

    @property
    def dim(self) -> int:
        return len(self.units[0].w)

    @property
    def n_units(self) -> int:
        return len(self.units)

    @property
    def n_params(self) -> int:
        return self.n_units * (self.dim + 1) + self.n_units

    def arrays(self):
        W = np.array([u.w for u in self.units])
        b = np.array([u.w0 for u in self.units])
        a = np.array([u.a for u in self.units])
        return W, b, a

    def to_vector(self) -> np.ndarray:
        W, b, a = self.arrays()
        blocks = np.column_stack([b, W]).ravel()
        return np.concatenate([blocks, a])

    def with_vector(self, x) -> "OneHidden":
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_params,):
            raise DimensionMismatch(f"expected {self.n_params} parameters, got {x.shape}")
        n, d = self.n_units, self.dim
        blocks = x[: n * (d + 1)].reshape(n, d + 1)
        a = x[n * (d + 1):]
        return OneHidden(tuple(Unit(w=blocks[j, 1:], w0=blocks[j, 0], a=a[j]) for j in range(n)))


NetworkParams = Union[NoHidden, OneHidden]


@dataclass(frozen=True, eq=False)
class Dataset:
    """Discretisation points (N, d) with target values (N,)."""

    points: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        targets = np.array(self.targets, dtype=float).ravel()
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2:
            raise DimensionMismatch("points must be a 2-d array (N, d)")
        if points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError("dataset needs N >= 1 points of dimension d >= 1")
        if targets.shape[0] != points.shape[0]:
            raise DimensionMismatch(
                f"{points.shape[0]} points but {targets.shape[0]} targets"
            )
        if not (np.all(np.isfinite(points)) and np.all(np.isfinite(targets))):
            raise ValueError("dataset values must be finite")
        points.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "targets", targets)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _points_2d(params: NetworkParams, points) -> np.ndarray:
    T = np.asarray(points, dtype=float)
    if T.ndim == 1:
        T = T[None, :]
    if T.ndim != 2 or T.shape[1] != params.dim:
        raise DimensionMismatch(
            f"point dimension {T.shape[-1]} does not match parameter dimension {params.dim}"
        )
    return T


def evaluate(params: NetworkParams, act: Activation, points) -> np.ndarray:
    """Model values at each row of ``points`` (shape (N, d)); returns shape (N,)."""
    T = _points_2d(params, points)
    W, b, a = params.arrays()
    return act(T @ W.T + b) @ a


def network_eval(params: NetworkParams, act: Activation, point: Sequence[float]) -> float:
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise DimensionMismatch("network_eval takes a single d-vector")
    return float(evaluate(params, act, point)[0])


def param_gradients(params: NetworkParams, act: Activation, points) -> np.ndarray:
    """Gradient of the model output w.r.t. the flattened parameters, one row per point."""
    T = _points_2d(params, points)
    W, b, a = params.arrays()
    z = T @ W.T + b  # (N, n)
    ones_T = np.column_stack([np.ones(T.shape[0]), T])  # (N, d+1)
    scaled = act.derivative(z) * a  # (N, n)
    blocks = (scaled[:, :, None] * ones_T[:, None, :]).reshape(T.shape[0], -1)
    if isinstance(params, NoHidden):
        return blocks
    return np.hstack([blocks, act(z)])


def network_param_gradient(params: NetworkParams, act: Activation, point) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise DimensionMismatch("network_param_gradient takes a single d-vector")
    return param_gradients(params, act, point)[0]


def batch_evaluate(template: NetworkParams, vectors: np.ndarray, act: Activation, points) -> np.ndarray:
    """Evaluate many flattened parameter vectors at once.

    ``vectors`` has shape (G, p) in the flattened layout of ``template``'s
    architecture; returns model values of shape (G, N).
    """
    T = _points_2d(template, points)
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    if V.shape[1] != template.n_params:
        raise DimensionMismatch(f"expected {template.n_params} parameters per row")
    n, d = template.n_units, template.dim
    blocks = V[:, : n * (d + 1)].reshape(V.shape[0], n, d + 1)
    if isinstance(template, NoHidden):
        a = np.ones((V.shape[0], 1))
    else:
        a = V[:, n * (d + 1):]
    # z[g, i, j] = w0^j + w^j . T_i
    z = blocks[:, None, :, 0] + np.einsum("gjk,ik->gij", blocks[:, :, 1:], T)
    return np.einsum("gij,gj->gi", act(z), a)
