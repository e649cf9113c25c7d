"""First-order necessary optimality conditions for uniform and Manhattan fits.

Each discretisation point contributes a generator vector, the gradient of the
model output with respect to the network parameters at that point.  The
uniform condition asks whether the convex hulls of the generators at positive
and negative maximal deviation points meet; the Manhattan condition asks
whether the signed generator sum over nonzero-deviation points lies in the
zonotope spanned by the zero-deviation generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .deviation import LossMode, PointClassification, classify, compute_residuals
from .errors import NoWitness, NotSeparable, ShapeMismatch
from .model import Activation, Dataset, NetworkParams, network_param_gradient, param_gradients
from .polytope import Disjoint, Intersect, Outside, hull_intersect, zonotope_contains


class Status(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    DEGENERATE = "degenerate"


@dataclass(frozen=True, eq=False)
class HullWitness:
    """Convex weights keyed by point index.

    ``split * sum lamhat_i u_i == (1 - split) * sum muhat_j v_j``; ``point``
    is ``sum lamhat_i u_i``.
    """

    lamhat: dict
    muhat: dict
    point: np.ndarray
    split: float = 0.5


@dataclass(frozen=True, eq=False)
class ZonotopeWitness:
    """Coefficients t_i in [-1, 1] over the zero-deviation points."""

    t: dict


@dataclass(frozen=True, eq=False)
class Separation:
    """a.x >= b + delta on the first object and a.y <= b - delta on the second.

    For the uniform check the objects are the P-hull and the N-hull; for the
    Manhattan check they are the signed sum s and the zonotope Q.
    """

    a: np.ndarray
    b: float
    delta: float


@dataclass(frozen=True, eq=False)
class OptimalityVerdict:
    status: Status
    mode: LossMode
    classification: PointClassification
    witness: HullWitness | ZonotopeWitness | None = None
    separation: Separation | None = None
    residual_norm: float = 0.0
    target: np.ndarray | None = None  # the signed sum s (Manhattan only)

    @property
    def satisfied(self) -> bool:
        return self.status is Status.SATISFIED


@dataclass(frozen=True, eq=False)
class Multipliers:
    lam: dict
    lam_plus: dict = field(default_factory=dict)
    lam_minus: dict = field(default_factory=dict)


def generator(params: NetworkParams, act: Activation, point) -> np.ndarray:
    """Constraint-gradient vector attached to one point.

    Bias-first blocks ``a_j sigma'(w^j.T + w0^j) (1, T)`` followed, for one
    hidden layer, by the block ``sigma(w^j.T + w0^j)``.  This is exactly the
    parameter gradient of the model in the package's flattened layout.
    """
    return network_param_gradient(params, act, point)


def generators(params: NetworkParams, act: Activation, points) -> np.ndarray:
    return param_gradients(params, act, points)


def _scale(G: np.ndarray) -> float:
    s = float(np.max(np.abs(G), initial=0.0))
    return s if s > 0 else 1.0


def check_uniform(params: NetworkParams, act: Activation, dataset: Dataset, tol: float | None = None, condition: str = "kkt") -> OptimalityVerdict:
    """Necessary condition for uniform (minimax) optimality.

    Let U and V be the generators at the positive and negative maximal
    deviation points.  ``condition="kkt"`` tests the stationarity system
    itself: some alpha in [0, 1] and convex weights give
    ``alpha * sum lamhat_i u_i = (1 - alpha) * sum muhat_j v_j``, i.e. the
    origin lies in conv(U and -V).  ``condition="hull"`` fixes alpha = 1/2,
    which is the plain intersection test conv(U) meets conv(V); it is
    stronger than stationarity unless all activation slopes coincide.

    For a Violated verdict ``residual_norm`` is twice the separation margin.
    Raises DegenerateProfile when the fit is already exact to ``tol``.
    """
    if condition not in ("kkt", "hull"):
        raise ValueError("condition must be 'kkt' or 'hull'")
    profile = compute_residuals(params, act, dataset)
    cls = classify(profile, LossMode.UNIFORM, tol)
    G = generators(params, act, dataset.points)
    m = G.shape[1]
    if not cls.P or not cls.Nn:
        # an empty hull meets nothing; a = 0 separates trivially
        b = -1.0 if cls.P else 1.0
        sep = Separation(np.zeros(m), b, 1.0)
        return OptimalityVerdict(Status.VIOLATED, LossMode.UNIFORM, cls, separation=sep, residual_norm=2.0)

    GP, GN = G[list(cls.P)], G[list(cls.Nn)]
    S = _scale(np.vstack([GP, GN]))
    try:
        if condition == "hull":
            res = hull_intersect(GP / S, GN / S)
        else:
            res = hull_intersect(np.vstack([GP, -GN]) / S, np.zeros((1, m)))
    except NotSeparable:
        return OptimalityVerdict(Status.DEGENERATE, LossMode.UNIFORM, cls)

    if isinstance(res, Intersect):
        if condition == "hull":
            split, lamhat, muhat = 0.5, res.lamhat, res.muhat
        else:
            lam = res.lamhat
            split = float(lam[: cls.n1].sum())
            lamhat = lam[: cls.n1] / split if split > 0 else np.zeros(cls.n1)
            muhat = lam[cls.n1:] / (1.0 - split) if split < 1 else np.zeros(cls.n2)
        mismatch = split * (lamhat @ GP) - (1.0 - split) * (muhat @ GN)
        witness = HullWitness(
            lamhat=dict(zip(cls.P, map(float, lamhat))),
            muhat=dict(zip(cls.Nn, map(float, muhat))),
            point=lamhat @ GP,
            split=split,
        )
        return OptimalityVerdict(
            Status.SATISFIED, LossMode.UNIFORM, cls, witness=witness,
            residual_norm=float(np.max(np.abs(mismatch))),
        )
    assert isinstance(res, Disjoint)
    if condition == "hull":
        sep = Separation(res.a, res.b * S, res.delta * S)
    else:
        # a.w >= b + delta on U and -V with 0 on the far side: a hyperplane through the origin
        sep = Separation(res.a, 0.0, (res.b + res.delta) * S)
    return OptimalityVerdict(
        Status.VIOLATED, LossMode.UNIFORM, cls, separation=sep, residual_norm=2.0 * sep.delta
    )


def check_manhattan(params: NetworkParams, act: Activation, dataset: Dataset, tol: float | None = None) -> OptimalityVerdict:
    """Test s = sum_P g_i - sum_N g_i against the zonotope sum_C co{g_i, -g_i}.

    With no zero-deviation points the zonotope is the origin and the test is
    the equality of the two generator sums up to the classification tolerance.  For a Violated verdict
    ``residual_norm`` is the certified gap, a lower bound on the l1 distance
    from s to the zonotope.
    """
    profile = compute_residuals(params, act, dataset)
    cls = classify(profile, LossMode.MANHATTAN, tol)
    G = generators(params, act, dataset.points)
    s = G[list(cls.P)].sum(axis=0) - G[list(cls.Nn)].sum(axis=0)
    GC = G[list(cls.C)]
    if not cls.C:
        # singleton case: the zonotope is the origin, so the two sums must agree to tol
        norm = float(np.max(np.abs(s), initial=0.0))
        if norm <= cls.tol:
            return OptimalityVerdict(
                Status.SATISFIED, LossMode.MANHATTAN, cls, witness=ZonotopeWitness({}),
                residual_norm=norm, target=s,
            )
        a = np.sign(s)
        gap = float(np.abs(s).sum())
        return OptimalityVerdict(
            Status.VIOLATED, LossMode.MANHATTAN, cls, separation=Separation(a, 0.5 * gap, 0.5 * gap),
            residual_norm=gap, target=s,
        )
    S = _scale(G)
    try:
        res = zonotope_contains(GC / S, s / S)
    except NotSeparable:
        return OptimalityVerdict(Status.DEGENERATE, LossMode.MANHATTAN, cls, target=s)
    if not isinstance(res, Outside):
        mismatch = res.t @ GC - s
        witness = ZonotopeWitness(dict(zip(cls.C, map(float, res.t))))
        return OptimalityVerdict(
            Status.SATISFIED, LossMode.MANHATTAN, cls, witness=witness,
            residual_norm=float(np.max(np.abs(mismatch), initial=0.0)), target=s,
        )
    support = float(np.abs(GC @ res.a).sum())
    gap = float(res.a @ s) - support
    sep = Separation(res.a, support + 0.5 * gap, 0.5 * gap)
    return OptimalityVerdict(
        Status.VIOLATED, LossMode.MANHATTAN, cls, separation=sep, residual_norm=gap, target=s
    )


def check(params, act, dataset, mode, tol=None, condition: str = "kkt") -> OptimalityVerdict:
    if LossMode.parse(mode) is LossMode.UNIFORM:
        return check_uniform(params, act, dataset, tol, condition)
    return check_manhattan(params, act, dataset, tol)


def multipliers_from_witness(verdict: OptimalityVerdict, classification: PointClassification | None = None, mode=None) -> Multipliers:
    """Recover KKT multipliers from a Satisfied verdict's certificate.

    Uniform: hull weights scaled by the witness split (alpha on P,
    1 - alpha on N), so the multipliers sum to one.
    Manhattan: unit multipliers on P and N; on C the pair
    ((1 - t_i) / 2, (1 + t_i) / 2) for the upper and lower constraints.
    """
    if verdict.status is not Status.SATISFIED or verdict.witness is None:
        raise NoWitness(f"verdict is {verdict.status.value}; no witness to convert")
    cls = classification or verdict.classification
    mode = LossMode.parse(mode or verdict.mode)
    w = verdict.witness
    if mode is LossMode.UNIFORM:
        lam = {i: w.split * w.lamhat[i] for i in cls.P}
        lam.update({i: (1.0 - w.split) * w.muhat[i] for i in cls.Nn})
        return Multipliers(lam)
    lam = {i: 1.0 for i in cls.P + cls.Nn}
    plus = {i: 0.5 * (1.0 - w.t[i]) for i in cls.C}
    minus = {i: 0.5 * (1.0 + w.t[i]) for i in cls.C}
    return Multipliers(lam, plus, minus)


def assemble_kkt_residual(params, act, dataset, classification: PointClassification, multipliers: Multipliers, mode=None):
    """Stationarity vector of the smooth epigraph reformulation.

    Rows are the network parameters (flattened layout) followed by the
    auxiliary variable z (uniform) or z_1..z_N (Manhattan).  The upper
    constraint ``model - f - z <= 0`` has gradient (g_i, -1) and the lower one
    ``f - model - z <= 0`` has gradient (-g_i, -1).  Returns the vector and its
    infinity norm.
    """
    mode = LossMode.parse(mode or classification.mode)
    G = generators(params, act, dataset.points)
    N, m = G.shape
    all_values = (
        list(multipliers.lam.values())
        + list(multipliers.lam_plus.values())
        + list(multipliers.lam_minus.values())
    )
    if any(v < 0 for v in all_values):
        raise ValueError("multipliers must be nonnegative")
    upper_side = set(classification.P)
    lower_side = set(classification.Nn)
    for i in list(multipliers.lam) + list(multipliers.lam_plus) + list(multipliers.lam_minus):
        if not 0 <= i < N:
            raise ShapeMismatch(f"multiplier index {i} outside 0..{N - 1}")

    if mode is LossMode.UNIFORM:
        if multipliers.lam_plus or multipliers.lam_minus:
            raise ShapeMismatch("uniform mode has no zero-deviation multipliers")
        vec = np.zeros(m + 1)
        vec[m] = 1.0
        for i, lam in multipliers.lam.items():
            if i in upper_side:
                vec[:m] += lam * G[i]
            elif i in lower_side:
                vec[:m] -= lam * G[i]
            else:
                raise ShapeMismatch(f"index {i} is not a maximal deviation point")
            vec[m] -= lam
    else:
        vec = np.zeros(m + N)
        vec[m:] = 1.0
        for i, lam in multipliers.lam.items():
            if i in upper_side:
                vec[:m] += lam * G[i]
            elif i in lower_side:
                vec[:m] -= lam * G[i]
            else:
                raise ShapeMismatch(f"index {i} is a zero-deviation point; use lam_plus/lam_minus")
            vec[m + i] -= lam
        for i, lam in multipliers.lam_plus.items():
            vec[:m] += lam * G[i]
            vec[m + i] -= lam
        for i, lam in multipliers.lam_minus.items():
            vec[:m] -= lam * G[i]
            vec[m + i] -= lam
    return vec, float(np.max(np.abs(vec)))
