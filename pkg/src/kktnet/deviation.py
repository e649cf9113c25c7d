"""Residuals and the positive / negative / zero deviation partition."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateProfile, DimensionMismatch
from .model import Activation, Dataset, NetworkParams, evaluate


class LossMode(str, Enum):
    UNIFORM = "uniform"
    MANHATTAN = "manhattan"

    @classmethod
    def parse(cls, value) -> "LossMode":
        if isinstance(value, cls):
            return value
        aliases = {"l1": cls.MANHATTAN, "chebyshev": cls.UNIFORM, "max": cls.UNIFORM}
        key = str(value).lower()
        return aliases.get(key) or cls(key)


MANHATTAN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class DeviationProfile:
    residuals: np.ndarray
    z_max: float
    l1_total: float

    @classmethod
    def from_residuals(cls, residuals) -> "DeviationProfile":
        r = np.array(residuals, dtype=float).ravel()
        r.setflags(write=False)
        abs_r = np.abs(r)
        return cls(r, float(abs_r.max()), float(abs_r.sum()))


@dataclass(frozen=True)
class PointClassification:
    """Index partition (0-based) into positive, negative and zero deviation sets."""

    mode: LossMode
    P: tuple
    Nn: tuple
    C: tuple
    tol: float

    @property
    def n1(self) -> int:
        return len(self.P)

    @property
    def n2(self) -> int:
        return len(self.Nn)

    @property
    def n3(self) -> int:
        return len(self.C)

    def summary(self) -> dict:
        return {
            "mode": self.mode.value,
            "n1": self.n1,
            "n2": self.n2,
            "n3": self.n3,
            "P": list(self.P),
            "N": list(self.Nn),
            "C": list(self.C),
            "tol": self.tol,
        }


def compute_residuals(params: NetworkParams, act: Activation, dataset: Dataset) -> DeviationProfile:
    if params.dim != dataset.dim:
        raise DimensionMismatch(
            f"parameters expect d={params.dim}, dataset has d={dataset.dim}"
        )
    return DeviationProfile.from_residuals(evaluate(params, act, dataset.points) - dataset.targets)


def default_tol(profile: DeviationProfile, mode) -> float:
    if LossMode.parse(mode) is LossMode.UNIFORM:
        return max(1e-8, 1e-6 * profile.z_max)
    return MANHATTAN_TOL


def classify(profile: DeviationProfile, mode, tol: float | None = None) -> PointClassification:
    """Partition point indices by the sign of their deviation.

    Uniform mode keeps only maximal absolute deviation points (within ``tol``
    of ``z_max``) in P / N; Manhattan mode splits every point by sign with a
    zero band of width ``tol``.
    """
    mode = LossMode.parse(mode)
    if tol is None:
        tol = default_tol(profile, mode)
    if not tol > 0:
        raise ValueError("tol must be positive")
    r = profile.residuals
    if mode is LossMode.UNIFORM:
        if profile.z_max <= tol:
            raise DegenerateProfile(
                f"z_max={profile.z_max:.3g} <= tol={tol:.3g}: approximation exact to tolerance"
            )
        maximal = np.abs(r) >= profile.z_max - tol
        pos = maximal & (r > 0)
        neg = maximal & (r < 0)
    else:
        pos = r > tol
        neg = r < -tol
    zero = ~(pos | neg)
    return PointClassification(
        mode=mode,
        P=tuple(int(i) for i in np.flatnonzero(pos)),
        Nn=tuple(int(i) for i in np.flatnonzero(neg)),
        C=tuple(int(i) for i in np.flatnonzero(zero)),
        tol=float(tol),
    )
