"""Achievability analysis for duration-constrained coverage of the horizon.

A length ``w > 0`` is *achievable* under duration bounds ``(ell, r)`` when it
can be written as a finite sum of durations that each lie in ``[ell, r]``.
Equivalently, ``w`` is achievable iff ``ceil(w / r) <= w / ell``: the witness
is ``q = ceil(w / r)`` equal pieces of width ``w / q``.

Whether the full horizon ``w = 1`` is achievable (the *good region* of
``(ell, r)`` pairs) decides the shape of every schedule downstream, so the
predicates here are deliberately exact about rational boundaries: ratios are
snapped to the nearest integer within ``SNAP_TOL`` before any floor/ceil, so
pairs like ``(0.25, 0.25)`` classify the way exact arithmetic would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from .errors import AchievabilityError, ParameterError

if TYPE_CHECKING:  # pragma: no cover
    from .scheduler import DemandSet

# Ratios within SNAP_TOL of an integer are treated as that integer before
# applying floor/ceil; binary floating point would otherwise misclassify
# exactly-rational parameter pairs.
SNAP_TOL = 1e-9


def _snap(x: float) -> float:
    n = round(x)
    return float(n) if abs(x - n) < SNAP_TOL else x


def _ceil(x: float) -> int:
    return int(math.ceil(_snap(x)))


def _floor(x: float) -> int:
    return int(math.floor(_snap(x)))


@dataclass(frozen=True)
class SystemParams:
    """Duration bounds ``0 < ell <= r`` shared by every demand.

    ``r > 1`` is accepted and recorded, but all computations clamp it to the
    horizon length (a demand can never run longer than the horizon), exposed
    as :attr:`r_eff`.  ``ell`` must be positive, since every bound divides by
    it, and cannot exceed 1, otherwise no feasible duration exists at all.
    """

    ell: float
    r: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.ell) and math.isfinite(self.r)):
            raise ParameterError("duration bounds must be finite")
        if self.ell <= 0:
            raise ParameterError(f"ell must be positive, got {self.ell}")
        if self.ell > 1:
            raise ParameterError(
                f"ell={self.ell} exceeds the unit horizon; no duration can satisfy it"
            )
        if self.r < self.ell:
            raise ParameterError(f"need ell <= r, got ell={self.ell}, r={self.r}")

    @property
    def r_eff(self) -> float:
        """Upper duration bound after clamping to the horizon."""
        return min(self.r, 1.0)


class Case(str, Enum):
    """Instance classification driving the choice of schedule construction."""

    IDEAL = "ideal"
    NEAR_IDEAL = "near_ideal"
    NON_IDEAL = "non_ideal"


@dataclass(frozen=True)
class SlotPlan:
    """Slot layout for a classified instance.

    ``k0`` equal slots of width ``s0`` cover ``[0, z_star]``; the ideal case
    carries the conventional single full-horizon slot.
    """

    case: Case
    k0: int
    s0: float
    z_star: float


def is_achievable(w: float, params: SystemParams) -> bool:
    """Whether ``w`` is a finite sum of durations from ``[ell, r_eff]``."""
    if not (w > 0 and math.isfinite(w)):
        raise ParameterError(f"width must be positive and finite, got {w}")
    return _ceil(w / params.r_eff) <= _snap(w / params.ell)


def largest_achievable(w: float, params: SystemParams) -> float:
    """``w`` itself when achievable, else the largest achievable value below it.

    The supremum of achievable values below a non-achievable ``w`` is
    ``r_eff * floor(w / r_eff)``, which is 0 when ``w < ell``.
    """
    if is_achievable(w, params):
        return w
    return params.r_eff * _floor(w / params.r_eff)


def good_region(params: SystemParams) -> bool:
    """Whether the full horizon ``w = 1`` is achievable."""
    return is_achievable(1.0, params)


def classify(params: SystemParams, demands: "DemandSet | None" = None) -> SlotPlan:
    """Classify an instance and lay out its slots.

    Ideal when the effective upper bound reaches the horizon, or when the
    given demands fit proportionally (``ell <= A_i / A <= r_eff`` for all i,
    only checkable when ``demands`` is provided).  Otherwise near-ideal when
    the horizon is achievable and non-ideal when it is not.
    """
    r_eff = params.r_eff
    if r_eff >= 1.0:
        return SlotPlan(Case.IDEAL, 1, 1.0, 1.0)
    if demands is not None:
        total = demands.total
        if params.ell <= demands.a_min / total and demands.a_max / total <= r_eff:
            return SlotPlan(Case.IDEAL, 1, 1.0, 1.0)
    if good_region(params):
        k0 = _ceil(1.0 / r_eff)
        return SlotPlan(Case.NEAR_IDEAL, k0, 1.0 / k0, 1.0)
    k0 = _floor(1.0 / r_eff)
    return SlotPlan(Case.NON_IDEAL, k0, r_eff, r_eff * k0)


def decompose(w: float, params: SystemParams) -> list[float]:
    """Equal-width witness for an achievable ``w``.

    Returns ``q = ceil(w / r_eff)`` copies of ``w / q``; every element lies in
    ``[ell, r_eff]`` and the copies sum back to ``w``.
    """
    if not is_achievable(w, params):
        raise AchievabilityError(
            f"w={w} is not achievable for ell={params.ell}, r={params.r}"
        )
    q = _ceil(w / params.r_eff)
    return [w / q] * q
