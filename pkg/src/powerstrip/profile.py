"""Power profiles, peaks and optimality certificates.

The instantaneous power of a policy is the sum of intensities of all demands
active at that instant.  Activity intervals are treated as half-open,
``[tau, tau + s)``: a closed indicator would double-count the shared boundary
of side-by-side demands, a measure-zero artifact, so what this module
computes is the essential supremum of the profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from . import region
from .errors import InfeasiblePolicyError, ParameterError, UnsupportedPolicyError
from .region import SystemParams

if TYPE_CHECKING:  # pragma: no cover
    from .scheduler import DemandSet, Policy

# Event times closer than this are merged into one breakpoint; keeps
# floating-point noise from spawning zero-width segments.
MERGE_TOL = 1e-12

CERT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant power over [0, 1].

    ``times`` are strictly increasing breakpoints starting at 0 and ending at
    1; ``values[k]`` is the level on the half-open segment
    ``[times[k], times[k+1])``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.array(self.times, dtype=np.float64, copy=True)
        values = np.array(self.values, dtype=np.float64, copy=True)
        if times.ndim != 1 or times.size < 2:
            raise ParameterError("need at least the two endpoint breakpoints")
        if values.shape != (times.size - 1,):
            raise ParameterError("need exactly one value per segment")
        if times[0] != 0.0 or times[-1] != 1.0:
            raise ParameterError("breakpoints must start at 0 and end at 1")
        if np.any(np.diff(times) <= 0):
            raise ParameterError("breakpoints must be strictly increasing")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ParameterError("power levels must be finite and non-negative")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        """Exact integral over [0, 1]: sum of value * segment width."""
        return float(np.dot(self.values, np.diff(self.times)))

    def value_at(self, t: float) -> float:
        """Level at time ``t`` (right-continuous; ``t = 1`` returns the last level)."""
        if not 0.0 <= t <= 1.0:
            raise ParameterError(f"t={t} outside [0, 1]")
        k = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.values[min(k, self.values.size - 1)])


def power_profile(policy: "Policy") -> StepFunction:
    """Exact power profile of a feasible policy via an event sweep.

    Each demand contributes its intensity on ``[tau, tau + s)``.  The sweep
    sorts the 2n interval endpoints, merges breakpoints closer than
    ``MERGE_TOL`` and accumulates intensity deltas, so it costs O(n log n).
    """
    tau, s, d = policy.tau, policy.s, policy.d
    if tau.size == 0:
        return StepFunction(np.array([0.0, 1.0]), np.array([0.0]))
    finite = np.all(np.isfinite(tau)) and np.all(np.isfinite(s)) and np.all(np.isfinite(d))
    if not finite or np.any(s <= 0) or np.any(d < 0):
        raise InfeasiblePolicyError("durations must be positive and intensities non-negative")
    if np.any(tau < -1e-9) or np.any(tau + s > 1.0 + 1e-9):
        raise InfeasiblePolicyError("policy leaves the unit scheduling window")

    starts = np.clip(tau, 0.0, 1.0)
    ends = np.clip(tau + s, 0.0, 1.0)
    times = np.concatenate([starts, ends])
    deltas = np.concatenate([d, -d])
    order = np.argsort(times, kind="stable")
    t_sorted = times[order]
    deltas = deltas[order]

    group_start = np.empty(t_sorted.size, dtype=bool)
    group_start[0] = True
    group_start[1:] = np.diff(t_sorted) > MERGE_TOL
    starts_idx = np.flatnonzero(group_start)
    reps = t_sorted[starts_idx]
    levels = np.cumsum(np.add.reduceat(deltas, starts_idx))

    interior = (reps > MERGE_TOL) & (reps < 1.0 - MERGE_TOL)
    at_zero = reps <= MERGE_TOL
    base = levels[np.flatnonzero(at_zero)[-1]] if np.any(at_zero) else 0.0
    breakpoints = np.concatenate([[0.0], reps[interior], [1.0]])
    values = np.concatenate([[base], levels[interior]])
    # Cancellation can leave -1e-17 dust where the profile is really 0.
    values = np.maximum(values, 0.0)
    return StepFunction(breakpoints, values)


def peak_power(f: StepFunction) -> float:
    """Maximum level of the profile (its essential supremum)."""
    return float(np.max(f.values))


def stacked_height(policy: "Policy") -> float:
    """Tallest stack over the policy's slots.

    Sums intensities per slot index and returns the largest load.  Equals the
    peak for slot-aligned policies; for the full-horizon stack it is the
    total energy.  Policies without slot structure are not supported.
    """
    if len(policy) == 0:
        return 0.0
    if np.any(policy.slot < 0):
        raise UnsupportedPolicyError(
            "stacked height is defined only for slot-structured policies"
        )
    loads = np.bincount(policy.slot, weights=policy.d)
    return float(np.max(loads))


@dataclass(frozen=True)
class BoundCertificate:
    """Guaranteed envelope for the optimal peak, optionally with a measured one.

    ``a_bar`` is the certified lower bound on the optimal peak (total energy
    in the good region, else total energy over the largest achievable
    coverage); ``upper = a_bar + a_max / ell`` is the certified upper bound.
    ``achieved_peak`` and ``within`` are filled in once a policy is measured.
    """

    a_bar: float
    upper: float
    achieved_peak: float | None = None
    within: bool | None = None

    def with_peak(self, peak: float) -> "BoundCertificate":
        return BoundCertificate(self.a_bar, self.upper, peak, peak <= self.upper + CERT_TOL)


def theoretical_bounds(demands: "DemandSet", params: SystemParams) -> BoundCertificate:
    """Compute the optimality envelope for an instance (peak left unfilled)."""
    total = demands.total
    if region.good_region(params):
        a_bar = total
    else:
        a_bar = total / region.largest_achievable(1.0, params)
    return BoundCertificate(a_bar, a_bar + demands.a_max / params.ell)


def certify(policy: "Policy", demands: "DemandSet", params: SystemParams) -> BoundCertificate:
    """Measure a policy's peak and report it against the optimality envelope."""
    cert = theoretical_bounds(demands, params)
    return cert.with_peak(peak_power(power_profile(policy)))
