"""Schedule constructions for malleable demands on the unit horizon.

Each demand ``i`` needs energy ``A_i`` delivered without interruption during
``[tau_i, tau_i + s_i]`` at constant intensity ``d_i = A_i / s_i``, with the
duration confined to ``[ell, r]``.  This module builds the three policy
families:

* ideal constructions (stack everything across the horizon, or lay demands
  side by side with proportional durations),
* the linear-time slot filler: equal slots, filled in input order, moving to
  the next slot once the current load reaches ``A / z_star``,
* the greedy variant: demands sorted by non-increasing energy, each placed
  into the currently least-loaded slot.

Policies are stored column-wise in numpy arrays so that scheduling a million
demands stays well under a second; :attr:`Policy.assignments` materialises
per-demand tuples on request.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import region
from .errors import CaseMismatchError, EmptyInputError, ParameterError
from .region import Case, SlotPlan, SystemParams

REL_TOL = 1e-9
FEAS_TOL = 1e-9

# Sentinel slot index inside Policy arrays for assignments without a slot.
NO_SLOT = -1


class Demand(NamedTuple):
    id: int
    energy: float


class Assignment(NamedTuple):
    """Placement of one demand: start, duration, intensity, optional slot."""

    demand_id: int
    tau: float
    s: float
    d: float
    slot_index: int | None = None


def _frozen_array(values, dtype) -> np.ndarray:
    # Already-immutable arrays pass through uncopied; the schedulers rely on
    # this to hand over freshly built columns without duplicating them.
    if (
        isinstance(values, np.ndarray)
        and values.dtype == dtype
        and values.ndim == 1
        and not values.flags.writeable
        and (values.base is None or not values.base.flags.writeable)
    ):
        return values
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _freeze(*arrays: np.ndarray) -> None:
    for arr in arrays:
        arr.setflags(write=False)


@dataclass(frozen=True, eq=False)
class DemandSet:
    """Ordered demands with cached aggregates.

    Energies must be strictly positive (a zero-area demand has no defined
    intensity) and ids unique; the set is never empty.
    """

    ids: np.ndarray
    energies: np.ndarray

    def __post_init__(self) -> None:
        ids = _frozen_array(self.ids, np.int64)
        energies = _frozen_array(self.energies, np.float64)
        if energies.ndim != 1 or ids.shape != energies.shape:
            raise ParameterError("ids and energies must be matching 1-d sequences")
        if energies.size == 0:
            raise EmptyInputError("demand set must contain at least one demand")
        if not np.all(np.isfinite(energies)) or np.any(energies <= 0):
            raise ParameterError("demand energies must be positive and finite")
        if np.unique(ids).size != ids.size:
            raise ParameterError("demand ids must be unique")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "energies", energies)

    @classmethod
    def from_energies(cls, energies: Sequence[float]) -> "DemandSet":
        energies = np.asarray(energies, dtype=np.float64)
        return cls(np.arange(len(energies), dtype=np.int64), energies)

    @classmethod
    def from_demands(cls, demands: Iterable[Demand]) -> "DemandSet":
        items = list(demands)
        return cls([d.id for d in items], [d.energy for d in items])

    @cached_property
    def total(self) -> float:
        return float(np.sum(self.energies))

    @cached_property
    def a_min(self) -> float:
        return float(np.min(self.energies))

    @cached_property
    def a_max(self) -> float:
        return float(np.max(self.energies))

    def __len__(self) -> int:
        return int(self.energies.size)

    def __iter__(self) -> Iterator[Demand]:
        for i, e in zip(self.ids, self.energies):
            yield Demand(int(i), float(e))


class Algorithm(str, Enum):
    IDEAL_STACK = "ideal_stack"
    IDEAL_PROPORTIONAL = "ideal_proportional"
    PSP_FILL = "psp_fill"
    GREEDY = "greedy"


@dataclass(frozen=True, eq=False)
class Policy:
    """One assignment per demand, stored column-wise, plus the slot plan."""

    demand_ids: np.ndarray
    tau: np.ndarray
    s: np.ndarray
    d: np.ndarray
    slot: np.ndarray
    plan: SlotPlan
    algorithm: Algorithm

    def __post_init__(self) -> None:
        object.__setattr__(self, "demand_ids", _frozen_array(self.demand_ids, np.int64))
        for name in ("tau", "s", "d"):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), np.float64))
        object.__setattr__(self, "slot", _frozen_array(self.slot, np.int64))
        n = self.demand_ids.size
        for name in ("tau", "s", "d", "slot"):
            if getattr(self, name).shape != (n,):
                raise ParameterError("policy columns must have identical length")

    @classmethod
    def from_assignments(
        cls,
        assignments: Iterable[Assignment],
        plan: SlotPlan,
        algorithm: Algorithm,
    ) -> "Policy":
        items = list(assignments)
        return cls(
            demand_ids=[a.demand_id for a in items],
            tau=[a.tau for a in items],
            s=[a.s for a in items],
            d=[a.d for a in items],
            slot=[NO_SLOT if a.slot_index is None else a.slot_index for a in items],
            plan=plan,
            algorithm=algorithm,
        )

    @cached_property
    def assignments(self) -> tuple[Assignment, ...]:
        return tuple(
            Assignment(int(i), float(t), float(w), float(h), None if j < 0 else int(j))
            for i, t, w, h, j in zip(self.demand_ids, self.tau, self.s, self.d, self.slot)
        )

    def __len__(self) -> int:
        return int(self.demand_ids.size)


def schedule_ideal_stack(demands: DemandSet, params: SystemParams) -> Policy:
    """Stretch every demand across the whole horizon and stack them.

    Requires the effective upper duration bound to reach the horizon; the
    resulting peak equals the total energy.
    """
    if params.r_eff < 1.0:
        raise CaseMismatchError(
            f"stacking needs r >= 1, got effective r = {params.r_eff}"
        )
    n = len(demands)
    tau = np.zeros(n)
    s = np.ones(n)
    slot = np.zeros(n, dtype=np.int64)
    _freeze(tau, s, slot)
    return Policy(
        demand_ids=demands.ids,
        tau=tau,
        s=s,
        d=demands.energies,
        slot=slot,
        plan=SlotPlan(Case.IDEAL, 1, 1.0, 1.0),
        algorithm=Algorithm.IDEAL_STACK,
    )


def schedule_ideal_proportional(demands: DemandSet, params: SystemParams) -> Policy:
    """Lay demands side by side with durations proportional to their energies.

    Requires ``ell <= A_i / A <= r_eff`` for every demand.  All intensities
    equal the total energy ``A``, the durations tile ``[0, 1]`` exactly, and
    the peak is ``A``.
    """
    total = demands.total
    if not (params.ell <= demands.a_min / total and demands.a_max / total <= params.r_eff):
        raise CaseMismatchError(
            "proportional placement needs ell <= A_i/A <= r for every demand"
        )
    s = demands.energies / total
    ends = np.cumsum(s)
    tau = np.concatenate([[0.0], ends[:-1]])
    n = len(demands)
    d = np.full(n, total)
    slot = np.arange(n, dtype=np.int64)
    _freeze(tau, s, d, slot)
    return Policy(
        demand_ids=demands.ids,
        tau=tau,
        s=s,
        d=d,
        slot=slot,
        plan=SlotPlan(Case.IDEAL, 1, 1.0, 1.0),
        algorithm=Algorithm.IDEAL_PROPORTIONAL,
    )


def _schedule_ideal(demands: DemandSet, params: SystemParams) -> Policy:
    # Stacking is preferred when both ideal constructions apply.
    if params.r_eff >= 1.0:
        return schedule_ideal_stack(demands, params)
    return schedule_ideal_proportional(demands, params)


def _fill_slots(d: np.ndarray, k0: int, threshold: float) -> np.ndarray:
    """Slot index per demand, input order.

    Demands accumulate in the current slot; once its load reaches or passes
    the threshold the next demand opens the next slot.  The final slot takes
    everything that remains (the threshold rule can only overrun the slot
    count through accumulated floating-point slack, never in exact
    arithmetic), and trailing slots stay empty when demands run out first.
    """
    n = d.size
    slots = np.empty(n, dtype=np.int64)
    cum = np.cumsum(d)
    start = 0
    offset = 0.0
    for j in range(k0):
        if start >= n:
            break
        if j == k0 - 1:
            stop = n
        else:
            idx = int(np.searchsorted(cum, offset + threshold, side="left"))
            stop = min(idx + 1, n)
        slots[start:stop] = j
        offset = cum[stop - 1]
        start = stop
    return slots


def schedule_psp(demands: DemandSet, params: SystemParams) -> Policy:
    """Linear-time slot filler.

    Classifies the instance first; ideal instances delegate to the ideal
    constructions.  Otherwise demands are taken in input order and poured
    into ``k0`` equal slots of width ``s0``, advancing whenever the current
    slot's load reaches ``A / z_star``.  Runs in O(n) time and memory.
    """
    plan = region.classify(params, demands)
    if plan.case is Case.IDEAL:
        return _schedule_ideal(demands, params)
    d = demands.energies / plan.s0
    slots = _fill_slots(d, plan.k0, demands.total / plan.z_star)
    tau = slots * plan.s0
    s = np.full(len(demands), plan.s0)
    _freeze(tau, s, d, slots)
    return Policy(
        demand_ids=demands.ids,
        tau=tau,
        s=s,
        d=d,
        slot=slots,
        plan=plan,
        algorithm=Algorithm.PSP_FILL,
    )


def schedule_greedy(demands: DemandSet, params: SystemParams) -> Policy:
    """Greedy variant: largest demands first, each into the lightest slot.

    Sorting is by energy descending with ties broken by ascending id; load
    ties pick the lowest slot index.  Costs O(n log n + n * k0).
    """
    plan = region.classify(params, demands)
    if plan.case is Case.IDEAL:
        return _schedule_ideal(demands, params)
    d = demands.energies / plan.s0
    order = np.lexsort((demands.ids, -demands.energies))
    k0 = plan.k0
    loads = [0.0] * k0
    slot_range = range(k0)
    slots = np.empty(len(demands), dtype=np.int64)
    d_list = d.tolist()
    for i in order.tolist():
        j = min(slot_range, key=loads.__getitem__)
        slots[i] = j
        loads[j] += d_list[i]
    tau = slots * plan.s0
    s = np.full(len(demands), plan.s0)
    _freeze(tau, s, d, slots)
    return Policy(
        demand_ids=demands.ids,
        tau=tau,
        s=s,
        d=d,
        slot=slots,
        plan=plan,
        algorithm=Algorithm.GREEDY,
    )


@dataclass(frozen=True)
class Violation:
    kind: str
    demand_id: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_policy(
    policy: Policy, demands: DemandSet, params: SystemParams
) -> ValidationReport:
    """Check a policy against the demand set and duration constraints.

    Reports every violated constraint: demand accounting (missing, duplicate
    or unknown ids), the scheduling window ``0 <= tau`` and
    ``tau + s <= 1``, the duration bounds ``ell <= s <= r_eff``, and energy
    conservation ``d * s = A_i`` (relative tolerance 1e-9).  An empty report
    means the policy is feasible.
    """
    out: list[Violation] = []
    pids = policy.demand_ids

    uniq, counts = np.unique(pids, return_counts=True)
    for i in uniq[counts > 1]:
        out.append(Violation("duplicate", int(i), f"demand {i} assigned more than once"))
    known_mask = np.isin(uniq, demands.ids)
    for i in uniq[~known_mask]:
        out.append(Violation("unknown", int(i), f"assignment for unknown demand {i}"))
    missing = demands.ids[~np.isin(demands.ids, uniq)]
    for i in missing:
        out.append(Violation("missing", int(i), f"demand {i} has no assignment"))

    tau, s, d = policy.tau, policy.s, policy.d
    bad_window = (tau < -FEAS_TOL) | (tau + s > 1.0 + FEAS_TOL)
    for k in np.flatnonzero(bad_window):
        out.append(
            Violation(
                "window",
                int(pids[k]),
                f"demand {pids[k]}: [tau, tau+s] = [{tau[k]:.12g}, {tau[k] + s[k]:.12g}] "
                "leaves the unit horizon",
            )
        )
    bad_duration = (s < params.ell - FEAS_TOL) | (s > params.r_eff + FEAS_TOL)
    for k in np.flatnonzero(bad_duration):
        out.append(
            Violation(
                "duration",
                int(pids[k]),
                f"demand {pids[k]}: duration {s[k]:.12g} outside "
                f"[{params.ell:.12g}, {params.r_eff:.12g}]",
            )
        )

    # Energy conservation, checked only for ids that map to a known demand.
    sort_idx = np.argsort(demands.ids)
    sorted_ids = demands.ids[sort_idx]
    pos = np.searchsorted(sorted_ids, pids)
    pos_c = np.clip(pos, 0, sorted_ids.size - 1)
    known = sorted_ids[pos_c] == pids
    energy = demands.energies[sort_idx][pos_c]
    mismatch = known & (np.abs(d * s - energy) > REL_TOL * energy)
    for k in np.flatnonzero(mismatch):
        out.append(
            Violation(
                "energy",
                int(pids[k]),
                f"demand {pids[k]}: d*s = {d[k] * s[k]:.12g} != energy {energy[k]:.12g}",
            )
        )

    return ValidationReport(tuple(out))
