"""Independent verification machinery.

Nothing here is on the production scheduling path.  The module provides

* :func:`achievable_by_search`, a plain enumeration that cross-checks the
  closed-form achievability test,
* :func:`brute_force_peak`, an exhaustive grid search over placements for
  desk-scale instances, used to sandwich the schedulers between the certified
  lower bound and their own peaks,
* the filling construction and structure checker used to validate the
  lower-bound argument: rows of narrow rectangles where every complete row
  leaves less than ``ell`` of total gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import profile, region
from .errors import (
    CaseMismatchError,
    InstanceTooLargeError,
    ParameterError,
)
from .region import Case, SystemParams
from .scheduler import DemandSet

GEOM_TOL = 1e-9


def achievable_by_search(w: float, params: SystemParams) -> bool:
    """Achievability by direct enumeration, no ceiling formula.

    Tries every integer piece count ``q`` up to ``ceil(w / ell)`` and accepts
    when ``w / q`` lies in ``[ell, r_eff]`` (1e-9 slack on both comparisons,
    mirroring the closed form's integer snapping).
    """
    if not (w > 0 and math.isfinite(w)):
        raise ParameterError(f"width must be positive and finite, got {w}")
    ell, r_eff = params.ell, params.r_eff
    q_max = int(math.ceil(region._snap(w / ell)))
    for q in range(1, q_max + 1):
        piece = w / q
        if ell - 1e-9 <= piece <= r_eff + 1e-9:
            return True
    return False


@dataclass(frozen=True)
class GridSearchConfig:
    """Discretisation for the exhaustive placement search.

    Start times and durations are enumerated on inclusive lattices of the
    given steps; the duration grid always contains both ``ell`` and ``r_eff``
    exactly, and both grids are enriched with the slot-aligned and
    proportional placements of the instance so the reference constructions
    are representable (the search then provably upper-bounds nothing looser
    than those policies).  ``max_n`` guards against combinatorial explosion.
    """

    tau_step: float = 0.05
    s_step: float = 0.05
    max_n: int = 3

    def __post_init__(self) -> None:
        if not (self.tau_step > 0 and self.s_step > 0):
            raise ParameterError("grid steps must be positive")
        if not 1 <= self.max_n <= 4:
            raise ParameterError("max_n must lie in 1..4")


def _dedupe_sorted(values: np.ndarray) -> np.ndarray:
    values = np.sort(values)
    if values.size <= 1:
        return values
    keep = np.empty(values.size, dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(values) > 1e-12
    return values[keep]


def duration_grid(params: SystemParams, cfg: GridSearchConfig, extra=()) -> np.ndarray:
    """Inclusive duration lattice over [ell, r_eff] plus any extra in-range points."""
    lo, hi = params.ell, params.r_eff
    count = int(math.floor((hi - lo) / cfg.s_step + 1e-9))
    vals = lo + cfg.s_step * np.arange(count + 1)
    extras = [v for v in extra if lo - 1e-12 <= v <= hi + 1e-12]
    return _dedupe_sorted(np.concatenate([vals, [hi], extras]))


def start_grid(s: float, cfg: GridSearchConfig, extra=()) -> np.ndarray:
    """Inclusive start-time lattice over [0, 1 - s] plus extra in-range points."""
    hi = max(1.0 - s, 0.0)
    count = int(math.floor(hi / cfg.tau_step + 1e-9))
    vals = cfg.tau_step * np.arange(count + 1)
    extras = [v for v in extra if 0.0 <= v <= hi + 1e-12]
    return _dedupe_sorted(np.concatenate([vals, [hi], extras]))


def _candidates(
    energy: float,
    params: SystemParams,
    cfg: GridSearchConfig,
    extra_s,
    extra_tau,
    extra_pairs,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (tau, s, d) placements of one demand on the enriched grid."""
    taus, ss = [], []
    for s in duration_grid(params, cfg, extra=extra_s):
        tg = start_grid(s, cfg, extra=extra_tau)
        taus.append(tg)
        ss.append(np.full(tg.size, s))
    for tau_x, s_x in extra_pairs:
        if params.ell - 1e-12 <= s_x <= params.r_eff + 1e-12 and tau_x + s_x <= 1.0 + 1e-12:
            taus.append(np.array([tau_x]))
            ss.append(np.array([s_x]))
    tau = np.concatenate(taus)
    s = np.concatenate(ss)
    return tau, s, energy / s


def _active_at(tau_a, s_a, d_a, t_eval) -> np.ndarray:
    """Matrix [i, j] = d_a[i] if placement i is active at instant t_eval[j], else 0."""
    active = (tau_a[:, None] <= t_eval[None, :]) & (t_eval[None, :] < (tau_a + s_a)[:, None])
    return np.where(active, d_a[:, None], 0.0)


def _min_peak_1(c1) -> float:
    return float(np.min(c1[2]))


def _min_peak_2(c1, c2) -> float:
    tau1, s1, d1 = c1
    tau2, s2, d2 = c2
    at1 = _active_at(tau2, s2, d2, tau1)  # (m2, m1): demand-2 contribution at tau1
    at2 = _active_at(tau1, s1, d1, tau2)  # (m1, m2)
    p1 = d1[None, :] + at1  # evaluated at tau1, shape (m2, m1)
    p2 = d2[:, None] + at2.T  # evaluated at tau2, shape (m2, m1)
    return float(np.min(np.maximum(p1, p2)))


def _min_peak_3(c1, c2, c3) -> float:
    tau1, s1, d1 = c1
    tau2, s2, d2 = c2
    tau3, s3, d3 = c3
    # Pairwise contribution matrices: c_ab[i, j] = intensity of a's placement i
    # at b's evaluation instant j.
    c12 = _active_at(tau1, s1, d1, tau2)
    c13 = _active_at(tau1, s1, d1, tau3)
    c21 = np.ascontiguousarray(_active_at(tau2, s2, d2, tau1).T)  # (m1, m2)
    c23 = _active_at(tau2, s2, d2, tau3)
    c31 = np.ascontiguousarray(_active_at(tau3, s3, d3, tau1).T)  # (m1, m3)
    c32t = np.ascontiguousarray(_active_at(tau3, s3, d3, tau2).T)  # (m2, m3)
    best = math.inf
    buf = np.empty((tau2.size, tau3.size))
    tmp = np.empty_like(buf)
    for i in range(tau1.size):
        # Peak over the three evaluation instants, for every (j, k) pair.
        np.add(c21[i, :][:, None], c31[i, :][None, :], out=buf)
        buf += d1[i]
        np.add((d2 + c12[i, :])[:, None], c32t, out=tmp)
        np.maximum(buf, tmp, out=buf)
        np.add((d3 + c13[i, :])[None, :], c23, out=tmp)
        np.maximum(buf, tmp, out=buf)
        m = buf.min()
        if m < best:
            best = float(m)
    return best


def _min_peak_4(c1, c2, c3, c4) -> float:
    tau3, s3, d3 = c3
    tau4, s4, d4 = c4
    c34 = _active_at(tau3, s3, d3, tau4)
    c43t = _active_at(tau4, s4, d4, tau3).T  # (m3, m4)
    row3 = d3[:, None]
    row4 = d4[None, :]
    best = math.inf
    tau1, s1, d1 = c1
    tau2, s2, d2 = c2
    for i in range(tau1.size):
        a1, e1 = tau1[i], tau1[i] + s1[i]
        at3_1 = np.where((tau3 <= a1) & (a1 < tau3 + s3), d3, 0.0)
        at4_1 = np.where((tau4 <= a1) & (a1 < tau4 + s4), d4, 0.0)
        c1_at3 = np.where((a1 <= tau3) & (tau3 < e1), d1[i], 0.0)
        c1_at4 = np.where((a1 <= tau4) & (tau4 < e1), d1[i], 0.0)
        for j in range(tau2.size):
            a2, e2 = tau2[j], tau2[j] + s2[j]
            d2j = d2[j]
            base1 = d1[i] + (d2j if (a2 <= a1 < e2) else 0.0)
            base2 = d2j + (d1[i] if (a1 <= a2 < e1) else 0.0)
            at3_2 = np.where((tau3 <= a2) & (a2 < tau3 + s3), d3, 0.0)
            at4_2 = np.where((tau4 <= a2) & (a2 < tau4 + s4), d4, 0.0)
            c2_at3 = np.where((a2 <= tau3) & (tau3 < e2), d2j, 0.0)
            c2_at4 = np.where((a2 <= tau4) & (tau4 < e2), d2j, 0.0)
            p1 = base1 + at3_1[:, None] + at4_1[None, :]
            p2 = base2 + at3_2[:, None] + at4_2[None, :]
            p3 = (row3 + (c1_at3 + c2_at3)[:, None]) + c43t
            p4 = (row4 + (c1_at4 + c2_at4)[None, :]) + c34
            peak = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
            m = peak.min()
            if m < best:
                best = float(m)
    return best


def brute_force_peak(
    demands: DemandSet, params: SystemParams, cfg: GridSearchConfig
) -> float:
    """Minimum peak over every grid-feasible placement of the demands.

    Exhaustive over the enriched grid of :class:`GridSearchConfig`; peaks use
    the same half-open activity convention as the profile module, evaluated
    at the placement start instants (where any piecewise-constant profile
    attains its maximum).  The result is a deterministic minimum, independent
    of enumeration order.
    """
    n = len(demands)
    if n > cfg.max_n:
        raise InstanceTooLargeError(
            f"instance has {n} demands, search is capped at {cfg.max_n}"
        )
    plan = region.classify(params, demands)
    extra_s: list[float] = []
    extra_tau: list[float] = []
    if plan.case is not Case.IDEAL:
        extra_s.append(plan.s0)
        extra_tau.extend(j * plan.s0 for j in range(plan.k0))
    total = demands.total
    proportional = (
        params.ell <= demands.a_min / total and demands.a_max / total <= params.r_eff
    )
    prop_tau = 0.0
    cands = []
    for e in demands.energies:
        extra_pairs = []
        if proportional:
            extra_pairs.append((prop_tau, e / total))
            prop_tau += e / total
        cands.append(_candidates(float(e), params, cfg, extra_s, extra_tau, extra_pairs))
    dispatch = {1: _min_peak_1, 2: _min_peak_2, 3: _min_peak_3, 4: _min_peak_4}
    return dispatch[n](*cands)


def grid_error_budget(
    demands: DemandSet, params: SystemParams, cfg: GridSearchConfig
) -> float:
    """Reported budget for how far the grid minimum may exceed the continuum optimum.

    Dominant first-order term: moving one duration by a grid step changes its
    intensity by at most ``a_max * s_step / ell**2``; a 1e-9 slack absorbs
    floating-point noise.
    """
    return demands.a_max * cfg.s_step / params.ell**2 + 1e-9


@dataclass(frozen=True)
class NarrowRect:
    """Thin horizontal slice: a duration-wide rectangle of small height."""

    width: float
    height: float
    tau: float

    def __post_init__(self) -> None:
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ParameterError("rectangle width must be positive")
        if not (self.height > 0 and math.isfinite(self.height)):
            raise ParameterError("rectangle height must be positive")
        if self.tau < 0 or self.tau + self.width > 1.0 + GEOM_TOL:
            raise ParameterError("rectangle must lie inside the unit horizon")

    @property
    def end(self) -> float:
        return self.tau + self.width


@dataclass(frozen=True)
class Filling:
    """Rows of narrow rectangles; every row except possibly the last is full.

    A row is full when the total gap it leaves is smaller than ``ell``, so no
    additional rectangle of any admissible width fits.
    """

    rows: tuple[tuple[NarrowRect, ...], ...]
    delta: float


def build_filling(
    widths,
    params: SystemParams,
    delta: float = 1e-3,
    gaps=None,
) -> Filling:
    """First-fit filling of narrow rectangles with the given widths.

    Rectangles are appended left to right into the current row; a new row
    opens when the next rectangle no longer fits.  ``gaps`` optionally
    requests idle space before each rectangle, clamped so the row still
    receives its full complement (only allowed when the horizon is not
    achievable, where the complement is a fixed count and the clamp is
    well-defined).  Raises when a width sequence would close a row that still
    admits another rectangle, since the result would not be a filling.
    """
    widths = [float(w) for w in widths]
    ell, r_eff = params.ell, params.r_eff
    if delta <= 0 or not math.isfinite(delta):
        raise ParameterError("delta must be positive")
    for w in widths:
        if not (ell - GEOM_TOL <= w <= r_eff + GEOM_TOL):
            raise ParameterError(f"width {w} outside [{ell}, {r_eff}]")
    if gaps is None:
        gaps = [0.0] * len(widths)
    else:
        gaps = [float(g) for g in gaps]
        if len(gaps) != len(widths):
            raise ParameterError("need one gap request per width")
        if any(g < 0 or not math.isfinite(g) for g in gaps):
            raise ParameterError("gap requests must be non-negative and finite")
        if any(g > 0 for g in gaps) and region.good_region(params):
            raise ParameterError(
                "gap insertion is supported only when the horizon is not achievable"
            )

    k0 = region._floor(1.0 / r_eff)
    rows: list[tuple[NarrowRect, ...]] = []
    row: list[NarrowRect] = []
    end = 0.0
    covered = 0.0
    for w, g in zip(widths, gaps):
        if row and end + w > 1.0 + 1e-12:
            gap_sum = 1.0 - covered
            if gap_sum >= ell:
                raise ParameterError(
                    f"row closed with total gap {gap_sum:.12g} >= ell={ell:.12g}; "
                    "the sequence cannot be arranged as a filling"
                )
            rows.append(tuple(row))
            row, end, covered = [], 0.0, 0.0
        if g > 0:
            # Reserve worst-case room for the rest of this row's complement.
            remaining = k0 - len(row) - 1
            g = min(g, max(0.0, 1.0 - end - w - remaining * r_eff))
        row.append(NarrowRect(width=w, height=delta, tau=end + g))
        end += g + w
        covered += w
    if row:
        rows.append(tuple(row))
    return Filling(tuple(rows), delta)


@dataclass(frozen=True)
class FillingViolation:
    row: int
    kind: str
    message: str


@dataclass(frozen=True)
class FillingReport:
    k0: int
    z_star: float
    violations: tuple[FillingViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_filling(filling: Filling, params: SystemParams) -> FillingReport:
    """Structure checks for a filling when the horizon is not achievable.

    For every row except the last: (a) exactly ``k0 = floor(1 / r_eff)``
    rectangles; (b) for ``i = 1..k0`` the window
    ``(1 - (k0 - i + 1) * ell, i * ell)`` is fully covered by the i-th
    rectangle and intersected by no other.  For every row: total coverage
    never exceeds the largest achievable length, rectangles stay inside the
    horizon with admissible widths and do not overlap, and complete rows
    leave less than ``ell`` of total gap.
    """
    if region.good_region(params):
        raise CaseMismatchError(
            "filling structure checks require parameters for which the horizon "
            "is not achievable"
        )
    ell, r_eff = params.ell, params.r_eff
    k0 = region._floor(1.0 / r_eff)
    z_star = region.largest_achievable(1.0, params)
    out: list[FillingViolation] = []
    n_rows = len(filling.rows)
    for idx, row in enumerate(filling.rows):
        last = idx == n_rows - 1
        coverage = sum(rect.width for rect in row)
        prev_end = -math.inf
        for rect in row:
            if not (ell - GEOM_TOL <= rect.width <= r_eff + GEOM_TOL):
                out.append(
                    FillingViolation(idx, "bounds", f"width {rect.width:.12g} inadmissible")
                )
            if rect.tau < prev_end - GEOM_TOL:
                out.append(
                    FillingViolation(
                        idx, "bounds", f"rectangle at {rect.tau:.12g} overlaps its predecessor"
                    )
                )
            prev_end = max(prev_end, rect.end)
        if coverage > z_star + GEOM_TOL:
            out.append(
                FillingViolation(
                    idx,
                    "extent",
                    f"row covers {coverage:.12g} > largest achievable {z_star:.12g}",
                )
            )
        if last:
            continue
        if len(row) != k0:
            out.append(
                FillingViolation(
                    idx, "count", f"complete row holds {len(row)} rectangles, expected {k0}"
                )
            )
        gap_sum = 1.0 - coverage
        if gap_sum >= ell - GEOM_TOL:
            out.append(
                FillingViolation(
                    idx, "gap_sum", f"total gap {gap_sum:.12g} admits another rectangle"
                )
            )
        for i in range(1, min(len(row), k0) + 1):
            lo = 1.0 - (k0 - i + 1) * ell
            hi = i * ell
            rect = row[i - 1]
            if rect.tau > lo + GEOM_TOL or rect.end < hi - GEOM_TOL:
                out.append(
                    FillingViolation(
                        idx,
                        "interval",
                        f"window ({lo:.12g}, {hi:.12g}) not covered by rectangle {i}",
                    )
                )
            for j, other in enumerate(row, start=1):
                if j == i:
                    continue
                if other.end > lo + GEOM_TOL and other.tau < hi - GEOM_TOL:
                    out.append(
                        FillingViolation(
                            idx,
                            "interval",
                            f"window ({lo:.12g}, {hi:.12g}) also touched by rectangle {j}",
                        )
                    )
    return FillingReport(k0, z_star, tuple(out))


def fractional_lower_bound(demands: DemandSet, params: SystemParams) -> float:
    """Certified lower bound on the optimal peak (the envelope's floor)."""
    return profile.theoretical_bounds(demands, params).a_bar
