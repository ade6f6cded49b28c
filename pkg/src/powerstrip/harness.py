"""Experiment orchestration: demand generation, repeated runs, statistics.

Demands are drawn i.i.d. uniform on ``(0, ell]`` (zero excluded so every
demand has a defined intensity).  Randomness comes from numpy's seeded
PCG64 generator, so results reproduce across platforms; each repetition gets
its own substream seeded ``seed + n_index * reps + rep`` and is therefore
independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from . import profile, scheduler
from .errors import BoundViolationError, EmptyInputError, ParameterError
from .region import SystemParams
from .scheduler import DemandSet

_SCHEDULERS = {
    "psp": scheduler.schedule_psp,
    "greedy": scheduler.schedule_greedy,
}

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol parameters for one experiment sweep."""

    ell: float
    r: float
    n_values: tuple[int, ...]
    reps: int = 30
    seed: int = 0
    algorithms: tuple[str, ...] = ("psp", "greedy")

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ParameterError("n_values must be a non-empty list of positive sizes")
        if self.reps < 2:
            raise ParameterError("need at least 2 repetitions for a confidence interval")
        if not self.algorithms:
            raise ParameterError("select at least one algorithm")
        unknown = set(self.algorithms) - set(_SCHEDULERS)
        if unknown:
            raise ParameterError(f"unknown algorithms: {sorted(unknown)}")

    @property
    def params(self) -> SystemParams:
        return SystemParams(self.ell, self.r)


@dataclass(frozen=True)
class ExperimentCell:
    """Aggregate for one (instance size, algorithm) pair.

    ``peaks`` holds one measured peak per repetition; ``a_bars`` and
    ``uppers`` the per-repetition certified envelope (shared by all
    algorithms run on the same repetition's demand set).
    """

    n: int
    algorithm: str
    peaks: tuple[float, ...]
    a_bars: tuple[float, ...]
    uppers: tuple[float, ...]
    mean_peak: float
    std_peak: float
    ci_half_width: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    cells: tuple[ExperimentCell, ...]

    def cell(self, n: int, algorithm: str) -> ExperimentCell:
        for c in self.cells:
            if c.n == n and c.algorithm == algorithm:
                return c
        raise KeyError(f"no cell for n={n}, algorithm={algorithm}")


def generate_demands(
    n: int, params: SystemParams, rng: np.random.Generator
) -> DemandSet:
    """Draw ``n`` energies i.i.d. uniform on ``(0, ell]``."""
    if n < 1:
        raise EmptyInputError("cannot generate an empty demand set")
    energies = params.ell * (1.0 - rng.random(n))
    return DemandSet(np.arange(n, dtype=np.int64), energies)


def rep_seed(config: ExperimentConfig, n_index: int, rep: int) -> int:
    """Substream seed for one repetition; exposed so runs can be re-derived."""
    return config.seed + n_index * config.reps + rep


def ci_half_width(values: Sequence[float], confidence: float = 0.95) -> float:
    """Student-t confidence half-width for the sample mean."""
    values = np.asarray(values, dtype=np.float64)
    m = values.size
    if m < 2:
        raise ParameterError("confidence interval needs at least 2 values")
    q = stats.t.ppf(0.5 + confidence / 2.0, m - 1)
    return float(q * np.std(values, ddof=1) / np.sqrt(m))


def _check_bound(peak: float, upper: float, context: str) -> None:
    if peak > upper + BOUND_TOL:
        raise BoundViolationError(
            f"{context}: peak {peak:.12g} exceeds guaranteed bound {upper:.12g}; "
            "this indicates an implementation bug, not statistical noise"
        )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run the full protocol: fresh demands per repetition, all algorithms.

    Every recorded peak is checked against its certified upper bound; a
    violation aborts immediately.  With a fixed config (including the seed)
    the result serialises byte-identically across runs.
    """
    params = config.params
    cells: list[ExperimentCell] = []
    for n_index, n in enumerate(config.n_values):
        peaks: dict[str, list[float]] = {algo: [] for algo in config.algorithms}
        a_bars: list[float] = []
        uppers: list[float] = []
        for rep in range(config.reps):
            rng = np.random.default_rng(rep_seed(config, n_index, rep))
            demands = generate_demands(n, params, rng)
            cert = profile.theoretical_bounds(demands, params)
            a_bars.append(cert.a_bar)
            uppers.append(cert.upper)
            for algo in config.algorithms:
                policy = _SCHEDULERS[algo](demands, params)
                peak = profile.peak_power(profile.power_profile(policy))
                _check_bound(peak, cert.upper, f"n={n} rep={rep} algorithm={algo}")
                peaks[algo].append(peak)
        for algo in config.algorithms:
            vals = np.asarray(peaks[algo])
            cells.append(
                ExperimentCell(
                    n=n,
                    algorithm=algo,
                    peaks=tuple(peaks[algo]),
                    a_bars=tuple(a_bars),
                    uppers=tuple(uppers),
                    mean_peak=float(np.mean(vals)),
                    std_peak=float(np.std(vals, ddof=1)),
                    ci_half_width=ci_half_width(vals),
                )
            )
    return ExperimentResult(config, tuple(cells))
