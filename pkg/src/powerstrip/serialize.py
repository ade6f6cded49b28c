"""Serialisation: CSV and JSON emitters with matching readers.

Floats are printed with 12 significant digits and field order is stable, so
emitting the same object twice yields byte-identical documents and a parsed
document re-emits exactly.  Demand files accept either CSV with an
``id,energy`` header or a JSON array (of objects with ``id``/``energy`` keys,
or of bare energies).
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ParameterError
from .harness import ExperimentCell, ExperimentConfig, ExperimentResult
from .profile import BoundCertificate, StepFunction
from .scheduler import Assignment, DemandSet, Policy


def fmt(x: float) -> str:
    """Canonical 12-significant-digit rendering of a float."""
    return format(float(x), ".12g")


def round12(x: float) -> float:
    """The float a document will carry for ``x``."""
    return float(fmt(x))


# ---------------------------------------------------------------- demands


def demands_to_csv(demands: DemandSet) -> str:
    lines = ["id,energy"]
    lines += [f"{int(i)},{fmt(e)}" for i, e in zip(demands.ids, demands.energies)]
    return "\n".join(lines) + "\n"


def demands_from_csv(text: str) -> DemandSet:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["id", "energy"]:
        raise ParameterError("demand CSV must carry the header 'id,energy'")
    ids, energies = [], []
    try:
        for row in reader:
            ids.append(int(row["id"]))
            energies.append(float(row["energy"]))
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"malformed demand CSV: {exc}") from exc
    return DemandSet(ids, energies)


def demands_to_json(demands: DemandSet) -> str:
    doc = [
        {"id": int(i), "energy": round12(e)}
        for i, e in zip(demands.ids, demands.energies)
    ]
    return json.dumps(doc, indent=2) + "\n"


def demands_from_json(text: str) -> DemandSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed demand JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ParameterError("demand JSON must be an array")
    ids, energies = [], []
    for k, item in enumerate(doc):
        if isinstance(item, dict):
            try:
                ids.append(int(item["id"]))
                energies.append(float(item["energy"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParameterError(f"malformed demand entry {item!r}") from exc
        elif isinstance(item, (int, float)):
            ids.append(k)
            energies.append(float(item))
        else:
            raise ParameterError(f"malformed demand entry {item!r}")
    return DemandSet(ids, energies)


def read_demands_file(path: str | Path) -> DemandSet:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return demands_from_json(text)
    return demands_from_csv(text)


# ----------------------------------------------------------------- policy


def policy_to_json(policy: Policy) -> str:
    doc = [
        {
            "id": int(i),
            "tau": round12(t),
            "s": round12(w),
            "d": round12(h),
            "slot": None if j < 0 else int(j),
        }
        for i, t, w, h, j in zip(
            policy.demand_ids, policy.tau, policy.s, policy.d, policy.slot
        )
    ]
    return json.dumps(doc, indent=2) + "\n"


def assignments_from_json(text: str) -> tuple[Assignment, ...]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed policy JSON: {exc}") from exc
    out = []
    for item in doc:
        slot = item.get("slot")
        out.append(
            Assignment(
                int(item["id"]),
                float(item["tau"]),
                float(item["s"]),
                float(item["d"]),
                None if slot is None else int(slot),
            )
        )
    return tuple(out)


def policy_to_csv(policy: Policy) -> str:
    lines = ["id,tau,s,d,slot"]
    for i, t, w, h, j in zip(policy.demand_ids, policy.tau, policy.s, policy.d, policy.slot):
        slot = "" if j < 0 else str(int(j))
        lines.append(f"{int(i)},{fmt(t)},{fmt(w)},{fmt(h)},{slot}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------- step function


def step_function_to_csv(f: StepFunction) -> str:
    """Two-column profile: each breakpoint with the level starting there.

    The final row repeats the last level at t = 1 so step plots close the
    curve; the reader drops it.
    """
    lines = ["t,power"]
    for t, v in zip(f.times[:-1], f.values):
        lines.append(f"{fmt(t)},{fmt(v)}")
    lines.append(f"{fmt(f.times[-1])},{fmt(f.values[-1])}")
    return "\n".join(lines) + "\n"


def step_function_from_csv(text: str) -> StepFunction:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "power"]:
        raise ParameterError("profile CSV must carry the header 't,power'")
    times, values = [], []
    for row in reader:
        times.append(float(row["t"]))
        values.append(float(row["power"]))
    return StepFunction(np.asarray(times), np.asarray(values[:-1]))


def step_function_to_json(f: StepFunction) -> str:
    doc = {
        "times": [round12(t) for t in f.times],
        "values": [round12(v) for v in f.values],
    }
    return json.dumps(doc, indent=2) + "\n"


# ------------------------------------------------------------ certificate


def certificate_to_dict(cert: BoundCertificate) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "a_bar": round12(cert.a_bar),
        "upper": round12(cert.upper),
    }
    doc["achieved_peak"] = None if cert.achieved_peak is None else round12(cert.achieved_peak)
    doc["within"] = cert.within
    return doc


def certificate_to_json(cert: BoundCertificate) -> str:
    return json.dumps(certificate_to_dict(cert), indent=2) + "\n"


# ------------------------------------------------------------- experiment


def _config_to_dict(config: ExperimentConfig) -> dict[str, Any]:
    return {
        "ell": round12(config.ell),
        "r": round12(config.r),
        "n_values": list(config.n_values),
        "reps": config.reps,
        "seed": config.seed,
        "algorithms": list(config.algorithms),
    }


def config_from_dict(doc: dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            ell=float(doc["ell"]),
            r=float(doc["r"]),
            n_values=tuple(int(n) for n in doc["n_values"]),
            reps=int(doc.get("reps", 30)),
            seed=int(doc.get("seed", 0)),
            algorithms=tuple(doc.get("algorithms", ("psp", "greedy"))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed experiment config: {exc}") from exc


def read_experiment_config(path: str | Path) -> ExperimentConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed experiment config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParameterError("experiment config must be a JSON object")
    return config_from_dict(doc)


def experiment_result_to_json(result: ExperimentResult) -> str:
    doc = {
        "config": _config_to_dict(result.config),
        "cells": [
            {
                "n": c.n,
                "algorithm": c.algorithm,
                "peaks": [round12(p) for p in c.peaks],
                "a_bars": [round12(a) for a in c.a_bars],
                "uppers": [round12(u) for u in c.uppers],
                "mean_peak": round12(c.mean_peak),
                "std_peak": round12(c.std_peak),
                "ci_half_width": round12(c.ci_half_width),
            }
            for c in result.cells
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def experiment_result_from_json(text: str) -> ExperimentResult:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed result JSON: {exc}") from exc
    config = config_from_dict(doc["config"])
    cells = tuple(
        ExperimentCell(
            n=int(c["n"]),
            algorithm=str(c["algorithm"]),
            peaks=tuple(float(p) for p in c["peaks"]),
            a_bars=tuple(float(a) for a in c["a_bars"]),
            uppers=tuple(float(u) for u in c["uppers"]),
            mean_peak=float(c["mean_peak"]),
            std_peak=float(c["std_peak"]),
            ci_half_width=float(c["ci_half_width"]),
        )
        for c in doc["cells"]
    )
    return ExperimentResult(config, cells)


def experiment_curves_csv(result: ExperimentResult) -> str:
    """Per-size summary curves: means, confidence half-widths, mean bound."""
    lines = ["n,mean_peak_psp,ci_psp,mean_peak_greedy,ci_greedy,mean_bound"]
    by_n: dict[int, dict[str, ExperimentCell]] = {}
    for c in result.cells:
        by_n.setdefault(c.n, {})[c.algorithm] = c
    for n in result.config.n_values:
        cells = by_n[n]
        any_cell = next(iter(cells.values()))
        mean_bound = fmt(float(np.mean(any_cell.uppers)))
        cols = [str(n)]
        for algo in ("psp", "greedy"):
            if algo in cells:
                cols += [fmt(cells[algo].mean_peak), fmt(cells[algo].ci_half_width)]
            else:
                cols += ["", ""]
        cols.append(mean_bound)
        lines.append(",".join(cols))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------ emit


def emit(obj: Any, format: str = "json") -> str:
    """Serialise a supported object to ``csv`` or ``json`` text."""
    if format not in ("csv", "json"):
        raise ParameterError(f"format must be 'csv' or 'json', got {format!r}")
    if isinstance(obj, DemandSet):
        return demands_to_csv(obj) if format == "csv" else demands_to_json(obj)
    if isinstance(obj, Policy):
        return policy_to_csv(obj) if format == "csv" else policy_to_json(obj)
    if isinstance(obj, StepFunction):
        return step_function_to_csv(obj) if format == "csv" else step_function_to_json(obj)
    if isinstance(obj, ExperimentResult):
        return experiment_curves_csv(obj) if format == "csv" else experiment_result_to_json(obj)
    if isinstance(obj, BoundCertificate):
        if format == "csv":
            raise ParameterError("certificates serialise to JSON only")
        return certificate_to_json(obj)
    raise ParameterError(f"cannot emit objects of type {type(obj).__name__}")
