"""Command-line interface.

Subcommands: ``classify``, ``schedule``, ``bounds``, ``experiment`` and the
``oracle`` group (``search``, ``brute``, ``filling``).  Results go to stdout
as JSON; ``schedule`` and ``experiment`` additionally write files.  Exit
codes: 0 on success, 2 on validation failure, 1 on internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle, plotting, profile, region, scheduler, serialize
from .errors import BoundViolationError, PowerStripError
from .harness import run_experiment
from .region import SystemParams

_SCHEDULERS = {
    "psp": scheduler.schedule_psp,
    "greedy": scheduler.schedule_greedy,
}


def _params(args) -> SystemParams:
    return SystemParams(args.ell, args.r)


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2))


def _cmd_classify(args) -> None:
    params = _params(args)
    demands = serialize.read_demands_file(args.demands) if args.demands else None
    plan = region.classify(params, demands)
    _print_json(
        {
            "case": plan.case.value,
            "k0": plan.k0,
            "s0": serialize.round12(plan.s0),
            "z_star": serialize.round12(plan.z_star),
            "good_region": region.good_region(params),
        }
    )


def _cmd_schedule(args) -> None:
    params = _params(args)
    demands = serialize.read_demands_file(args.demands)
    policy = _SCHEDULERS[args.algo](demands, params)
    cert = profile.certify(policy, demands, params)
    policy_json = serialize.policy_to_json(policy)
    if args.out:
        Path(args.out).write_text(policy_json, encoding="utf-8")
    if args.profile:
        f = profile.power_profile(policy)
        Path(args.profile).write_text(serialize.step_function_to_csv(f), encoding="utf-8")
    doc = {
        "algorithm": policy.algorithm.value,
        "case": policy.plan.case.value,
        "certificate": serialize.certificate_to_dict(cert),
    }
    if not args.out:
        doc["policy"] = json.loads(policy_json)
    _print_json(doc)


def _cmd_bounds(args) -> None:
    params = _params(args)
    demands = serialize.read_demands_file(args.demands)
    cert = profile.theoretical_bounds(demands, params)
    _print_json(
        {
            "a_bar": serialize.round12(cert.a_bar),
            "upper": serialize.round12(cert.upper),
            "total_energy": serialize.round12(demands.total),
            "a_max": serialize.round12(demands.a_max),
            "good_region": region.good_region(params),
        }
    )


def _cmd_experiment(args) -> None:
    config = serialize.read_experiment_config(args.config)
    result = run_experiment(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result_path = out_dir / "result.json"
    curves_path = out_dir / "curves.csv"
    figure_path = out_dir / "peaks.png"
    result_path.write_text(serialize.experiment_result_to_json(result), encoding="utf-8")
    curves_path.write_text(serialize.experiment_curves_csv(result), encoding="utf-8")
    plotting.render_experiment_figure(result, figure_path)
    _print_json(
        {
            "result": str(result_path),
            "curves": str(curves_path),
            "figure": str(figure_path),
        }
    )


def _cmd_oracle_search(args) -> None:
    params = _params(args)
    formula = region.is_achievable(args.w, params)
    search = oracle.achievable_by_search(args.w, params)
    _print_json(
        {
            "w": serialize.round12(args.w),
            "achievable_formula": formula,
            "achievable_search": search,
            "agree": formula == search,
            "largest_achievable": serialize.round12(region.largest_achievable(args.w, params)),
        }
    )


def _cmd_oracle_brute(args) -> None:
    params = _params(args)
    demands = serialize.read_demands_file(args.demands)
    cfg = oracle.GridSearchConfig(tau_step=args.tau_step, s_step=args.s_step, max_n=args.max_n)
    peak = oracle.brute_force_peak(demands, params, cfg)
    a_bar = oracle.fractional_lower_bound(demands, params)
    g = oracle.grid_error_budget(demands, params, cfg)
    policy = scheduler.schedule_psp(demands, params)
    psp_peak = profile.peak_power(profile.power_profile(policy))
    _print_json(
        {
            "brute_force_peak": serialize.round12(peak),
            "a_bar": serialize.round12(a_bar),
            "grid_error_budget": serialize.round12(g),
            "psp_peak": serialize.round12(psp_peak),
            "sandwich_ok": bool(a_bar - g <= peak <= psp_peak + 1e-9),
        }
    )


def _cmd_oracle_filling(args) -> None:
    params = _params(args)
    if args.widths:
        doc = json.loads(Path(args.widths).read_text(encoding="utf-8"))
        widths = [float(w) for w in doc]
        gaps = None
    else:
        rng = np.random.default_rng(args.seed)
        widths = rng.uniform(params.ell, params.r_eff, args.n).tolist()
        gaps = rng.uniform(0.0, 0.25, args.n).tolist()
    filling = oracle.build_filling(widths, params, delta=args.delta, gaps=gaps)
    report = oracle.verify_filling(filling, params)
    _print_json(
        {
            "rows": len(filling.rows),
            "rect_counts": [len(row) for row in filling.rows],
            "k0": report.k0,
            "z_star": serialize.round12(report.z_star),
            "ok": report.ok,
            "violations": [
                {"row": v.row, "kind": v.kind, "message": v.message}
                for v in report.violations
            ],
        }
    )


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ell", type=float, required=True, help="lower duration bound")
    parser.add_argument("--r", type=float, required=True, help="upper duration bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="powerstrip",
        description="Peak-power scheduling of malleable energy demands",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify an instance and report its slot layout")
    _add_params(p)
    p.add_argument("--demands", help="optional demand file (CSV or JSON)")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("schedule", help="schedule demands and certify the peak")
    _add_params(p)
    p.add_argument("--demands", required=True, help="demand file (CSV or JSON)")
    p.add_argument("--algo", choices=sorted(_SCHEDULERS), default="psp")
    p.add_argument("--out", help="write the policy JSON here instead of stdout")
    p.add_argument("--profile", help="write the power profile CSV here")
    p.set_defaults(func=_cmd_schedule)

    p = sub.add_parser("bounds", help="report the certified peak envelope")
    _add_params(p)
    p.add_argument("--demands", required=True)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("experiment", help="run a protocol sweep and write reports")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_experiment)

    o = sub.add_parser("oracle", help="verification oracles")
    osub = o.add_subparsers(dest="oracle_command", required=True)

    p = osub.add_parser("search", help="achievability: formula vs enumeration")
    _add_params(p)
    p.add_argument("--w", type=float, required=True, help="width to test")
    p.set_defaults(func=_cmd_oracle_search)

    p = osub.add_parser("brute", help="exhaustive grid search for the optimal peak")
    _add_params(p)
    p.add_argument("--demands", required=True)
    p.add_argument("--tau-step", type=float, default=0.05)
    p.add_argument("--s-step", type=float, default=0.05)
    p.add_argument("--max-n", type=int, default=3)
    p.set_defaults(func=_cmd_oracle_brute)

    p = osub.add_parser("filling", help="build a filling and verify its structure")
    _add_params(p)
    p.add_argument("--widths", help="JSON array of widths")
    p.add_argument("--n", type=int, default=20, help="number of random widths")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=1e-3)
    p.set_defaults(func=_cmd_oracle_filling)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except BoundViolationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    except PowerStripError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: malformed JSON input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
