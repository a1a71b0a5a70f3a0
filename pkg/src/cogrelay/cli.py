"""Command-line front end: sweeps, placement optimization, profile
comparison, and Monte-Carlo verification, all emitting CSV.

Exit codes: 0 success, 1 configuration/flag error, 2 numeric or
convergence failure.  Metadata lines are '#'-prefixed; re-running a
command with identical inputs reproduces the output byte for byte
(the timestamp line is suppressible with --no-timestamp).
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .ber import e2e_ber, e2e_ber_asymptotic, hop_ber, qam_constants
from .capacity import ergodic_capacity_ind, per_hop_capacity
from .errors import ConfigError, NumericError
from .montecarlo import mc_ber, mc_capacity, mc_outage
from .outage import outage_asymptotic, outage_exact
from .placement import (
    direct_search,
    placement_objective,
    solve_equal_ratio,
    with_performance,
)
from .scenario import (
    Scenario,
    db_to_linear,
    derive_hop_statistics,
    linear_to_db,
    scenario_from_config,
)

SWEEP_VARIABLES = ("ip_over_n0_db", "hop_count", "eta", "pu_x", "pu_y")
OUTPUT_ORDER = (
    "op_exact",
    "op_asymptotic",
    "ber_exact",
    "ber_asymptotic",
    "capacity",
    "per_hop_capacity_min",
    "mc_op",
    "mc_ber",
    "mc_capacity",
)
MC_OUTPUTS = ("mc_op", "mc_ber", "mc_capacity")
DEFAULT_OUTPUTS = ("op_exact", "op_asymptotic", "ber_exact", "capacity")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad flags are config errors: exit 1, not 2
        raise _UsageError(message)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline="\n"), True


def _write_meta(out: TextIO, command: str, args, extra: dict | None = None):
    out.write(f"# cogrelay {__version__} {command}\n")
    if not args.no_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        out.write(f"# generated: {stamp}\n")
    for key, value in (extra or {}).items():
        out.write(f"# {key}: {value}\n")


def load_scenario(path: str) -> tuple[Scenario, dict]:
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config root must be a JSON object")
    return scenario_from_config(config), config


def parse_sweep(text: str) -> tuple[str, list]:
    """VAR=START:STOP:STEP (inclusive) or VAR=v1,v2,... for hop_count."""
    if "=" not in text:
        raise ConfigError(f"sweep must look like VAR=START:STOP:STEP, got {text!r}")
    name, _, rest = text.partition("=")
    if name not in SWEEP_VARIABLES:
        raise ConfigError(
            f"unknown sweep variable {name!r}; choose from {SWEEP_VARIABLES}"
        )
    if "," in rest:
        if name != "hop_count":
            raise ConfigError("list-valued sweeps are only supported for hop_count")
        return name, [int(v) for v in rest.split(",")]
    parts = rest.split(":")
    if len(parts) != 3:
        raise ConfigError(f"sweep range must be START:STOP:STEP, got {rest!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad sweep range {rest!r}") from exc
    if step <= 0:
        raise ConfigError("sweep step must be positive")
    if start > stop:
        raise ConfigError("sweep start must not exceed stop")
    count = int(round((stop - start) / step))
    values = [start + i * step for i in range(count + 1)]
    if values[-1] > stop + 1e-9 * step:
        values.pop()
    if name == "hop_count":
        values = [int(round(v)) for v in values]
    return name, values


def scenario_at(base: Scenario, variable: str, value) -> Scenario:
    if variable == "ip_over_n0_db":
        return replace(base, ip_over_n0=db_to_linear(value))
    if variable == "hop_count":
        # hop-count sweeps rebuild an equidistant layout
        return replace(
            base,
            hop_count=int(value),
            relay_x_positions=None,
            lambda_overrides=None,
        )
    if variable == "eta":
        return replace(base, path_loss_exponent=float(value))
    if variable == "pu_x":
        return replace(base, pu_coord=(float(value), base.pu_coord[1]))
    if variable == "pu_y":
        return replace(base, pu_coord=(base.pu_coord[0], float(value)))
    raise ConfigError(f"unknown sweep variable {variable!r}")


def evaluate_outputs(
    scenario: Scenario,
    outputs: Sequence[str],
    trials: int,
    seed: int,
    chunks: int,
) -> dict:
    stats = derive_hop_statistics(scenario)
    alphas = [h.alpha for h in stats]
    pairs = [(h.lambda_d, h.lambda_i) for h in stats]
    row: dict = {}
    constants = None
    for name in outputs:
        if name in ("ber_exact", "ber_asymptotic", "mc_ber") and constants is None:
            constants = qam_constants(scenario.qam_order)
        if name == "op_exact":
            row[name] = outage_exact(alphas, scenario.gamma_th)
        elif name == "op_asymptotic":
            row[name] = outage_asymptotic(
                pairs, scenario.ip_over_n0, scenario.gamma_th
            )
        elif name == "ber_exact":
            row[name] = e2e_ber([hop_ber(a, constants) for a in alphas])
        elif name == "ber_asymptotic":
            row[name] = e2e_ber_asymptotic(alphas, constants)
        elif name == "capacity":
            row[name] = ergodic_capacity_ind(alphas)
        elif name == "per_hop_capacity_min":
            row[name] = min(
                per_hop_capacity(a, scenario.hop_count) for a in alphas
            )
        elif name == "mc_op":
            est = mc_outage(scenario, trials, seed, chunks)
            row[name], row[f"{name}_std_error"] = est.value, est.std_error
        elif name == "mc_ber":
            est = mc_ber(scenario, trials, seed, chunks)
            row[name], row[f"{name}_std_error"] = est.value, est.std_error
        elif name == "mc_capacity":
            est = mc_capacity(scenario, trials, seed, chunks)
            row[name], row[f"{name}_std_error"] = est.value, est.std_error
        else:
            raise ConfigError(f"unknown output {name!r}")
    return row


def _parse_outputs(text: Optional[str]) -> tuple[str, ...]:
    if text is None:
        return DEFAULT_OUTPUTS
    requested = [t.strip() for t in text.split(",") if t.strip()]
    bad = [t for t in requested if t not in OUTPUT_ORDER]
    if bad:
        raise ConfigError(f"unknown outputs {bad}; choose from {OUTPUT_ORDER}")
    if not requested:
        raise ConfigError("outputs list is empty")
    # columns keep the canonical order no matter how flags were written
    return tuple(name for name in OUTPUT_ORDER if name in requested)


def cmd_analyze(args) -> int:
    scenario, config = load_scenario(args.config)
    outputs = _parse_outputs(args.outputs)
    trials = args.trials if args.trials is not None else int(config.get("trials", 100_000))
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if args.sweep:
        variable, values = parse_sweep(args.sweep)
    else:
        variable, values = "ip_over_n0_db", [linear_to_db(scenario.ip_over_n0)]
    mc_requested = [n for n in outputs if n in MC_OUTPUTS]
    header = [variable] + list(outputs)
    header += [f"{n}_std_error" for n in mc_requested]
    if mc_requested:
        header.append("trials")

    out, close = _open_out(args.out)
    try:
        meta = {"config": args.config, "sweep": f"{variable}"}
        if mc_requested:
            meta["seed"] = seed
            meta["sampling"] = "per-block substreams, 65536 trials per block"
        _write_meta(out, "analyze", args, meta)
        out.write(",".join(header) + "\n")
        for value in values:
            point = scenario_at(scenario, variable, value)
            row = evaluate_outputs(point, outputs, trials, seed, args.chunks)
            cells = [_fmt(value)]
            cells += [_fmt(row[name]) for name in outputs]
            cells += [_fmt(row[f"{n}_std_error"]) for n in mc_requested]
            if mc_requested:
                cells.append(str(trials))
            out.write(",".join(cells) + "\n")
    finally:
        if close:
            out.close()
    return 0


def cmd_optimize(args) -> int:
    scenario, _ = load_scenario(args.config)
    k = scenario.hop_count
    eta = scenario.path_loss_exponent
    constants = qam_constants(scenario.qam_order)
    placement = solve_equal_ratio(k, scenario.pu_coord)
    placement = with_performance(
        placement, scenario.gamma_th, scenario.ip_over_n0, eta, constants
    )
    balanced_obj = placement_objective(
        placement.d_data, scenario.pu_coord, eta
    )
    meta = {
        "config": args.config,
        "hop_count": k,
        "pu_coord": f"({_fmt(scenario.pu_coord[0])}, {_fmt(scenario.pu_coord[1])})",
        "ratio": _fmt(placement.ratio),
        "residual_norm": _fmt(placement.residual_norm),
        "iterations": placement.iterations,
        "op_min": _fmt(placement.op_min),
        "ber_min": _fmt(placement.ber_min),
        "objective_equal_ratio": _fmt(balanced_obj),
    }
    if k <= 4:
        d_search, obj_search = direct_search(
            k, scenario.pu_coord, eta, args.grid_resolution
        )
        meta["objective_direct_search"] = _fmt(obj_search)
        meta["objective_gap"] = _fmt(balanced_obj - obj_search)
        meta["direct_search_d_data"] = " ".join(_fmt(v) for v in d_search)
    else:
        meta["objective_direct_search"] = "skipped (grid search supports <= 4 hops)"

    out, close = _open_out(args.out)
    try:
        _write_meta(out, "optimize", args, meta)
        out.write("hop,d_data,d_interference,ratio\n")
        for i, (dd, di) in enumerate(
            zip(placement.d_data, placement.d_interference), start=1
        ):
            out.write(f"{i},{_fmt(dd)},{_fmt(di)},{_fmt(dd / di)}\n")
    finally:
        if close:
            out.close()
    print(
        f"optimize: K={k} ratio={placement.ratio:.6f} "
        f"residual={placement.residual_norm:.2e} "
        f"op_min={placement.op_min:.6g} ber_min={placement.ber_min:.6g}",
        file=sys.stderr,
    )
    return 0


def _profile_distances(name: str, scenario: Scenario, config: dict, seed: int):
    k = scenario.hop_count
    if name == "uniform":
        return [1.0 / k] * k
    if name == "optimized":
        return list(solve_equal_ratio(k, scenario.pu_coord).d_data)
    if name == "random":
        rng = np.random.default_rng(seed)
        return list(rng.dirichlet(np.ones(k)))
    for entry in config.get("profiles", []):
        if entry.get("name") == name:
            distances = [float(v) for v in entry.get("distances", [])]
            if len(distances) != k:
                raise ConfigError(
                    f"profile {name!r} has {len(distances)} distances, expected {k}"
                )
            if abs(sum(distances) - 1.0) > 1e-9:
                raise ConfigError(
                    f"profile {name!r} distances sum to {sum(distances)!r}, expected 1"
                )
            return distances
    raise ConfigError(f"unknown profile {name!r}")


def cmd_profiles(args) -> int:
    scenario, config = load_scenario(args.config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    if args.profiles:
        names = [n.strip() for n in args.profiles.split(",") if n.strip()]
    elif config.get("profiles"):
        names = [entry["name"] for entry in config["profiles"]]
    else:
        names = ["uniform", "optimized"]
    if not names:
        raise ConfigError("no profiles requested")
    if args.sweep:
        variable, values = parse_sweep(args.sweep)
    else:
        variable, values = "ip_over_n0_db", [linear_to_db(scenario.ip_over_n0)]

    out, close = _open_out(args.out)
    try:
        _write_meta(
            out, "profiles", args,
            {"config": args.config, "profiles": " ".join(names), "seed": seed},
        )
        out.write(f"{variable},profile,op_exact,capacity\n")
        for value in values:
            point = scenario_at(scenario, variable, value)
            for name in names:
                distances = _profile_distances(name, point, config, seed)
                shaped = point.with_hop_distances(distances)
                stats = derive_hop_statistics(shaped)
                alphas = [h.alpha for h in stats]
                op = outage_exact(alphas, shaped.gamma_th)
                cap = ergodic_capacity_ind(alphas)
                out.write(
                    f"{_fmt(value)},{name},{_fmt(op)},{_fmt(cap)}\n"
                )
    finally:
        if close:
            out.close()
    return 0


def cmd_mc(args) -> int:
    scenario, config = load_scenario(args.config)
    trials = args.trials if args.trials is not None else int(config.get("trials", 100_000))
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if args.chunks < 1:
        raise ConfigError("chunks must be >= 1")
    estimates = [
        ("mc_op", mc_outage(scenario, trials, seed, args.chunks)),
        ("mc_ber", mc_ber(scenario, trials, seed, args.chunks)),
        ("mc_capacity", mc_capacity(scenario, trials, seed, args.chunks)),
    ]
    out, close = _open_out(args.out)
    try:
        _write_meta(
            out, "mc", args,
            {
                "config": args.config,
                "seed": seed,
                "trials": trials,
                "sampling": "per-block substreams, 65536 trials per block",
            },
        )
        out.write("metric,value,std_error,trials,seed\n")
        for name, est in estimates:
            out.write(
                f"{name},{_fmt(est.value)},{_fmt(est.std_error)},"
                f"{est.trials},{est.seed}\n"
            )
    finally:
        if close:
            out.close()
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="cogrelay", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--out", default=None, help="output CSV path (default stdout)")
        p.add_argument("--no-timestamp", action="store_true",
                       help="omit the generated-at metadata line")

    p = sub.add_parser("analyze", help="closed-form and simulated sweeps")
    common(p)
    p.add_argument("--sweep", default=None, metavar="VAR=START:STOP:STEP")
    p.add_argument("--outputs", default=None,
                   help=f"comma list from {', '.join(OUTPUT_ORDER)}")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--chunks", type=int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("optimize", help="balanced-ratio relay placement")
    common(p)
    p.add_argument("--grid-resolution", type=int, default=200)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("profiles", help="compare relay-position profiles")
    common(p)
    p.add_argument("--sweep", default=None, metavar="VAR=START:STOP:STEP")
    p.add_argument("--profiles", default=None,
                   help="comma list: uniform, optimized, random, or config names")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_profiles)

    p = sub.add_parser("mc", help="Monte-Carlo estimates with std errors")
    common(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--chunks", type=int, default=1)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
