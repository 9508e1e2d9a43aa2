"""Command-line front end.

Subcommands: ``pattern`` (one beampattern CSV), ``single`` (single-target
experiment), ``clutter`` (multi-target clutter-reduction experiment),
``sweep`` (Monte-Carlo sweep CSV), ``oracle-check`` (validates the
candidate search against the exhaustive oracle).

Angles are degrees everywhere on this surface.  Scenario values may come
from a ``key=value`` config file (``--config``); inline flags win on
conflict, and ``DPS_SEED`` overrides the built-in default seed.  Exit
codes: 0 success, 1 I/O failure, 2 usage, 3 validation failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .array_model import (
    ArrayConfig,
    BeampatternTrace,
    angle_grid_deg,
    beampattern_trace,
)
from .beamformers import TargetScenario, mvdr_beamformer, steering_beamformer
from .dps_quantize import (
    PhaseGrid,
    approximate,
    exhaustive_oracle,
    normalize_to_max,
    quantize_pesa,
)
from .experiments import (
    ScenarioSpec,
    draw_target_angles,
    run_monte_carlo,
    run_mvdr_clutter,
    run_single_target,
    trial_rng,
)

MAX_ORACLE_CHECK_BITS = 4

DEFAULTS = {
    "antennas": 16,
    "spacing": 0.5,
    "targets": None,
    "desired": None,
    "gamma": None,
    "bits": "4",
    "candidates": 3,
    "norm": 2.0,
    "norms": "1,1.5,2",
    "grid_step": 0.1,
    "floor_db": -80.0,
    "trials": None,
    "seed": None,
    "workers": 1,
    "out": ".",
    "beamformer": "steering",
}


class UsageError(Exception):
    """Bad flag combination or value; maps to exit code 2."""


def _parse_float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in str(text).split(","))
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _parse_bits_sweep(text: str) -> tuple:
    text = str(text)
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(
            f"expected bits as LO:HI or a comma-separated list, got {text!r}"
        ) from exc


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, key, cast=None):
    """Inline flag, then config file, then DPS_SEED (seed only), then default."""
    value = getattr(args, key, None)
    if value is None:
        value = getattr(args, "_config_values", {}).get(key)
    if value is None and key == "seed":
        value = os.environ.get("DPS_SEED")
    if value is None:
        value = DEFAULTS.get(key)
    if value is None or cast is None:
        return value
    if isinstance(value, str):
        try:
            return cast(value)
        except UsageError:
            raise
        except ValueError as exc:
            raise UsageError(f"invalid value for --{key.replace('_', '-')}: "
                             f"{value!r}") from exc
    return cast(value)


def _fmt(x) -> str:
    return format(float(x), ".9g")


def _write_lines(path: str, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line + "\n")


def _write_trace_csv(path: str, trace: BeampatternTrace) -> None:
    lines = ["angle_deg,power_linear,power_db"]
    lines.extend(
        f"{_fmt(a)},{_fmt(p)},{_fmt(d)}"
        for a, p, d in zip(trace.angles_deg, trace.power_linear, trace.power_db)
    )
    _write_lines(path, lines)


def _write_summary(path: str, items) -> None:
    lines = [f"{key}={value}" for key, value in items]
    _write_lines(path, lines)
    for line in lines:
        print(line)


def _out_dir(args) -> str:
    out = str(_resolve(args, "out"))
    os.makedirs(out, exist_ok=True)
    return out


def _scenario_common(args, with_bits: bool = True) -> dict:
    common = {
        "config": ArrayConfig(_resolve(args, "antennas", int),
                              _resolve(args, "spacing", float)),
        "candidates_l": _resolve(args, "candidates", int),
        "norm_target": _resolve(args, "norm", float),
        "grid_step_deg": _resolve(args, "grid_step", float),
        "floor_db": _resolve(args, "floor_db", float),
        "seed": _resolve(args, "seed", int) or 0,
    }
    if with_bits:
        common["bits"] = _resolve(args, "bits", int)
    return common


def _desired_index(targets: tuple, desired) -> int:
    if desired is None:
        if len(targets) == 1:
            return 0
        raise UsageError("--desired is required when several targets are given")
    desired = float(desired)
    for i, t in enumerate(targets):
        if t == desired:
            return i
    raise UsageError(f"--desired={desired:g} is not one of the target angles")


def cmd_pattern(args) -> int:
    common = _scenario_common(args)
    config = common["config"]
    kind = str(_resolve(args, "beamformer"))
    targets = _resolve(args, "targets", _parse_float_list)
    desired = _resolve(args, "desired", float)
    gamma = _resolve(args, "gamma", float)

    if targets is None:
        targets = (desired,) if desired is not None else (0.0,)
    idx = _desired_index(targets, desired)
    theta0 = math.radians(targets[idx])

    def mvdr_weights():
        scenario = TargetScenario(tuple(math.radians(t) for t in targets), idx)
        return mvdr_beamformer(config, scenario,
                               gamma if gamma is not None else 0.1)

    if kind == "steering":
        w = steering_beamformer(config, theta0)
    elif kind == "mvdr":
        w = mvdr_weights()
    elif kind == "dps":
        w = mvdr_weights() if (len(targets) > 1 or gamma is not None) \
            else steering_beamformer(config, theta0)
        w = approximate(w, PhaseGrid(common["bits"]), common["candidates_l"],
                        common["norm_target"]).realized
    elif kind == "pesa-quantized":
        w = quantize_pesa(steering_beamformer(config, theta0),
                          PhaseGrid(common["bits"]))
    else:
        raise UsageError(f"unknown beamformer {kind!r}")

    trace = beampattern_trace(
        config, w, angle_grid_deg(common["grid_step_deg"]), common["floor_db"]
    )
    out = _out_dir(args)
    path = os.path.join(out, "pattern.csv")
    _write_trace_csv(path, trace)
    print(f"wrote {path} ({trace.angles_deg.size} rows)")
    return 0


def _write_trial(out: str, result, summary_items) -> None:
    _write_trace_csv(os.path.join(out, "reference.csv"), result.reference_trace)
    _write_trace_csv(os.path.join(out, "dps.csv"), result.dps_trace)
    _write_trace_csv(os.path.join(out, "pesa.csv"), result.pesa_trace)
    _write_summary(os.path.join(out, "summary.txt"), summary_items)


def cmd_single(args) -> int:
    common = _scenario_common(args)
    targets = _resolve(args, "targets", _parse_float_list)
    if targets is None:
        rng = trial_rng(common["seed"], 0)
        targets = tuple(draw_target_angles(rng, count=1))
    if len(targets) != 1:
        raise UsageError("single takes exactly one target angle")

    spec = ScenarioSpec(target_angles_deg=targets, **common)
    result = run_single_target(spec)
    out = _out_dir(args)
    _write_trial(out, result, [
        ("target_deg", _fmt(targets[0])),
        ("bits", spec.bits),
        ("candidates", spec.candidates_l),
        ("norm_target", _fmt(spec.norm_target)),
        ("seed", spec.seed),
        ("rms_dps_db", _fmt(result.rms_dps_db)),
        ("rms_pesa_db", _fmt(result.rms_pesa_db)),
    ])
    return 0


def cmd_clutter(args) -> int:
    common = _scenario_common(args)
    targets = _resolve(args, "targets", _parse_float_list)
    if targets is None or len(targets) < 2:
        raise UsageError("clutter requires --targets with at least two angles")
    idx = _desired_index(targets, _resolve(args, "desired", float))
    gamma = _resolve(args, "gamma", float)
    spec = ScenarioSpec(target_angles_deg=targets, desired_index=idx,
                        gamma=gamma if gamma is not None else 0.1, **common)
    result = run_mvdr_clutter(spec)

    items = [
        ("targets_deg", ",".join(_fmt(t) for t in targets)),
        ("desired_deg", _fmt(targets[idx])),
        ("gamma", _fmt(spec.gamma)),
        ("bits", spec.bits),
        ("candidates", spec.candidates_l),
        ("norm_target", _fmt(spec.norm_target)),
        ("rms_dps_db", _fmt(result.rms_dps_db)),
        ("rms_pesa_db", _fmt(result.rms_pesa_db)),
    ]
    for angle, levels in result.levels_at_targets_db.items():
        tag = f"{angle:g}"
        items.append((f"reference_db_at_{tag}", _fmt(levels.reference)))
        items.append((f"dps_db_at_{tag}", _fmt(levels.dps)))
        items.append((f"pesa_db_at_{tag}", _fmt(levels.pesa)))
    _write_trial(_out_dir(args), result, items)
    return 0


def cmd_sweep(args) -> int:
    common = _scenario_common(args, with_bits=False)
    raw_bits = getattr(args, "bits", None) \
        or args._config_values.get("bits") or "2:12"
    bits_sweep = _parse_bits_sweep(raw_bits)
    norm_sweep = _resolve(args, "norms", _parse_float_list)
    trials = _resolve(args, "trials", int)
    trials = 200 if trials is None else trials
    workers = _resolve(args, "workers", int)
    gamma = _resolve(args, "gamma", float)

    # Target draw is per trial; the placeholder angle is never used.
    spec = ScenarioSpec(target_angles_deg=(0.0,),
                        gamma=gamma if gamma is not None else 0.1, **common)
    result = run_monte_carlo(spec, bits_sweep, norm_sweep, trials,
                             workers=workers)

    out = _out_dir(args)
    path = os.path.join(out, "sweep.csv")
    lines = ["bits,norm_target,mean_rms_dps_db,mean_rms_pesa_db,trials"]
    lines.extend(
        f"{row.bits},{_fmt(row.norm_target)},{_fmt(row.mean_rms_dps_db)},"
        f"{_fmt(row.mean_rms_pesa_db)},{row.trials}"
        for row in result.rows
    )
    _write_lines(path, lines)
    print(f"wrote {path} ({len(result.rows)} rows, {trials} trials)")
    return 0


def cmd_oracle_check(args) -> int:
    bits = int(_resolve(args, "bits", int))
    if not 1 <= bits <= MAX_ORACLE_CHECK_BITS:
        raise UsageError(
            f"oracle-check requires 1 <= bits <= {MAX_ORACLE_CHECK_BITS}"
        )
    count = _resolve(args, "trials", int)
    count = 1000 if count is None else count
    seed = _resolve(args, "seed", int) or 0

    grid = PhaseGrid(bits)
    rng = trial_rng(seed, 0)
    mismatches = 0
    checked = 0
    while checked < count:
        block = min(16, count - checked)
        radius = 2.0 * np.sqrt(rng.random(block))
        angle = rng.random(block) * 2.0 * np.pi
        w = radius * np.exp(1j * angle)
        wn = normalize_to_max(w, 2.0)
        dps = approximate(w, grid, candidates=grid.size, norm_target=2.0)
        for n in range(block):
            pair = exhaustive_oracle(wn[n], grid)
            err_fast = abs(complex(dps.realized[n]) - complex(wn[n]))
            err_oracle = abs(
                complex(grid.phasors[pair[0]] + grid.phasors[pair[1]])
                - complex(wn[n])
            )
            if err_fast != err_oracle or tuple(dps.pairs[n]) != pair:
                mismatches += 1
                print(
                    f"mismatch: w={wn[n]!r} search pair={tuple(dps.pairs[n])} "
                    f"err={err_fast!r} oracle pair={pair} err={err_oracle!r}"
                )
        checked += block
    if mismatches:
        print(f"oracle check FAILED: {mismatches}/{checked} mismatches")
        return 3
    print(f"oracle check passed: {checked} weights, bits={bits}, "
          f"candidates={grid.size}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpspesa",
        description="Double-phase-shifter PESA beamforming experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value scenario file; inline flags win")
        p.add_argument("--antennas", type=int, help="array elements (default 16)")
        p.add_argument("--spacing", type=float,
                       help="element spacing in wavelengths (default 0.5)")
        p.add_argument("--bits", help="phase shifter bits (default 4)")
        p.add_argument("-L", "--candidates", type=int,
                       help="top-L candidate phases per shifter (default 3)")
        p.add_argument("--norm", type=float,
                       help="normalization target in (0, 2] (default 2)")
        p.add_argument("--grid-step", dest="grid_step", type=float,
                       help="angle grid step in degrees (default 0.1)")
        p.add_argument("--floor-db", dest="floor_db", type=float,
                       help="dB clamp for normalized patterns (default -80)")
        p.add_argument("--seed", type=int,
                       help="RNG seed (default $DPS_SEED or 0)")
        p.add_argument("--out", help="output directory (default .)")

    p = sub.add_parser("pattern", help="write one beampattern CSV")
    add_common(p)
    p.add_argument("--beamformer",
                   choices=["steering", "mvdr", "dps", "pesa-quantized"],
                   help="weight source (default steering)")
    p.add_argument("--targets", help="comma-separated target angles in degrees")
    p.add_argument("--desired", type=float, help="desired target angle in degrees")
    p.add_argument("--gamma", type=float, help="null-depth regularizer")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("single", help="single-target tracking experiment")
    add_common(p)
    p.add_argument("--targets", help="target angle in degrees (default: random)")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("clutter", help="multi-target clutter-reduction experiment")
    add_common(p)
    p.add_argument("--targets", help="comma-separated target angles in degrees")
    p.add_argument("--desired", type=float, help="desired target angle in degrees")
    p.add_argument("--gamma", type=float, help="null-depth regularizer (default 0.1)")
    p.set_defaults(func=cmd_clutter)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over bits and norms")
    add_common(p)
    p.add_argument("--norms", help="comma-separated normalization targets")
    p.add_argument("--trials", type=int, help="trials per combination (default 200)")
    p.add_argument("--gamma", type=float, help="null-depth regularizer (default 0.1)")
    p.add_argument("--workers", type=int, help="parallel trial workers (default 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check",
                       help="compare the candidate search to the exhaustive oracle")
    add_common(p)
    p.add_argument("--trials", type=int, help="random weights to check (default 1000)")
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config_path = getattr(args, "config", None)
        args._config_values = _load_config_file(config_path) if config_path else {}
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
