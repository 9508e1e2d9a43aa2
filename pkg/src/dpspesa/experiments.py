"""Experiment harness: single-target tracking, clutter reduction, and the
Monte-Carlo sweep over shifter resolution and normalization scale.

All runs are deterministic given the scenario seed; Monte-Carlo trials
re-seed from ``(seed, trial_index)`` so results do not depend on worker
count or execution order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .array_model import (
    DEFAULT_FLOOR_DB,
    DEFAULT_GRID_STEP_DEG,
    ArrayConfig,
    BeampatternTrace,
    angle_grid_deg,
    rms_diff_db,
    steering_matrix,
    trace_from_powers,
)
from .beamformers import TargetScenario, mvdr_beamformer, steering_beamformer
from .dps_quantize import PhaseGrid, approximate, quantize_pesa

DEFAULT_GAMMA = 0.1
TARGET_DRAW_RANGE_DEG = 85
TARGET_MIN_SEPARATION_DEG = 2.0


@dataclass(frozen=True)
class ScenarioSpec:
    """One experiment configuration; defaults follow the reference setup
    (N=16, half-wavelength spacing, 4-bit shifters, L=3, normalization 2)."""

    config: ArrayConfig
    target_angles_deg: tuple
    desired_index: int = 0
    gamma: float | None = None
    bits: int = 4
    candidates_l: int = 3
    norm_target: float = 2.0
    grid_step_deg: float = DEFAULT_GRID_STEP_DEG
    floor_db: float = DEFAULT_FLOOR_DB
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "target_angles_deg",
            tuple(float(t) for t in self.target_angles_deg),
        )
        if not 0 <= self.desired_index < len(self.target_angles_deg):
            raise ValueError("desired_index out of range")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be strictly positive when present")

    @property
    def scenario(self) -> TargetScenario:
        return TargetScenario(
            tuple(np.radians(self.target_angles_deg)), self.desired_index
        )

    @property
    def desired_angle_deg(self) -> float:
        return self.target_angles_deg[self.desired_index]


class TargetLevels(NamedTuple):
    reference: float
    dps: float
    pesa: float


@dataclass(frozen=True)
class TrialResult:
    """Traces and summary metrics for one experiment run."""

    reference_trace: BeampatternTrace
    dps_trace: BeampatternTrace
    pesa_trace: BeampatternTrace
    rms_dps_db: float
    rms_pesa_db: float
    levels_at_targets_db: dict


class SweepRow(NamedTuple):
    bits: int
    norm_target: float
    mean_rms_dps_db: float
    mean_rms_pesa_db: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    """One row per (bits, norm_target) combination of a Monte-Carlo sweep."""

    rows: tuple


_SAMPLERS: dict = {}


def _sampler(config: ArrayConfig, step_deg: float):
    """Cached (degree grid, conjugate steering matrix) per geometry."""
    key = (config.n_antennas, config.spacing_wavelengths, step_deg)
    hit = _SAMPLERS.get(key)
    if hit is None:
        grid_deg = angle_grid_deg(step_deg)
        response = steering_matrix(config, np.radians(grid_deg)).conj()
        hit = (grid_deg, response)
        _SAMPLERS[key] = hit
    return hit


def _trace(grid_deg, response, w, floor_db) -> BeampatternTrace:
    return trace_from_powers(grid_deg, np.abs(response @ w) ** 2, floor_db)


def _grid_indices(grid_deg, angles_deg) -> np.ndarray:
    return np.array(
        [int(np.argmin(np.abs(grid_deg - a))) for a in angles_deg], dtype=int
    )


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Independent, order-insensitive generator for one trial."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial_index]))


def draw_target_angles(rng: np.random.Generator, count: int = 3,
                       span_deg: float = TARGET_DRAW_RANGE_DEG,
                       min_sep_deg: float = TARGET_MIN_SEPARATION_DEG) -> np.ndarray:
    """Random integer-degree target directions with pairwise separation.

    Uniform over [-span_deg, span_deg]; re-drawn until every pair is at
    least ``min_sep_deg`` apart, which keeps the multi-target solve away
    from near-coincident steering vectors.
    """
    lo, hi = -int(span_deg), int(span_deg)
    while True:
        angles = rng.integers(lo, hi + 1, size=count).astype(float)
        if count == 1 or np.diff(np.sort(angles)).min() >= min_sep_deg:
            return angles


def _levels(grid_deg, traces, target_angles_deg) -> dict:
    idx = _grid_indices(grid_deg, target_angles_deg)
    out = {}
    for angle, i in zip(target_angles_deg, idx):
        out[float(angle)] = TargetLevels(
            *(float(t.power_db[i]) for t in traces)
        )
    return out


def run_single_target(spec: ScenarioSpec) -> TrialResult:
    """Track one target: steering-vector reference vs. its quantized
    realizations.  RMS errors are taken over the whole angle grid."""
    if len(spec.target_angles_deg) != 1:
        raise ValueError("single-target run requires exactly one target")
    if spec.gamma is not None:
        raise ValueError("single-target run takes no gamma")
    grid_deg, response = _sampler(spec.config, spec.grid_step_deg)
    grid = PhaseGrid(spec.bits)

    w_ref = steering_beamformer(spec.config, spec.scenario.desired_angle)
    dps = approximate(w_ref, grid, spec.candidates_l, spec.norm_target)
    w_pesa = quantize_pesa(w_ref, grid)

    traces = tuple(
        _trace(grid_deg, response, w, spec.floor_db)
        for w in (w_ref, dps.realized, w_pesa)
    )
    return TrialResult(
        *traces,
        rms_dps_db=rms_diff_db(traces[0], traces[1]),
        rms_pesa_db=rms_diff_db(traces[0], traces[2]),
        levels_at_targets_db=_levels(grid_deg, traces, spec.target_angles_deg),
    )


def run_mvdr_clutter(spec: ScenarioSpec) -> TrialResult:
    """Illuminate one of several targets while suppressing the rest.

    The reference is the exact multi-target beamformer; the quantized
    phase-only baseline steers at the desired target.  RMS errors are
    evaluated at the target/clutter angles.
    """
    if len(spec.target_angles_deg) < 2:
        raise ValueError("clutter run requires at least two targets")
    if spec.gamma is None:
        raise ValueError("clutter run requires gamma")
    grid_deg, response = _sampler(spec.config, spec.grid_step_deg)
    grid = PhaseGrid(spec.bits)

    w_ref = mvdr_beamformer(spec.config, spec.scenario, spec.gamma)
    dps = approximate(w_ref, grid, spec.candidates_l, spec.norm_target)
    w_pesa = quantize_pesa(
        steering_beamformer(spec.config, spec.scenario.desired_angle), grid
    )

    traces = tuple(
        _trace(grid_deg, response, w, spec.floor_db)
        for w in (w_ref, dps.realized, w_pesa)
    )
    at = _grid_indices(grid_deg, spec.target_angles_deg)
    return TrialResult(
        *traces,
        rms_dps_db=rms_diff_db(traces[0], traces[1], at),
        rms_pesa_db=rms_diff_db(traces[0], traces[2], at),
        levels_at_targets_db=_levels(grid_deg, traces, spec.target_angles_deg),
    )


def _sweep_trial(payload):
    (seed, index, n_antennas, spacing, gamma, candidates_l,
     step_deg, floor_db, bits_list, norm_list) = payload
    config = ArrayConfig(n_antennas, spacing)
    grid_deg, response = _sampler(config, step_deg)

    rng = trial_rng(seed, index)
    angles = draw_target_angles(rng, count=3)
    desired = int(rng.integers(angles.size))
    scenario = TargetScenario(tuple(np.radians(angles)), desired)

    w_ref = mvdr_beamformer(config, scenario, gamma)
    ref_trace = _trace(grid_deg, response, w_ref, floor_db)
    at = _grid_indices(grid_deg, angles)
    w_steer = steering_beamformer(config, scenario.desired_angle)

    rms_dps = np.empty((len(bits_list), len(norm_list)))
    rms_pesa = np.empty(len(bits_list))
    for bi, bits in enumerate(bits_list):
        grid = PhaseGrid(bits)
        pesa_trace = _trace(grid_deg, response, quantize_pesa(w_steer, grid),
                            floor_db)
        rms_pesa[bi] = rms_diff_db(ref_trace, pesa_trace, at)
        for ni, norm in enumerate(norm_list):
            dps = approximate(w_ref, grid, candidates_l, norm)
            dps_trace = _trace(grid_deg, response, dps.realized, floor_db)
            rms_dps[bi, ni] = rms_diff_db(ref_trace, dps_trace, at)
    return rms_dps, rms_pesa


def run_monte_carlo(base: ScenarioSpec, bits_sweep, norm_sweep,
                    trials: int, workers: int = 1) -> SweepResult:
    """Mean beampattern errors over random three-target scenarios.

    Per trial, three random clutter/target directions are drawn, the
    multi-target reference is built (``base.gamma``, defaulting to 0.1),
    and the quantized realizations are scored at the target angles for
    every (bits, norm_target) combination.  Deterministic for a given
    ``base.seed`` regardless of ``workers``.
    """
    bits_list = tuple(int(b) for b in bits_sweep)
    norm_list = tuple(float(v) for v in norm_sweep)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not bits_list or not norm_list:
        raise ValueError("bits_sweep and norm_sweep must be non-empty")
    gamma = base.gamma if base.gamma is not None else DEFAULT_GAMMA

    payloads = [
        (base.seed, t, base.config.n_antennas, base.config.spacing_wavelengths,
         gamma, base.candidates_l, base.grid_step_deg, base.floor_db,
         bits_list, norm_list)
        for t in range(trials)
    ]
    if workers <= 1:
        results = [_sweep_trial(p) for p in payloads]
    else:
        chunk = max(1, trials // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_trial, payloads, chunksize=chunk))

    rms_dps = np.stack([r[0] for r in results])
    rms_pesa = np.stack([r[1] for r in results])
    rows = []
    for bi, bits in enumerate(bits_list):
        for ni, norm in enumerate(norm_list):
            rows.append(SweepRow(
                bits=bits,
                norm_target=norm,
                mean_rms_dps_db=float(rms_dps[:, bi, ni].mean()),
                mean_rms_pesa_db=float(rms_pesa[:, bi].mean()),
                trials=trials,
            ))
    return SweepResult(rows=tuple(rows))
