"""Uniform linear array geometry, steering vectors, and beampatterns.

Beamformer weights are plain 1-D complex ndarrays of length
``config.n_antennas``.  Single angles are radians; sampled angle grids
(`BeampatternTrace`) carry degrees, which is what every downstream
consumer (experiments, CSV output) works in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
HALF_PI = 0.5 * np.pi

DEFAULT_FLOOR_DB = -80.0
DEFAULT_GRID_STEP_DEG = 0.1


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform linear array: element count and spacing in carrier wavelengths."""

    n_antennas: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self):
        if self.n_antennas < 1:
            raise ValueError("n_antennas must be a positive integer")
        if not self.spacing_wavelengths > 0:
            raise ValueError("spacing_wavelengths must be positive")


@dataclass(frozen=True)
class BeampatternTrace:
    """Power pattern sampled on an angle grid.

    ``power_db`` is peak-normalized (max entry 0 dB when any power is
    positive) and clamped below at ``floor_db``.
    """

    angles_deg: np.ndarray
    power_linear: np.ndarray
    power_db: np.ndarray
    floor_db: float

    def __post_init__(self):
        for arr in (self.angles_deg, self.power_linear, self.power_db):
            arr.setflags(write=False)

    def index_of(self, angle_deg: float) -> int:
        """Index of the grid point closest to ``angle_deg``."""
        return int(np.argmin(np.abs(self.angles_deg - angle_deg)))

    def level_db(self, angle_deg: float) -> float:
        """Peak-normalized dB level at the grid point closest to ``angle_deg``."""
        return float(self.power_db[self.index_of(angle_deg)])


def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not abs(theta) <= HALF_PI:
        raise ValueError(f"look direction must lie in [-pi/2, pi/2], got {theta}")
    return theta


def _as_weights(config: ArrayConfig, w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.shape != (config.n_antennas,):
        raise ValueError(
            f"expected {config.n_antennas} weights, got shape {w.shape}"
        )
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    return w


def steering_vector(config: ArrayConfig, theta: float) -> np.ndarray:
    """Steering vector for a plane wave toward direction ``theta`` (radians).

    Entry ``n`` is ``exp(1j * 2*pi * n * d/lambda * sin(theta))``; entry 0
    is exactly 1 and all entries have unit modulus.
    """
    theta = _check_angle(theta)
    n = np.arange(config.n_antennas)
    return np.exp(1j * TWO_PI * n * config.spacing_wavelengths * np.sin(theta))


def steering_matrix(config: ArrayConfig, thetas) -> np.ndarray:
    """Stack steering vectors row-wise: shape ``(len(thetas), n_antennas)``."""
    thetas = np.asarray(thetas, dtype=float)
    for t in np.atleast_1d(thetas):
        _check_angle(t)
    n = np.arange(config.n_antennas)
    phase = TWO_PI * config.spacing_wavelengths * np.outer(np.sin(thetas), n)
    return np.exp(1j * phase)


def beampattern_power(config: ArrayConfig, w, theta: float) -> float:
    """Radiated power ``|a(theta)^H w|^2`` toward direction ``theta`` (radians)."""
    w = _as_weights(config, w)
    a = steering_vector(config, theta)
    return float(abs(np.vdot(a, w)) ** 2)


def trace_from_powers(angles_deg, power_linear,
                      floor_db: float = DEFAULT_FLOOR_DB) -> BeampatternTrace:
    """Peak-normalize sampled linear powers into a `BeampatternTrace`.

    An all-zero pattern maps to ``floor_db`` everywhere.
    """
    angles_deg = np.asarray(angles_deg, dtype=float)
    power_linear = np.asarray(power_linear, dtype=float)
    if angles_deg.size == 0:
        raise ValueError("angle grid must be non-empty")
    if angles_deg.size > 1 and not np.all(np.diff(angles_deg) > 0):
        raise ValueError("angle grid must be strictly increasing")
    if angles_deg.shape != power_linear.shape:
        raise ValueError("angles and powers must have matching shapes")
    if not floor_db < 0:
        raise ValueError("floor_db must be negative")

    peak = power_linear.max()
    if peak > 0:
        with np.errstate(divide="ignore"):
            power_db = 10.0 * np.log10(power_linear / peak)
        power_db = np.maximum(power_db, floor_db)
    else:
        power_db = np.full_like(power_linear, floor_db)
    return BeampatternTrace(angles_deg, power_linear.copy(), power_db, float(floor_db))


def beampattern_trace(config: ArrayConfig, w, angles_deg,
                      floor_db: float = DEFAULT_FLOOR_DB) -> BeampatternTrace:
    """Sample the power pattern of ``w`` over a degree grid.

    Parameters
    ----------
    config : ArrayConfig
        Array geometry.
    w : array_like
        Complex weights, length ``config.n_antennas``.
    angles_deg : array_like
        Strictly increasing grid of look angles in degrees, within [-90, 90].
    floor_db : float
        Clamp for the peak-normalized dB pattern (must be negative).
    """
    w = _as_weights(config, w)
    angles_deg = np.asarray(angles_deg, dtype=float)
    if angles_deg.size == 0:
        raise ValueError("angle grid must be non-empty")
    response = steering_matrix(config, np.radians(angles_deg)).conj() @ w
    return trace_from_powers(angles_deg, np.abs(response) ** 2, floor_db)


def angle_grid_deg(step_deg: float = DEFAULT_GRID_STEP_DEG) -> np.ndarray:
    """Symmetric degree grid over [-90, 90], inclusive of both endpoints."""
    if not step_deg > 0:
        raise ValueError("step_deg must be positive")
    n_intervals = round(180.0 / step_deg)
    if n_intervals < 1 or abs(n_intervals * step_deg - 180.0) > 1e-9:
        raise ValueError("step_deg must divide 180 degrees evenly")
    return np.linspace(-90.0, 90.0, n_intervals + 1)


def rms_diff_db(a: BeampatternTrace, b: BeampatternTrace, at_indices=()) -> float:
    """Root-mean-square difference of two dB patterns over selected grid indices.

    An empty ``at_indices`` means all grid points.  Both traces must share
    one angle grid.
    """
    if not np.array_equal(a.angles_deg, b.angles_deg):
        raise ValueError("traces must share the same angle grid")
    idx = np.asarray(at_indices, dtype=int)
    if idx.size == 0:
        diff = a.power_db - b.power_db
    else:
        if idx.min() < 0 or idx.max() >= a.angles_deg.size:
            raise ValueError("index selection out of range")
        diff = a.power_db[idx] - b.power_db[idx]
    return float(np.sqrt(np.mean(diff**2)))
