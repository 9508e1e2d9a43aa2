"""Reference beamformers: conjugate steering and regularized MVDR."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .array_model import ArrayConfig, _check_angle, steering_vector


@dataclass(frozen=True)
class TargetScenario:
    """Known target directions (radians) and which one to illuminate."""

    target_angles: tuple
    desired_index: int = 0

    def __post_init__(self):
        angles = tuple(float(t) for t in self.target_angles)
        object.__setattr__(self, "target_angles", angles)
        if len(angles) < 1:
            raise ValueError("at least one target angle is required")
        for t in angles:
            _check_angle(t)
        if len(set(angles)) != len(angles):
            raise ValueError("target angles must be pairwise distinct")
        if not 0 <= self.desired_index < len(angles):
            raise ValueError("desired_index out of range")

    @property
    def n_targets(self) -> int:
        return len(self.target_angles)

    @property
    def desired_angle(self) -> float:
        return self.target_angles[self.desired_index]


def steering_beamformer(config: ArrayConfig, theta0: float) -> np.ndarray:
    """Single-target beamformer: the steering vector toward ``theta0`` (radians)."""
    return steering_vector(config, theta0)


def mvdr_beamformer(config: ArrayConfig, scenario: TargetScenario,
                    gamma: float) -> np.ndarray:
    """Multi-target beamformer pointing at the desired target with nulls elsewhere.

    Solves ``(gamma*I + A A^H) w = a(theta_desired)`` where the columns of
    ``A`` are the steering vectors of all targets.  ``gamma`` trades null
    depth against conditioning and must be strictly positive (the gamma=0
    system is singular whenever there are fewer targets than antennas).

    Parameters
    ----------
    config : ArrayConfig
        Array geometry.
    scenario : TargetScenario
        Target directions and the desired index.
    gamma : float
        Null-depth regularizer, > 0.

    Returns
    -------
    ndarray
        Complex weights of length ``config.n_antennas``.
    """
    if not gamma > 0:
        raise ValueError("gamma must be strictly positive")
    n = config.n_antennas
    if scenario.n_targets > n:
        warnings.warn(
            f"nulling {scenario.n_targets} targets with only {n} antennas "
            "exceeds the array's degrees of freedom",
            stacklevel=2,
        )
    a_mat = np.column_stack(
        [steering_vector(config, t) for t in scenario.target_angles]
    )
    lhs = gamma * np.eye(n) + a_mat @ a_mat.conj().T
    rhs = a_mat[:, scenario.desired_index]
    return cho_solve(cho_factor(lhs), rhs)
