"""Two-phasor weight synthesis under limited phase-shifter resolution.

A complex weight of modulus at most 2 splits uniquely into a sum of two
unit phasors.  With B-bit phase shifters each phasor must come from the
uniform grid of 2**B phases, so a weight vector is realized by picking,
per antenna, the pair of grid phases whose phasor sum lands closest to
the wanted weight.  `approximate` does this with a top-L candidate search
around the exact split; `exhaustive_oracle` brute-forces all pairs for
small B and anchors the tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .array_model import TWO_PI

MAX_ORACLE_BITS = 12
MAX_GRID_BITS = 20


@dataclass(frozen=True)
class PhaseGrid:
    """The 2**bits realizable phases {0, 2*pi/2**B, ...} of a B-bit shifter."""

    bits: int

    def __post_init__(self):
        if not 1 <= self.bits <= MAX_GRID_BITS:
            raise ValueError(f"bits must be in [1, {MAX_GRID_BITS}]")

    @property
    def size(self) -> int:
        return 1 << self.bits

    @property
    def step(self) -> float:
        return TWO_PI / self.size

    @cached_property
    def phases(self) -> np.ndarray:
        p = np.arange(self.size) * self.step
        p.setflags(write=False)
        return p

    @cached_property
    def phasors(self) -> np.ndarray:
        e = np.exp(1j * self.phases)
        e.setflags(write=False)
        return e


class Decomposition(NamedTuple):
    """Unit-phasor pair summing to a decomposed weight; phases in [0, 2*pi)."""

    phi1: float
    phi2: float


@dataclass(frozen=True)
class DpsBeamformer:
    """Per-antenna grid-phase pairs and the complex weights they realize.

    ``pairs`` is an (N, 2) integer array of canonical (lower, upper) grid
    indices; ``realized[n]`` is the phasor sum of row n, modulus <= 2.
    """

    grid: PhaseGrid
    pairs: np.ndarray
    realized: np.ndarray

    def __post_init__(self):
        self.pairs.setflags(write=False)
        self.realized.setflags(write=False)


def decompose(c: complex) -> Decomposition:
    """Split ``c`` (modulus <= 2) into two unit phasors.

    With a = |c| and omega = arg(c), the phases are omega +/- acos(a/2),
    reduced to [0, 2*pi); phi1 carries the positive offset.  The zero
    weight uses the omega = 0 convention, giving (pi/2, 3*pi/2).
    """
    c = complex(c)
    a = abs(c)
    if a > 2.0 + 1e-12:
        raise ValueError(f"amplitude no larger than 2 required, got |c| = {a}")
    omega = math.atan2(c.imag, c.real)
    half = math.acos(min(a / 2.0, 1.0))
    return Decomposition((omega + half) % TWO_PI, (omega - half) % TWO_PI)


def recompose(d: Decomposition) -> complex:
    """Sum the two unit phasors of a decomposition."""
    return cmath.exp(1j * d.phi1) + cmath.exp(1j * d.phi2)


def normalize_to_max(w, target: float = 2.0) -> np.ndarray:
    """Rescale weights so the largest modulus equals ``target``.

    Splitting is least phase-sensitive for moduli near 2, so the default
    drives the strongest element to the top of the representable disk.
    """
    w = np.asarray(w, dtype=complex)
    if not 0.0 < target <= 2.0:
        raise ValueError("target must lie in (0, 2]")
    if w.size == 0:
        raise ValueError("weights must be non-empty")
    peak = np.abs(w).max()
    if peak == 0:
        raise ValueError("all-zero weights cannot be normalized")
    return w * (target / peak)


def circular_distance(x: float, y: float) -> float:
    """Shortest angular distance between two phases, in [0, pi]."""
    return abs((x - y + math.pi) % TWO_PI - math.pi)


def nearest_phases(phi: float, grid: PhaseGrid, count: int) -> np.ndarray:
    """Indices of the ``count`` grid phases circularly closest to ``phi``.

    Sorted by distance ascending; ties broken by the smaller index.
    ``count`` is clamped to the grid size.
    """
    if count < 1:
        raise ValueError("count must be a positive integer")
    n = grid.size
    count = min(count, n)
    # The top-count set is a contiguous arc around phi, so only a small
    # window of indices ever needs ranking.
    if 2 * count + 2 >= n:
        ks = np.arange(n)
    else:
        base = int((phi % TWO_PI) / grid.step)
        ks = (base + np.arange(-count, count + 2)) % n
    dist = np.abs((grid.phases[ks] - phi + np.pi) % TWO_PI - np.pi)
    order = np.lexsort((ks, dist))
    return ks[order[:count]]


def _best_pair(c: complex, phasors: np.ndarray, idx_a: np.ndarray,
               idx_b: np.ndarray) -> tuple[int, int, complex]:
    """Canonical pair from idx_a x idx_b whose phasor sum is closest to c.

    Exact ties resolve to the lexicographically smallest (lower, upper)
    pair, matching `exhaustive_oracle`.
    """
    ca = np.repeat(idx_a, idx_b.size)
    cb = np.tile(idx_b, idx_a.size)
    lo = np.minimum(ca, cb)
    hi = np.maximum(ca, cb)
    err = np.abs(phasors[lo] + phasors[hi] - c)
    k = np.lexsort((hi, lo, err))[0]
    return int(lo[k]), int(hi[k]), complex(phasors[lo[k]] + phasors[hi[k]])


def approximate(w, grid: PhaseGrid, candidates: int = 3,
                norm_target: float = 2.0) -> DpsBeamformer:
    """Realize a beamformer on a quantized double-phase-shifter array.

    Normalizes ``w`` to maximum modulus ``norm_target``, splits each
    element into two unit phasors, collects the ``candidates`` nearest
    grid phases for each, and keeps the pair combination whose sum is
    closest to the element.

    Parameters
    ----------
    w : array_like
        Complex weights, not all zero.
    grid : PhaseGrid
        Realizable phases of the shifters.
    candidates : int
        Top-L list length per phasor (clamped to the grid size).
    norm_target : float
        Maximum modulus after normalization, in (0, 2].

    Returns
    -------
    DpsBeamformer
        Selected index pairs and the weights they realize.
    """
    if candidates < 1:
        raise ValueError("candidates must be a positive integer")
    wn = normalize_to_max(w, norm_target)
    phasors = grid.phasors
    pairs = np.empty((wn.size, 2), dtype=np.int64)
    realized = np.empty(wn.size, dtype=complex)
    for i, c in enumerate(wn):
        c = complex(c)
        dec = decompose(c)
        idx_a = nearest_phases(dec.phi1, grid, candidates)
        idx_b = nearest_phases(dec.phi2, grid, candidates)
        lo, hi, value = _best_pair(c, phasors, idx_a, idx_b)
        pairs[i] = lo, hi
        realized[i] = value
    return DpsBeamformer(grid=grid, pairs=pairs, realized=realized)


def exhaustive_oracle(w_n: complex, grid: PhaseGrid) -> tuple[int, int]:
    """Best canonical phase pair for one weight, by brute force.

    Enumerates all (2**B + 1) * 2**B / 2 unordered pairs in lexicographic
    order and returns the first that minimizes the phasor-sum error, i.e.
    the same tie-break as `approximate`.  Cost grows as 4**B, hence the
    bits cap.
    """
    if grid.bits > MAX_ORACLE_BITS:
        raise ValueError(
            f"exhaustive search is limited to bits <= {MAX_ORACLE_BITS}"
        )
    c = complex(w_n)
    phasors = grid.phasors
    best = (math.inf, -1, -1)
    for i in range(grid.size):
        err = np.abs(phasors[i] + phasors[i:] - c)
        j = int(np.argmin(err))
        if err[j] < best[0]:
            best = (float(err[j]), i, i + j)
    return best[1], best[2]


def quantize_pesa(w, grid: PhaseGrid) -> np.ndarray:
    """Phase-only quantization: snap each weight's phase to the grid.

    Returns unit-modulus weights; the modulus of the input is discarded,
    which is all a single-shifter array can realize.
    """
    w = np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise ValueError("zero weights have no phase to quantize")
    idx = [
        int(nearest_phases(math.atan2(c.imag, c.real), grid, 1)[0])
        for c in w
    ]
    return grid.phasors[idx].copy()
