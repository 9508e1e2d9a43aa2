import cmath
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dpspesa.dps_quantize import (
    Decomposition,
    PhaseGrid,
    approximate,
    circular_distance,
    decompose,
    exhaustive_oracle,
    nearest_phases,
    normalize_to_max,
    quantize_pesa,
    recompose,
)

TWO_PI = 2.0 * math.pi


def _random_disk(rng, size=None, radius=2.0):
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(1j * TWO_PI * rng.random(size))


# ---------------------------------------------------------------- PhaseGrid

def test_grid_structure():
    grid = PhaseGrid(4)
    assert grid.size == 16
    assert grid.step == pytest.approx(TWO_PI / 16, rel=0, abs=0)
    assert grid.phases[0] == 0.0
    assert np.all(np.diff(grid.phases) > 0)
    assert_allclose(np.diff(grid.phases), grid.step, rtol=1e-12)
    assert grid.phases[-1] < TWO_PI
    assert_allclose(np.abs(grid.phasors), 1.0, atol=1e-15)


def test_grid_bits_bounds():
    with pytest.raises(ValueError):
        PhaseGrid(0)
    with pytest.raises(ValueError):
        PhaseGrid(21)


# -------------------------------------------------------------- decompose

def test_decompose_full_amplitude():
    assert decompose(2.0) == Decomposition(0.0, 0.0)


def test_decompose_zero_uses_fixed_convention():
    dec = decompose(0.0)
    assert dec.phi1 == pytest.approx(math.pi / 2, abs=1e-15)
    assert dec.phi2 == pytest.approx(3 * math.pi / 2, abs=1e-15)


def test_decompose_unit_diagonal():
    # |1+j| = sqrt(2), acos(sqrt(2)/2) = pi/4 -> phases (pi/2, 0).
    dec = decompose(1.0 + 1.0j)
    assert dec.phi1 == pytest.approx(math.pi / 2, abs=1e-15)
    assert dec.phi2 == pytest.approx(0.0, abs=1e-15)


def test_decompose_rejects_large_amplitude():
    with pytest.raises(ValueError):
        decompose(2.0 + 1e-6)
    # A float-noise excursion above 2 is tolerated.
    decompose(2.0 + 1e-13)


def test_recompose_values():
    assert recompose(Decomposition(0.0, 0.0)) == 2.0 + 0.0j
    assert abs(recompose(Decomposition(math.pi / 2, 3 * math.pi / 2))) < 1e-15
    assert recompose(Decomposition(math.pi / 2, 0.0)) == pytest.approx(1.0 + 1.0j)


def test_round_trip_and_identities():
    rng = np.random.default_rng(5)
    for c in _random_disk(rng, size=2000):
        c = complex(c)
        dec = decompose(c)
        assert abs(recompose(dec) - c) < 1e-12
        # Phase pair identities, read through the mod-2*pi reduction.
        delta = (dec.phi1 - dec.phi2) % TWO_PI
        assert delta <= math.pi + 1e-15  # phi1 carries the positive offset
        assert abs(2.0 * math.cos(delta / 2.0) - abs(c)) < 1e-12
        midpoint = (dec.phi2 + delta / 2.0) % TWO_PI
        omega = math.atan2(c.imag, c.real)
        assert circular_distance(midpoint, omega) < 1e-12


# -------------------------------------------------------- normalize_to_max

def test_normalize_examples():
    assert_allclose(normalize_to_max([1.0, 0.5j], 2.0), [2.0, 1.0j], rtol=1e-15)
    w = np.array([2.0, 1.0j])
    assert_allclose(normalize_to_max(w, 2.0), w, rtol=0, atol=0)
    assert_allclose(normalize_to_max([3.0], 2.0), [2.0], rtol=1e-15)


def test_normalize_hits_target_modulus():
    rng = np.random.default_rng(6)
    for _ in range(200):
        w = _random_disk(rng, size=8)
        target = float(rng.uniform(0.05, 2.0))
        out = normalize_to_max(w, target)
        assert abs(np.abs(out).max() - target) < 1e-12


def test_normalize_errors():
    with pytest.raises(ValueError):
        normalize_to_max([0.0, 0.0], 2.0)
    with pytest.raises(ValueError):
        normalize_to_max([1.0], 0.0)
    with pytest.raises(ValueError):
        normalize_to_max([1.0], 2.5)
    with pytest.raises(ValueError):
        normalize_to_max([], 2.0)


# --------------------------------------------------------- nearest_phases

def test_nearest_phases_examples():
    grid = PhaseGrid(2)  # {0, pi/2, pi, 3*pi/2}
    assert list(nearest_phases(math.pi / 3, grid, 2)) == [1, 0]
    assert list(nearest_phases(0.0, grid, 1)) == [0]
    assert list(nearest_phases(0.0, PhaseGrid(5), 1)) == [0]
    assert list(nearest_phases(TWO_PI - 0.01, grid, 1)) == [0]


def test_nearest_phases_clamps_count():
    grid = PhaseGrid(2)
    assert len(nearest_phases(1.0, grid, 99)) == 4
    with pytest.raises(ValueError):
        nearest_phases(1.0, grid, 0)


def test_nearest_phases_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(500):
        grid = PhaseGrid(int(rng.integers(1, 8)))
        count = int(rng.integers(1, 10))
        phi = float(rng.uniform(-10.0, 10.0))
        got = list(nearest_phases(phi, grid, count))
        dist = np.abs((grid.phases - phi + np.pi) % TWO_PI - np.pi)
        want = np.lexsort((np.arange(grid.size), dist))[: min(count, grid.size)]
        assert got == list(want)


# ------------------------------------------------------------ approximate

def test_approximate_exact_on_grid():
    dps = approximate([2.0, 2.0], PhaseGrid(1), candidates=1)
    assert dps.pairs.tolist() == [[0, 0], [0, 0]]
    assert_allclose(dps.realized, [2.0, 2.0], rtol=0, atol=0)


def test_approximate_grid_aligned_weight():
    # 1+j decomposes to (pi/2, 0), both on the 2-bit grid.
    dps = approximate([1.0 + 1.0j], PhaseGrid(2), candidates=2,
                      norm_target=math.sqrt(2.0))
    assert dps.pairs.tolist() == [[0, 1]]
    assert_allclose(dps.realized, [1.0 + 1.0j], atol=1e-12)


def test_approximate_tie_break_all_candidates_equal():
    # For w=1 on the 2-bit grid, the candidate sums {2, 1+j, 1-j, 0} are
    # all at distance 1; the lexicographically smallest pair (0, 0) wins.
    dps = approximate([1.0], PhaseGrid(2), candidates=2, norm_target=1.0)
    assert dps.pairs.tolist() == [[0, 0]]
    assert_allclose(dps.realized, [2.0], rtol=0, atol=0)


def test_approximate_validation():
    with pytest.raises(ValueError):
        approximate([1.0], PhaseGrid(2), candidates=0)
    with pytest.raises(ValueError):
        approximate([0.0, 0.0], PhaseGrid(2))


def test_approximate_output_invariants():
    rng = np.random.default_rng(8)
    grid = PhaseGrid(4)
    for _ in range(50):
        w = _random_disk(rng, size=16)
        dps = approximate(w, grid, candidates=3)
        assert np.all(dps.pairs[:, 0] <= dps.pairs[:, 1])
        assert np.all(dps.pairs >= 0) and np.all(dps.pairs < grid.size)
        assert np.abs(dps.realized).max() <= 2.0 + 1e-12
        rebuilt = grid.phasors[dps.pairs[:, 0]] + grid.phasors[dps.pairs[:, 1]]
        assert np.max(np.abs(rebuilt - dps.realized)) < 1e-12


def test_approximate_error_non_increasing_in_candidates():
    # Top-L candidate lists are nested, so per-element error cannot grow.
    rng = np.random.default_rng(9)
    grid = PhaseGrid(4)
    for _ in range(20):
        w = _random_disk(rng, size=8)
        wn = normalize_to_max(w, 2.0)
        prev = None
        for count in (1, 2, 3, 5, 8, 16):
            err = np.abs(approximate(w, grid, count).realized - wn)
            if prev is not None:
                assert np.all(err <= prev + 0.0)
            prev = err


# ------------------------------------------------------ exhaustive_oracle

def test_oracle_examples():
    assert exhaustive_oracle(2.0, PhaseGrid(3)) == (0, 0)
    grid = PhaseGrid(2)
    pair = exhaustive_oracle(1.0 + 1.0j, grid)
    assert pair == (0, 1)
    assert grid.phasors[pair[0]] + grid.phasors[pair[1]] == pytest.approx(1.0 + 1.0j)
    # Full enumeration of the 10 canonical pairs leaves a five-way tie at
    # distance 1; (0, 0) is the lexicographic winner.
    assert exhaustive_oracle(1.0, grid) == (0, 0)


def test_oracle_refuses_large_grids():
    with pytest.raises(ValueError):
        exhaustive_oracle(1.0, PhaseGrid(13))


def test_oracle_matches_candidate_search():
    rng = np.random.default_rng(10)
    for bits in (2, 3):
        grid = PhaseGrid(bits)
        w = _random_disk(rng, size=200)
        wn = normalize_to_max(w, 2.0)
        dps = approximate(w, grid, candidates=grid.size)
        for n in range(w.size):
            pair = exhaustive_oracle(wn[n], grid)
            best = grid.phasors[pair[0]] + grid.phasors[pair[1]]
            assert abs(complex(dps.realized[n]) - complex(wn[n])) == \
                abs(complex(best) - complex(wn[n]))
            assert tuple(dps.pairs[n]) == pair


def test_oracle_error_non_increasing_with_bits():
    # Every B-bit phase is also a (B+1)-bit phase, so refining the grid
    # cannot hurt.
    rng = np.random.default_rng(11)
    for c in _random_disk(rng, size=100):
        c = complex(c)
        errs = []
        for bits in (2, 3, 4):
            grid = PhaseGrid(bits)
            i, j = exhaustive_oracle(c, grid)
            errs.append(abs(grid.phasors[i] + grid.phasors[j] - c))
        assert errs[0] >= errs[1] >= errs[2]


def test_grids_nest_exactly():
    coarse = PhaseGrid(3).phases
    fine = PhaseGrid(4).phases
    assert np.all(coarse == fine[::2])


# ---------------------------------------------------------- quantize_pesa

def test_quantize_pesa_on_grid_phases_unchanged():
    grid = PhaseGrid(3)
    w = 0.5 * grid.phasors[[0, 3, 5]]
    out = quantize_pesa(w, grid)
    assert_allclose(out, grid.phasors[[0, 3, 5]], rtol=0, atol=0)


def test_quantize_pesa_midpoint_rule():
    # arg 0.3 rad rounds down to phase 0 on {0, pi/2, pi, 3*pi/2}.
    out = quantize_pesa([cmath.exp(0.3j)], PhaseGrid(2))
    assert out[0] == pytest.approx(1.0 + 0.0j, abs=1e-15)


def test_quantize_pesa_unit_modulus():
    rng = np.random.default_rng(12)
    w = _random_disk(rng, size=32)
    w = w[w != 0]
    out = quantize_pesa(w, PhaseGrid(4))
    assert_allclose(np.abs(out), 1.0, atol=1e-15)


def test_quantize_pesa_rejects_zero_entry():
    with pytest.raises(ValueError):
        quantize_pesa([1.0, 0.0], PhaseGrid(2))


def test_quantize_pesa_error_bound():
    rng = np.random.default_rng(13)
    for bits in (2, 3, 4, 6):
        grid = PhaseGrid(bits)
        bound = 2.0 * math.sin(math.pi / 2 ** (bits + 1)) + 1e-12
        w = _random_disk(rng, size=64)
        w = w[np.abs(w) > 1e-6]
        out = quantize_pesa(w, grid)
        err = np.abs(out - np.exp(1j * np.angle(w)))
        assert err.max() <= bound
