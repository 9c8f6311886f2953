import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from walklab import generate
from walklab.graph import ball
from walklab.stopping import exit_time_cdf
from walklab.walk import (
    RngState,
    empirical_cdf,
    first_passage_times,
    heat_kernel,
    heat_kernel_series,
    propagate,
    simulate_walk,
    smoothed_heat_kernel,
    transition_probabilities,
)


def test_zero_step():
    g = generate("sg", 3)
    assert heat_kernel(g, 0, 5, 5) == pytest.approx(1 / g.mu[5])


def test_one_step_path():
    g = generate("path", 11)
    assert heat_kernel(g, 1, 5, 6) == 0.25


def test_cycle_return():
    g = generate("cycle", 4)
    assert heat_kernel(g, 2, 0, 0) == pytest.approx(0.25, abs=1e-15)


def test_negative_time():
    with pytest.raises(ValueError):
        heat_kernel(generate("path", 3), -1, 0, 0)


def test_against_fractions():
    g = generate("sg", 2)
    edges = [(a, b) for a, b, _ in g.edges()]
    rows = oracles.fraction_heat(edges, g.n, 0, 12)
    series = heat_kernel_series(g, 0, 12)
    for n, row in enumerate(rows):
        for y, p in row.items():
            assert series[n, y] == pytest.approx(float(p) / g.mu[y], abs=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 122), st.integers(0, 122), st.integers(0, 40))
def test_symmetry(x, y, n):
    g = generate("sg", 4)
    assert heat_kernel(g, n, x, y) == pytest.approx(heat_kernel(g, n, y, x), abs=1e-10)


@pytest.mark.parametrize("n,m", [(3, 4), (7, 2), (5, 5)])
def test_chapman_kolmogorov(n, m):
    g = generate("box2d", 8)
    x, y = 9, 50
    Pn = transition_probabilities(g, n, x)
    lhs = transition_probabilities(g, n + m, x)[y]
    rhs = sum(Pn[z] * transition_probabilities(g, m, z)[y] for z in range(g.n))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_mass_conservation():
    g = generate("vicsek", 3)
    for t, v in enumerate(propagate(g, 0, 500)):
        assert abs(v.sum() - 1) <= max(t, 1) * 1e-12
        assert v.min() >= 0


def test_killed_mass_nonincreasing():
    g = generate("sg", 4)
    kill = ball(g, 0, 6)
    masses = [v.sum() for v in propagate(g, 0, 200, kill=kill)]
    assert all(b <= a + 1e-15 for a, b in zip(masses, masses[1:]))


def test_parity():
    g = generate("path", 101)
    series = heat_kernel_series(g, 50, 60, [50])[:, 0]
    assert np.all(series[1::2] == 0)
    smooth = series[:-1] + series[1:]
    assert np.all(smooth > 0)
    assert smoothed_heat_kernel(g, 7, 50, 50) == pytest.approx(series[7] + series[8])


def test_trajectory_reproducible():
    g = generate("sg", 4)
    a = simulate_walk(g, 0, 200, RngState(11))
    b = simulate_walk(g, 0, 200, RngState(11))
    c = simulate_walk(g, 0, 200, RngState(12))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    # every step follows an edge
    assert all(g.W[p, q] > 0 for p, q in zip(a[:-1], a[1:]))


def test_workers_independent_streams():
    rng = RngState(5)
    u = rng.generator(0).random(8)
    v = rng.generator(1).random(8)
    assert not np.allclose(u, v)
    assert np.array_equal(u, RngState(5).generator(0).random(8))


def test_one_step_frequency():
    g = generate("path", 11)
    N = 100_000
    t = first_passage_times(g, 5, 1, RngState(2024), hit=[6], walkers=N)
    p_hat = (t == 1).mean()
    assert abs(p_hat - 0.5) <= 4 * math.sqrt(0.25 / N)


def test_mc_exit_path_matches_dp():
    g = generate("path", 41)
    N = 100_000
    region = ball(g, 20, 2)
    exact = exit_time_cdf(g, 20, region, 40).values
    times = first_passage_times(g, 20, 40, RngState(7), exit_from=region, walkers=N)
    emp = empirical_cdf(times, 40)
    sigma = np.sqrt(exact * (1 - exact) / N)
    assert np.all(np.abs(emp - exact) <= 4 * sigma + 1e-12)


def test_first_passage_argument_checks():
    g = generate("path", 5)
    with pytest.raises(ValueError):
        first_passage_times(g, 2, 10, RngState(0))
    with pytest.raises(ValueError):
        first_passage_times(g, 2, 10, RngState(0), hit=[0], exit_from=[2])
    assert np.all(first_passage_times(g, 0, 10, RngState(0), hit=[0], walkers=3) == 0)


def test_empirical_cdf():
    F = empirical_cdf(np.array([1, 1, 3, -1]), 4)
    assert F.tolist() == [0, 0, 0.5, 0.5, 0.75]
