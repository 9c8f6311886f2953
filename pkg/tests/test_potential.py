import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from walklab import generate
from walklab.graph import WeightedGraph, ball, inner_boundary, sphere
from walklab.potential import (
    DomainError,
    capacity_measure,
    capacity_resistance,
    dirichlet_energy,
    green_function,
    green_matrix,
    green_resistance_comparison,
    harmonic_measure,
    harnack_constant,
    resistance,
    solve_dirichlet,
    vsr_constant,
)
from walklab.stopping import mean_exit_times


def test_dirichlet_on_path():
    g = generate("path", 5)
    f = solve_dirichlet(g, [0, 4], [0.0, 1.0], range(5))
    assert np.allclose(f.values, [0, 0.25, 0.5, 0.75, 1], atol=1e-15)
    assert f.residual < 1e-14


def test_dirichlet_constant_data():
    g = generate("sg", 3)
    dom = ball(g, 0, 5)
    clamp = dom.mask & ~ball(g, 0, 4).mask
    f = solve_dirichlet(g, clamp, 3.25, dom)
    assert np.allclose(f.values[dom.mask], 3.25)
    assert np.isnan(f.values[~dom.mask]).all()


def test_dirichlet_unreachable():
    g = generate("path", 7)
    with pytest.raises(ValueError):
        solve_dirichlet(g, [0], [1.0], [0, 1, 2])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=12, max_size=12), st.integers(0, 122))
def test_maximum_principle(data, x):
    g = generate("sg", 4)
    dom = ball(g, x, 4)
    clamp = np.flatnonzero(dom.mask & ~ball(g, x, 3).mask)
    vals = np.resize(np.asarray(data), len(clamp))
    f = solve_dirichlet(g, clamp, vals, dom).values
    inner = ball(g, x, 3).mask
    assert f[inner].max() <= vals.max() + 1e-12
    assert f[inner].min() >= vals.min() - 1e-12


def test_single_edge_capacity():
    g = WeightedGraph(2, [(0, 1, 1.0)])
    c = capacity_resistance(g, [0], [1])
    assert c.cap == pytest.approx(1.0) and c.rho == pytest.approx(1.0)


def test_known_resistances():
    g = generate("path", 201)
    assert resistance(g, 100, 1, 4) == pytest.approx(2.0, abs=1e-9)
    c4 = generate("cycle", 4)
    assert capacity_resistance(c4, [0], [2]).rho == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("family,size", [("sg", 4), ("box2d", 9), ("vicsek", 2)])
def test_resistance_against_networkx(family, size):
    g = generate(family, size)
    for a, b in [(0, g.n - 1), (1, g.n // 2)]:
        assert capacity_resistance(g, [a], [b]).rho == pytest.approx(oracles.nx_resistance(g, a, b), rel=1e-9)


def test_capacity_symmetric_and_dual():
    g = generate("sg", 4)
    rng = np.random.default_rng(3)
    for _ in range(10):
        A, B = rng.choice(g.n, size=(2, 5), replace=False)
        ab, ba = capacity_resistance(g, A, B), capacity_resistance(g, B, A)
        assert ab.cap == pytest.approx(ba.cap, abs=1e-10)
        assert ab.cap == pytest.approx(ab.flow, abs=1e-9)
        assert dirichlet_energy(g, ab.potential) == pytest.approx(ab.cap)


def test_capacity_rejects_overlap():
    with pytest.raises(ValueError):
        capacity_resistance(generate("path", 5), [1, 2], [2, 3])


def test_resistance_monotone():
    g = generate("sg", 5)
    rng = np.random.default_rng(4)
    for _ in range(50):
        x = int(rng.integers(g.n))
        r = int(rng.integers(1, 5))
        R = int(rng.integers(r + 1, 10))
        if ball(g, x, R + 1).mask.all():
            continue
        base = resistance(g, x, r, R)
        if r + 1 < R:
            assert resistance(g, x, r + 1, R) <= base + 1e-12
        assert resistance(g, x, r, R + 1) >= base - 1e-12


def test_green_single_vertex():
    g = generate("path", 21)
    assert green_function(g, [10], 10)[10] == pytest.approx(0.5)
    assert green_function(g, ball(g, 10, 3), 10)[15] == 0
    with pytest.raises(ValueError):
        green_function(g, [10], 11)


def test_green_symmetry_and_exit_identity():
    g = generate("sg", 4)
    B = ball(g, 5, 5)
    G = green_matrix(g, B)
    assert np.abs(G - G.T).max() <= 1e-10
    E = mean_exit_times(g, B)
    assert np.allclose(G @ g.mu, E, atol=1e-8)


def test_capacity_potential_decomposition():
    g = generate("sg", 5)
    x, r = 0, 2
    u, charge = capacity_measure(g, x, r, 5 * r)
    G = green_matrix(g, ball(g, x, 5 * r))
    assert np.allclose(G @ charge, u, atol=1e-8)
    support = np.flatnonzero(np.abs(charge) > 1e-12)
    # the charge sits on the vertices of B(x, r) adjacent to its complement
    assert set(support) <= set(inner_boundary(g, ball(g, x, r)).ids)
    assert set(support) <= set(sphere(g, x, r - 1).ids)
    assert charge.sum() == pytest.approx(1 / resistance(g, x, r, 5 * r), abs=1e-8)


def test_harmonic_measure_rows_sum_to_one():
    g = generate("box2d", 9)
    poles, omega = harmonic_measure(g, ball(g, 40, 3))
    inside = ball(g, 40, 3).ids
    assert np.allclose(omega[inside].sum(axis=1), 1)


def test_harnack_path():
    g = generate("path", 201)
    assert harnack_constant(g, 100, 1) == 1.0
    assert harnack_constant(g, 100, 2) == pytest.approx(5 / 3, abs=1e-9)
    for R in range(2, 21):
        assert harnack_constant(g, 100, R) == pytest.approx(oracles.path_harnack(R), abs=1e-9)


def test_harnack_brute_force():
    g = generate("sg", 4)
    for x, R in [(10, 2), (40, 3)]:
        assert harnack_constant(g, x, R) == pytest.approx(oracles.brute_harnack(g, x, R), rel=1e-9)
        assert harnack_constant(g, x, R) >= 1


def test_harnack_boundary_guard():
    g = generate("path", 21)
    with pytest.raises(DomainError):
        harnack_constant(g, 3, 3)
    assert harnack_constant(g, 3, 3, force=True) >= 1


def test_vsr_values():
    g = generate("path", 201)
    for r in range(1, 31):
        assert vsr_constant(g, 100, r) == pytest.approx(0.5, abs=1e-9)
    assert vsr_constant(generate("star", 6), 0, 1) == 1.0
    box = generate("box2d", 41)
    vals = [vsr_constant(box, 20 * 41 + 20, r) for r in (2, 4, 8)]
    assert vals[0] > vals[1] > vals[2]


def test_lhg_comparability():
    for g, x in [(generate("path", 201), 100), (generate("sg", 4), 0)]:
        q = green_resistance_comparison(g, x, 2, 1, 5)
        vals = [q["min_green"], q["rho"], q["max_green"]]
        assert min(vals) > 0
        assert np.isfinite(max(vals) / min(vals))
