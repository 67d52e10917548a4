import numpy as np
import pytest

import oracles
from tvlinf import GridSpec, RegParams, ScalarField, VectorField, energy_tgv, solve_tgv, solve_tvlinf


def test_constant_data():
    f = ScalarField.constant(GridSpec.regular((10, 8)), 0.3)
    u, w, rep = solve_tgv(f, 1.0, 1.0)
    assert rep.converged
    np.testing.assert_allclose(u.values, 0.3, rtol=1e-12)
    assert not np.any(w.values)


def test_parameter_validation():
    f = ScalarField.zeros(GridSpec.regular(10))
    with pytest.raises(ValueError):
        solve_tgv(f, 0.0, 1.0)


def _noisy_1d(n=60, seed=0):
    rng = np.random.default_rng(seed)
    g = GridSpec.regular(n, 2.0 / n, -1.0)
    x = g.coords()
    return ScalarField(g, np.where(x > 0, 1.0, 0.0) + x ** 2 + 0.1 * rng.standard_normal(n))


@pytest.mark.parametrize("alpha,beta", [(0.3, 0.2), (0.1, 0.05)])
def test_matches_convex_solver_1d(alpha, beta):
    f = _noisy_1d()
    u, w, rep = solve_tgv(f, alpha, beta, RegParams(alpha, beta, tol=1e-11, max_iters=200000))
    uo, _, vo = oracles.tgv_1d(f.values, f.grid.spacing[0], alpha, beta)
    assert rep.converged
    np.testing.assert_allclose(u.values, uo, atol=1e-6)
    assert energy_tgv(u, w, f, alpha, beta) == pytest.approx(vo, abs=1e-7)


def test_matches_convex_solver_2d():
    rng = np.random.default_rng(1)
    i, j = np.meshgrid(np.arange(7), np.arange(6), indexing="ij")
    f = 0.05 * i * j / 6 + 0.4 * (i > 3) + 0.05 * rng.standard_normal((7, 6))
    alpha, beta = 0.2, 0.5
    g = GridSpec.regular(f.shape)
    u, w, rep = solve_tgv(ScalarField(g, f), alpha, beta,
                          RegParams(alpha, beta, tol=1e-11, max_iters=200000))
    uo, vo = oracles.tgv_2d(f, alpha, beta)
    assert rep.converged
    np.testing.assert_allclose(u.values, uo, atol=1e-5)
    assert energy_tgv(u, w, ScalarField(g, f), alpha, beta) == pytest.approx(vo, abs=1e-6)


def test_energy_below_simple_candidates():
    f = _noisy_1d(100, seed=2)
    u, w, _ = solve_tgv(f, 0.1, 0.1, RegParams(0.1, 0.1, tol=1e-8, max_iters=50000))
    e = energy_tgv(u, w, f, 0.1, 0.1)
    zero = VectorField.zeros(f.grid)
    assert e <= energy_tgv(f, zero, f, 0.1, 0.1)
    assert e <= energy_tgv(ScalarField.constant(f.grid, f.values.mean()), zero, f, 0.1, 0.1)


def test_equivalence_with_tvlinf_on_even_data():
    # even V-shaped data: the optimal w is odd and monotone, TGV(a, b) = TVLinf(a, 2b)
    g = GridSpec.regular(100, 4.0 / 100, -2.0)
    f = ScalarField(g, 4.0 * np.abs(g.coords()))
    ut, _, rt = solve_tgv(f, 2.0, 2.0, RegParams(2.0, 2.0, tol=1e-12, max_iters=100000))
    ul, _, rl = solve_tvlinf(f, RegParams(2.0, 4.0, tol=1e-12, max_iters=100000))
    assert rt.converged and rl.converged
    assert np.linalg.norm(ut.values - ul.values) <= 1e-4 * np.linalg.norm(ul.values)
