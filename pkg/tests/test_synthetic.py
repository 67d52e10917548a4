import numpy as np
import pytest

from tvlinf.synthetic import (GENERATORS, add_gaussian_noise, affine_step_1d, circle_2d,
                              pyramid_masks, pyramid_square_2d, step_1d)


def test_step_shapes():
    f = step_1d(100)
    assert f.grid.shape == (100,) and f.values[49] == 0 and f.values[50] == 1
    g = affine_step_1d(100, lam=2.0)
    assert g.values[50] - g.values[49] == pytest.approx(1.0 + 2.0 * 0.02)


def test_noise_identity_and_variance():
    f = circle_2d(256)
    np.testing.assert_array_equal(add_gaussian_noise(f, 0.0, 1).values, f.values)
    noisy = add_gaussian_noise(f, 0.01, seed=4)
    assert np.var(noisy.values - f.values) == pytest.approx(0.01, rel=0.05)
    again = add_gaussian_noise(f, 0.01, seed=4)
    np.testing.assert_array_equal(noisy.values, again.values)
    with pytest.raises(ValueError):
        add_gaussian_noise(f, -1.0)


@pytest.mark.parametrize("gen", [circle_2d, pyramid_square_2d])
def test_phantoms_rotation_symmetric_and_in_range(gen):
    u = gen(64).values
    np.testing.assert_array_equal(np.rot90(u), u)
    assert u.min() >= 0 and u.max() <= 1


def test_pyramid_slopes():
    n = 128
    u = pyramid_square_2d(n).values
    inner, outer = pyramid_masks(n)
    gx = np.abs(np.diff(u, axis=0))[:, n // 2]
    inner_row = inner[:-1, n // 2] & inner[1:, n // 2]
    outer_row = outer[:-1, n // 2] & outer[1:, n // 2]
    assert np.median(gx[inner_row]) == pytest.approx(2 * np.median(gx[outer_row]), rel=1e-9)


def test_generator_registry():
    assert set(GENERATORS) == {"step", "affine-step", "circle", "pyramid-square"}
