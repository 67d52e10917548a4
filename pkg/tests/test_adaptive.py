import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tvlinf import GridSpec, ScalarField, beta_from_data, beta_from_reference, gaussian_filter
from tvlinf.adaptive import region_ratio
from tvlinf.fields import pointwise_norm
from tvlinf.diffops import grad
from tvlinf.synthetic import pyramid_masks, pyramid_square_2d


def test_constant_gives_cap():
    f = ScalarField.constant(GridSpec.regular((20, 20)), 0.4)
    np.testing.assert_allclose(beta_from_data(f, 30.0, 1e-4, 2.0, 13).values, 30.0 / 1e-4, rtol=1e-12)
    np.testing.assert_allclose(beta_from_reference(f, 50.0, 1e-4).values, 50.0 / 1e-4, rtol=1e-12)


def test_validation():
    f = ScalarField.zeros(GridSpec.regular(10))
    with pytest.raises(ValueError):
        beta_from_reference(f, 0.0, 1e-4)
    with pytest.raises(ValueError):
        beta_from_reference(f, 1.0, 0.0)
    with pytest.raises(ValueError):
        beta_from_data(f, 1.0, 1e-4, 0.0)


def test_ramp_interior():
    g = GridSpec.regular(200, 0.5)
    s = 0.3
    f = ScalarField(g, s * g.coords())
    beta = beta_from_data(f, 2.0, 1e-4, 1.0, 7).values
    np.testing.assert_allclose(beta[10:-10], 2.0 / (s + 1e-4), rtol=1e-2)


def test_pyramid_ratio_is_two():
    n = 96
    beta = beta_from_reference(pyramid_square_2d(n), 50.0, 1e-4)
    inner, outer = pyramid_masks(n)
    assert region_ratio(beta, outer, inner) == pytest.approx(2.0, rel=1e-2)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), c=st.floats(0.1, 100.0))
def test_scaling_range_and_monotonicity(seed, c):
    rng = np.random.default_rng(seed)
    f = ScalarField(GridSpec.regular((16, 12)), rng.uniform(0, 1, (16, 12)))
    eps = 1e-3
    b1 = beta_from_data(f, c, eps, 1.5, 5)
    b2 = beta_from_data(f, 2 * c, eps, 1.5, 5)
    np.testing.assert_array_equal(b2.values, 2 * b1.values)
    assert np.all(b1.values > 0) and np.all(b1.values <= c / eps)
    mag = pointwise_norm(grad(gaussian_filter(f, 1.5, 5).values, f.grid.spacing)).ravel()
    order = np.argsort(mag, kind="stable")
    assert np.all(np.diff(b1.values.ravel()[order]) <= 0)
