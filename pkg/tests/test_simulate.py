import numpy as np
import pytest

from l0sr.admm import jump_count
from l0sr.errors import DimensionError
from l0sr.operators import BlurSpec, DownsampleSpec, make_blur, make_forward_model, make_gradient_h, make_gradient_v
from l0sr.simulate import DegradationSpec, SyntheticPattern, degrade, make_pattern


def test_blur_only_when_factor_one(rng):
    hr = rng.random((16, 16))
    spec = DegradationSpec(BlurSpec(1.0), DownsampleSpec(1), 0.0)
    np.testing.assert_array_equal(degrade(hr, spec), make_blur((16, 16), BlurSpec(1.0)).apply(hr))


def test_constant_preserved():
    g = degrade(np.full((16, 16), 0.4), DegradationSpec(BlurSpec(1.0), DownsampleSpec(2), 0.0))
    assert g.shape == (8, 8)
    np.testing.assert_allclose(g, 0.4, atol=1e-14)


def test_seeded_noise_determinism(rng):
    hr = rng.random((16, 16))
    a = degrade(hr, DegradationSpec(noise_sigma=0.05, seed=3))
    b = degrade(hr, DegradationSpec(noise_sigma=0.05, seed=3))
    c = degrade(hr, DegradationSpec(noise_sigma=0.05, seed=4))
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_noise_statistics():
    hr = np.zeros((256, 256))
    sigma = 0.05
    g = degrade(hr, DegradationSpec(noise_sigma=sigma, seed=11))
    m = g.size
    assert abs(g.mean()) <= 3 * sigma / np.sqrt(m)
    assert abs(g.std() - sigma) <= 0.05 * sigma


def test_degrade_linear_without_noise(rng):
    u, v = rng.random((2, 12, 12))
    spec = DegradationSpec(noise_sigma=0.0)
    np.testing.assert_allclose(degrade(2.0 * u - 3.0 * v, spec), 2.0 * degrade(u, spec) - 3.0 * degrade(v, spec),
                               atol=1e-10)


def test_degrade_multichannel_and_errors(rng):
    hr = rng.random((8, 8, 3))
    assert degrade(hr, DegradationSpec(noise_sigma=0.0)).shape == (4, 4, 3)
    with pytest.raises(DimensionError):
        degrade(rng.random((9, 8)), DegradationSpec())


def test_unclamped_output():
    g = degrade(np.ones((16, 16)), DegradationSpec(noise_sigma=0.2, seed=0))
    assert g.max() > 1.0


def test_single_edge():
    x = make_pattern(SyntheticPattern("single_edge"), 4, 6)
    np.testing.assert_array_equal(x[:, :3], 0.0)
    np.testing.assert_array_equal(x[:, 3:], 1.0)


def test_qr_grid_modules_flat_and_binary():
    x = make_pattern(SyntheticPattern("qr_like_grid", module_px=5), 125, 125, seed=2)
    assert set(np.unique(x)) <= {0.0, 1.0}
    blocks = x.reshape(25, 5, 25, 5)
    assert np.all(blocks.min(axis=(1, 3)) == blocks.max(axis=(1, 3)))


def test_patterns_deterministic():
    for kind in ("qr_like_grid", "piecewise_constant_blocks", "single_edge"):
        p = SyntheticPattern(kind)
        assert np.array_equal(make_pattern(p, 40, 40, seed=5), make_pattern(p, 40, 40, seed=5))


def test_blocks_jump_count_matches_stencil_enumeration():
    x = make_pattern(SyntheticPattern("piecewise_constant_blocks", n_blocks=4), 32, 32, seed=1)
    assert len(np.unique(x)) == 4
    h, w = x.shape
    count = 0
    for i in range(h):
        for j in range(w):
            right = x[i, j + 1] if j + 1 < w else 0.0
            down = x[i + 1, j] if i + 1 < h else 0.0
            count += (right != x[i, j]) or (down != x[i, j])
    assert jump_count(x, make_gradient_h(x.shape), make_gradient_v(x.shape), p=2) == count
