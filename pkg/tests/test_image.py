import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from l0sr.errors import DimensionError, NumericalError
from l0sr.image import PixelIndex, as_image, clamp_to_unit, inner_product, new_constant

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_new_constant_examples():
    z = new_constant(2, 3, 0.0)
    assert z.shape == (2, 3) and np.all(z == 0.0)
    assert new_constant(1, 1, 0.5)[0, 0] == 0.5
    assert new_constant(4, 4, 1.0).sum() == 16.0
    assert new_constant(2, 2, 0.1, channels=3).shape == (2, 2, 3)


@pytest.mark.parametrize("h,w", [(0, 3), (3, 0), (-1, 2)])
def test_new_constant_rejects_bad_dims(h, w):
    with pytest.raises(DimensionError):
        new_constant(h, w, 0.0)


def test_new_constant_rejects_nonfinite():
    with pytest.raises(NumericalError):
        new_constant(2, 2, float("nan"))


def test_inner_product_examples(rng):
    x = rng.standard_normal((8, 8))
    assert inner_product(np.zeros((8, 8)), x) == 0.0
    assert inner_product(x, x) >= 0.0
    y = rng.standard_normal((8, 8))
    oracle = 0.0
    for i in range(8):
        for j in range(8):
            oracle += x[i, j] * y[i, j]
    assert inner_product(x, y) == pytest.approx(oracle, rel=1e-12)


def test_inner_product_shape_mismatch():
    with pytest.raises(DimensionError):
        inner_product(np.zeros((2, 2)), np.zeros((2, 3)))


@given(arrays(np.float64, (5, 4), elements=finite), arrays(np.float64, (5, 4), elements=finite),
       arrays(np.float64, (5, 4), elements=finite), finite)
def test_inner_product_symmetric_bilinear(a, b, c, s):
    assert inner_product(a, b) == pytest.approx(inner_product(b, a), rel=1e-12, abs=1e-12)
    lhs = inner_product(s * a + c, b)
    rhs = s * inner_product(a, b) + inner_product(c, b)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-6)


def test_clamp_examples():
    img = np.array([[1.2, -0.1, 0.5]])
    np.testing.assert_array_equal(clamp_to_unit(img), [[1.0, 0.0, 0.5]])


@given(st.floats(0.0, 1.0), st.integers(1, 6), st.integers(1, 6))
def test_constant_then_clamp_is_identity(v, h, w):
    img = new_constant(h, w, v)
    np.testing.assert_array_equal(clamp_to_unit(img), img)


def test_row_major_addressing():
    img = np.zeros((3, 5))
    idx = PixelIndex(2, 3)
    img[idx.row, idx.col] = 7.0
    assert img.ravel()[idx.flat(5)] == 7.0
    assert idx.flat(5) == 2 * 5 + 3


def test_as_image_rejects_nan():
    with pytest.raises(NumericalError):
        as_image([[0.0, np.inf]])
    with pytest.raises(DimensionError):
        as_image(np.zeros(4))
