import numpy as np
import pytest
from PIL import Image

from l0sr.errors import ImageFormatError, TruncatedImageError
from l0sr.iio import from_uint8, read_image, read_raw, to_uint8, write_image, write_raw


def quantized(rng, shape):
    return rng.integers(0, 256, size=shape).astype(np.float64) / 255.0


def test_scaling_convention():
    np.testing.assert_array_equal(from_uint8(np.array([255, 0, 128], dtype=np.uint8)), [1.0, 0.0, 128 / 255])
    np.testing.assert_array_equal(to_uint8(np.array([1.2, -0.3, 0.5])), [255, 0, 128])


@pytest.mark.parametrize("ext,shape", [(".pgm", (16, 16)), (".png", (16, 16)), (".png", (7, 9, 3))])
def test_round_trip_bit_identical(tmp_path, rng, ext, shape):
    img = quantized(rng, shape)
    path = tmp_path / f"x{ext}"
    write_image(img, path)
    np.testing.assert_array_equal(read_image(path), img)


def test_raw_round_trip(tmp_path, rng):
    img = rng.standard_normal((5, 6, 2))
    write_raw(img, tmp_path / "x.f64")
    np.testing.assert_array_equal(read_raw(tmp_path / "x.f64"), img)
    assert (tmp_path / "x.f64").stat().st_size == 16 + 8 * img.size


def test_pgm_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x00\xff")
    np.testing.assert_array_equal(read_image(path), [[0.0, 1.0]])


def test_truncated_files(tmp_path):
    (tmp_path / "t.pgm").write_bytes(b"P5\n4 4\n255\n\x00\x01")
    with pytest.raises(TruncatedImageError):
        read_image(tmp_path / "t.pgm")
    (tmp_path / "t.f64").write_bytes(b"L0RF")
    with pytest.raises(TruncatedImageError):
        read_image(tmp_path / "t.f64")


def test_unsupported_formats(tmp_path):
    (tmp_path / "x.bmp").write_bytes(b"BM not an image")
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "x.bmp")
    (tmp_path / "w.pgm").write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "w.pgm")
    with pytest.raises(ImageFormatError):
        write_image(np.zeros((2, 2)), tmp_path / "x.tif")
    with pytest.raises(ImageFormatError):
        write_image(np.zeros((2, 2, 3)), tmp_path / "x.pgm")
    Image.new("RGBA", (2, 2)).save(tmp_path / "a.png")
    with pytest.raises(ImageFormatError):
        read_image(tmp_path / "a.png")


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        read_image(tmp_path / "nope.pgm")
