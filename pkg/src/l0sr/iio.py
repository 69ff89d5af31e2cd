"""Image file I/O: binary PGM, 8-bit PNG and raw float64 planes.

Raw files carry a 16-byte little-endian header (magic ``b"L0RF"``, height,
width, channels as uint32) followed by float64 samples in C order of an
``(H, W)`` or ``(H, W, C)`` array.
"""
import os
import struct

import numpy as np

from .errors import ImageFormatError, TruncatedImageError
from .image import as_image

RAW_MAGIC = b"L0RF"
_RAW_HEADER = struct.Struct("<4sIII")


def to_uint8(img):
    return np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)


def from_uint8(arr):
    return np.asarray(arr, dtype=np.float64) / 255.0


def _read_pgm(data):
    # header tokens may be separated by whitespace and interleaved with comments
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise TruncatedImageError("PGM header ends early")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1  # single whitespace before the raster
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise ImageFormatError("malformed PGM header") from None
    if maxval != 255:
        raise ImageFormatError(f"only 8-bit PGM supported (maxval {maxval})")
    if width < 1 or height < 1:
        raise ImageFormatError("PGM has non-positive dimensions")
    raster = data[pos:pos + width * height]
    if len(raster) < width * height:
        raise TruncatedImageError(f"PGM raster has {len(raster)} of {width * height} bytes")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width)


def _read_png(path):
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("L", "RGB"):
                arr = np.asarray(im)
            elif im.mode in ("P", "1"):
                arr = np.asarray(im.convert("L" if im.mode == "1" else "RGB"))
            else:
                raise ImageFormatError(f"unsupported PNG mode {im.mode}")
    except UnidentifiedImageError:
        raise ImageFormatError(f"{path}: not a readable PNG") from None
    except (OSError, SyntaxError) as exc:
        if "truncated" in str(exc).lower():
            raise TruncatedImageError(f"{path}: {exc}") from None
        raise ImageFormatError(f"{path}: {exc}") from None
    return arr


def read_raw(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _RAW_HEADER.size:
        raise TruncatedImageError("raw file shorter than its header")
    magic, h, w, c = _RAW_HEADER.unpack_from(data)
    if magic != RAW_MAGIC:
        raise ImageFormatError("bad raw magic")
    n = h * w * c
    payload = data[_RAW_HEADER.size:]
    if len(payload) < 8 * n:
        raise TruncatedImageError(f"raw payload has {len(payload)} of {8 * n} bytes")
    arr = np.frombuffer(payload[:8 * n], dtype="<f8").astype(np.float64)
    return arr.reshape((h, w) if c == 1 else (h, w, c))


def write_raw(img, path):
    img = np.asarray(img, dtype=np.float64)
    c = 1 if img.ndim == 2 else img.shape[2]
    with open(path, "wb") as fh:
        fh.write(_RAW_HEADER.pack(RAW_MAGIC, img.shape[0], img.shape[1], c))
        fh.write(np.ascontiguousarray(img, dtype="<f8").tobytes())


def read_image(path):
    """Read a PGM (P5), PNG or raw float file into a float64 image in ``[0, 1]``."""
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".f64", ".raw"):
        return read_raw(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head[:2] == b"P5":
        with open(path, "rb") as fh:
            return from_uint8(_read_pgm(fh.read()))
    if head == b"\x89PNG\r\n\x1a\n":
        return from_uint8(_read_png(path))
    if head[:4] == RAW_MAGIC:
        return read_raw(path)
    raise ImageFormatError(f"{path}: unsupported image format")


def write_image(img, path):
    """Write ``img`` as 8-bit PGM/PNG (by extension) or raw float64 (``.f64``)."""
    img = as_image(img)
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".f64", ".raw"):
        write_raw(img, path)
        return
    data = to_uint8(img)
    if ext == ".pgm":
        if data.ndim != 2:
            raise ImageFormatError("PGM holds a single channel only")
        h, w = data.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(data.tobytes())
        return
    if ext == ".png":
        from PIL import Image

        if data.ndim == 3 and data.shape[2] != 3:
            raise ImageFormatError("PNG export supports 1 or 3 channels")
        Image.fromarray(data, mode="L" if data.ndim == 2 else "RGB").save(path, format="PNG")
        return
    raise ImageFormatError(f"unsupported output extension {ext!r}")
