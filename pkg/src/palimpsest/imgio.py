"""PNG and PPM file I/O.

PPM files are written with exactly the framing ``P6\\n<width> <height>\\n255\\n``
followed by raw RGB bytes, row-major from the top-left; the reader tolerates
arbitrary whitespace and ``#`` comments between header fields, and also accepts
P5 grayscale (expanded to r=g=b). PNG covers standard 8-bit truecolor, gray,
and palette files; alpha is discarded and 16-bit files are rejected rather
than silently quantized.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import MalformedImage, UnsupportedDepth
from .raster import GrayImage, HoleMask, RasterImage

_PNG_SIG = b"\x89PNG\r\n\x1a\n"
_PPM_MAGIC = (b"P6", b"P5")
_WHITESPACE = b" \t\r\n\x0b\x0c"
_FORMATS = ("png", "ppm")


def _detect_format(data: bytes) -> str | None:
    if data[:2] in _PPM_MAGIC:
        return "ppm"
    if data.startswith(_PNG_SIG):
        return "png"
    return None


def load_image(path, fmt: str | None = None) -> RasterImage:
    """Decode a PNG or PPM file into a RasterImage.

    ``fmt`` forces a decoder ("png" or "ppm"); by default the format is
    detected from the file's magic bytes. Raises FileNotFoundError for a
    missing file, MalformedImage for undecodable content, and
    UnsupportedDepth for non-8-bit samples.
    """
    path = Path(path)
    data = path.read_bytes()
    detected = _detect_format(data)
    if fmt is None:
        if detected is None:
            raise MalformedImage(f"{path}: not a PNG or PPM file")
        fmt = detected
    elif fmt not in _FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {_FORMATS}")
    elif detected != fmt:
        raise MalformedImage(f"{path}: not a {fmt} file")
    if fmt == "ppm":
        return RasterImage(_decode_ppm(data, path))
    return RasterImage(_decode_png(data, path))


def save_image(image: RasterImage | GrayImage, path, fmt: str | None = None) -> None:
    """Encode an image to PNG or PPM; the written file decodes to identical pixels.

    ``fmt`` defaults to the path suffix. GrayImage is written as 8-bit
    grayscale PNG, or as P6 with the tone replicated across r=g=b for PPM.
    """
    path = Path(path)
    if fmt is None:
        fmt = path.suffix.lstrip(".").lower()
    if fmt not in _FORMATS:
        raise ValueError(f"cannot infer format for {path}; expected one of {_FORMATS}")
    if fmt == "ppm":
        path.write_bytes(_encode_ppm(image))
        return
    if isinstance(image, GrayImage):
        pil = Image.fromarray(image.values, mode="L")
    else:
        pil = Image.fromarray(image.pixels, mode="RGB")
    pil.save(path, format="PNG")


def save_mask(mask: HoleMask, path) -> None:
    """Write a hole mask as an image: holes white (255), non-holes black (0)."""
    save_image(GrayImage(np.where(mask.holes, 255, 0).astype(np.uint8)), path)


def load_mask(path) -> HoleMask:
    """Read a mask image written by save_mask; tones >= 128 count as holes."""
    image = load_image(path)
    return HoleMask(image.pixels[:, :, 0] >= 128)


# --- PPM codec -------------------------------------------------------------


def _decode_ppm(data: bytes, path) -> np.ndarray:
    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(data):
            c = data[pos : pos + 1]
            if c in _WHITESPACE:
                pos += 1
            elif c == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\r", b"\n"):
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and data[pos : pos + 1] not in _WHITESPACE + b"#":
            pos += 1
        if start == pos:
            raise MalformedImage(f"{path}: truncated PPM header")
        return data[start:pos]

    def next_int(name: str) -> int:
        token = next_token()
        try:
            return int(token)
        except ValueError:
            raise MalformedImage(f"{path}: bad PPM {name} {token!r}") from None

    magic = next_token()
    if magic not in _PPM_MAGIC:
        raise MalformedImage(f"{path}: unsupported PPM magic {magic!r}")
    channels = 3 if magic == b"P6" else 1
    width = next_int("width")
    height = next_int("height")
    maxval = next_int("maxval")
    if width < 1 or height < 1:
        raise MalformedImage(f"{path}: bad PPM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedDepth(f"{path}: PPM maxval {maxval} unsupported; only 255 (8-bit)")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedImage(f"{path}: missing whitespace after PPM maxval")
    pos += 1
    need = width * height * channels
    raw = data[pos : pos + need]
    if len(raw) < need:
        raise MalformedImage(f"{path}: truncated PPM pixel data")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, channels)
    if channels == 1:
        arr = np.repeat(arr, 3, axis=2)
    return arr


def _encode_ppm(image: RasterImage | GrayImage) -> bytes:
    if isinstance(image, GrayImage):
        arr = np.repeat(image.values[:, :, None], 3, axis=2)
    else:
        arr = image.pixels
    header = f"P6\n{arr.shape[1]} {arr.shape[0]}\n255\n".encode("ascii")
    return header + arr.tobytes()


# --- PNG codec -------------------------------------------------------------

# IHDR layout: 8-byte signature, 4-byte length, b"IHDR", width, height, then
# one bit-depth byte at offset 24.
_PNG_DEPTH_OFFSET = 24

_HIGH_DEPTH_MODES = ("I", "I;16", "I;16B", "I;16L", "I;16N", "F")


def _decode_png(data: bytes, path) -> np.ndarray:
    if len(data) <= _PNG_DEPTH_OFFSET:
        raise MalformedImage(f"{path}: truncated PNG header")
    if data[_PNG_DEPTH_OFFSET] == 16:
        raise UnsupportedDepth(f"{path}: 16-bit PNG rejected; only 8-bit supported")
    try:
        with Image.open(io.BytesIO(data)) as pil:
            pil.load()
            if pil.mode in _HIGH_DEPTH_MODES:
                raise UnsupportedDepth(f"{path}: PNG mode {pil.mode} rejected; only 8-bit supported")
            rgb = pil.convert("RGB")
            return np.asarray(rgb, dtype=np.uint8)
    except UnidentifiedImageError:
        raise MalformedImage(f"{path}: undecodable PNG") from None
    except (OSError, SyntaxError) as exc:
        raise MalformedImage(f"{path}: {exc}") from None
