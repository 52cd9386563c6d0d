"""Core raster types: 8-bit RGB images, grayscale images, and hole masks.

All types wrap read-only numpy arrays, so constructed values are safe to
share across threads and every operation returns a fresh value instead of
mutating its input.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

Rgb = tuple[int, int, int]


class Channel(enum.IntEnum):
    """RGB channel selector; the enum value is the channel's array index."""

    RED = 0
    GREEN = 1
    BLUE = 2

    @classmethod
    def from_name(cls, name: str) -> "Channel":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(
                f"unknown channel {name!r}; expected red, green or blue"
            ) from None


def validate_rgb(color, what: str = "color") -> Rgb:
    """Normalize ``color`` to an (r, g, b) tuple of ints in [0, 255]."""
    try:
        r, g, b = color
    except (TypeError, ValueError):
        raise ValueError(f"{what} must be an (r, g, b) triple, got {color!r}") from None
    triple = (int(r), int(g), int(b))
    if any(not 0 <= c <= 255 for c in triple):
        raise ValueError(f"{what} components must lie in [0, 255], got {triple}")
    return triple


def _frozen_uint8(values, what: str) -> np.ndarray:
    """Copy ``values`` into a read-only uint8 array, rejecting out-of-range tones."""
    arr = np.asarray(values)
    if arr.dtype == np.bool_ or not np.issubdtype(arr.dtype, np.integer):
        raise ValueError(f"{what} must be integers, got dtype {arr.dtype}")
    if arr.size and (int(arr.min()) < 0 or int(arr.max()) > 255):
        raise ValueError(f"{what} must lie in [0, 255]")
    out = arr.astype(np.uint8, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class RasterImage:
    """A height x width x 3 grid of 8-bit RGB pixels, row-major, top-left origin."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = _frozen_uint8(self.pixels, "pixel components")
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected pixel array of shape (height, width, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", arr)

    @classmethod
    def full(cls, width: int, height: int, color) -> "RasterImage":
        """Uniform image of the given color."""
        r, g, b = validate_rgb(color)
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[..., 0], arr[..., 1], arr[..., 2] = r, g, b
        return cls(arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def pixel(self, x: int, y: int) -> Rgb:
        """The (r, g, b) triple at column x, row y."""
        r, g, b = self.pixels[y, x]
        return (int(r), int(g), int(b))

    def __eq__(self, other) -> bool:
        return isinstance(other, RasterImage) and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class GrayImage:
    """A height x width grid of 8-bit tones."""

    values: np.ndarray

    def __post_init__(self):
        arr = _frozen_uint8(self.values, "gray values")
        if arr.ndim != 2:
            raise ValueError(f"expected value array of shape (height, width), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "values", arr)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class HoleMask:
    """A boolean height x width grid; True marks a removed (hole) pixel."""

    holes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.holes)
        if arr.dtype != np.bool_:
            raise ValueError(f"holes must be a boolean array, got dtype {arr.dtype}")
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected hole array of shape (height, width), got {arr.shape}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "holes", arr)

    @classmethod
    def empty(cls, width: int, height: int) -> "HoleMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.holes.shape[1]

    @property
    def height(self) -> int:
        return self.holes.shape[0]

    @property
    def count(self) -> int:
        """Number of hole pixels."""
        return int(self.holes.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, HoleMask) and np.array_equal(self.holes, other.holes)


def require_same_size(*items) -> tuple[int, int]:
    """Return the shared (width, height), raising DimensionMismatch otherwise."""
    sizes = {(item.width, item.height) for item in items}
    if len(sizes) != 1:
        raise DimensionMismatch(f"mismatched dimensions: {sorted(sizes)}")
    return sizes.pop()


def extract_channel_gray(image: RasterImage, channel: Channel) -> GrayImage:
    """Grayscale image built from one channel: each value is that pixel's channel tone."""
    return GrayImage(image.pixels[:, :, int(channel)])
