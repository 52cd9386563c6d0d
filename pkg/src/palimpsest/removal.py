"""Threshold-based ink removal, its verification, and background filling.

Removal whitens every pixel whose selected channel tone falls strictly below
the threshold and records those positions in a hole mask. The mask, not the
white sentinel color, is authoritative: a legitimately white drawing pixel is
never treated as a hole.
"""
from __future__ import annotations

import numpy as np

from .errors import AllPixelsMasked
from .histogram import channel_histogram
from .raster import Channel, HoleMask, RasterImage, Rgb, require_same_size, validate_rgb

WHITE = (255, 255, 255)


def apply_threshold(
    image: RasterImage, channel: Channel, threshold: int
) -> tuple[RasterImage, HoleMask]:
    """Whiten every pixel whose selected channel tone is strictly below threshold.

    Pixels with tone equal to the threshold survive. Returns the new image
    and the mask of removed pixels.
    """
    if not 1 <= threshold <= 255:
        raise ValueError(f"threshold must lie in [1, 255], got {threshold}")
    holes = image.pixels[:, :, int(channel)] < threshold
    out = image.pixels.copy()
    out[holes] = 255
    return RasterImage(out), HoleMask(holes)


def verify_dark_peak_removed(masked_image: RasterImage, channel: Channel, threshold: int) -> bool:
    """True iff no pixel of the masked image has a channel tone below the threshold."""
    bins = channel_histogram(masked_image, channel).bins
    return not bins[:threshold].any()


def estimate_background(image: RasterImage, mask: HoleMask) -> Rgb:
    """Per-channel median tone over non-hole pixels.

    With an even count the lower of the two middle values is taken, keeping
    the result an actual 8-bit tone. Raises AllPixelsMasked when no pixel
    survives.
    """
    require_same_size(image, mask)
    known = image.pixels[~mask.holes]
    if known.shape[0] == 0:
        raise AllPixelsMasked("cannot estimate a background color: every pixel is masked")
    middle = (known.shape[0] - 1) // 2
    ordered = np.sort(known, axis=0)
    r, g, b = ordered[middle]
    return (int(r), int(g), int(b))


def fill_background(image: RasterImage, mask: HoleMask, color) -> RasterImage:
    """Replace hole pixels with the given color; non-hole pixels are untouched."""
    require_same_size(image, mask)
    rgb = validate_rgb(color, "background color")
    out = image.pixels.copy()
    out[mask.holes] = rgb
    return RasterImage(out)
