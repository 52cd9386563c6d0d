"""Exception types shared across the package."""


class PalimpsestError(Exception):
    """Base class for all errors raised by this package."""


class MalformedImage(PalimpsestError):
    """File is not a decodable image: bad magic, bad header, or truncated data."""


class UnsupportedDepth(PalimpsestError):
    """Image carries a sample depth other than 8 bits per channel."""


class InvalidWindow(PalimpsestError):
    """Histogram smoothing window must be an odd integer in [1, 31]."""


class NotBimodal(PalimpsestError):
    """Histogram lacks the two-peak structure needed to pick a threshold automatically."""


class AllPixelsMasked(PalimpsestError):
    """Background estimation needs at least one unmasked pixel."""


class DimensionMismatch(PalimpsestError):
    """Images and masks used together must share width and height."""


class InvalidSpec(PalimpsestError):
    """Synthetic palimpsest spec violates bounds, ranges, or tone separation."""
