"""Per-channel tone histograms and the two-peak automatic threshold rule.

A scan of dark ink over a lighter drawing produces a bimodal tone histogram:
a large peak in the bright region (paper and drawing) and a small one in the
dark region (ink). The automatic threshold sits at the valley between the
two, so that everything below it can be treated as ink.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidWindow, NotBimodal
from .raster import Channel, RasterImage

DEFAULT_SMOOTHING_WINDOW = 5

# Smallest smoothed dark-peak height accepted as a genuine ink peak, as a
# fraction of total pixels; below this, auto mode refuses rather than guessing.
DARK_PEAK_MIN_FRACTION = 0.001

# Tones >= this belong to the bright (paper/drawing) half of the histogram.
BRIGHT_HALF_START = 128


@dataclass(frozen=True, eq=False)
class ChannelHistogram:
    """256 bins counting how many pixels carry each tone of one channel."""

    bins: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.bins)
        if arr.shape != (256,):
            raise ValueError(f"expected 256 bins, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"bins must be integer counts, got dtype {arr.dtype}")
        if arr.size and int(arr.min()) < 0:
            raise ValueError("bin counts must be non-negative")
        arr = arr.astype(np.int64, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "bins", arr)

    @property
    def total(self) -> int:
        """Total pixel count (sum of all bins)."""
        return int(self.bins.sum())

    def __eq__(self, other) -> bool:
        return isinstance(other, ChannelHistogram) and np.array_equal(self.bins, other.bins)


@dataclass(frozen=True)
class ThresholdReport:
    """The chosen removal threshold plus the peak/valley analysis behind it.

    In auto mode the threshold is the valley tone and dark_peak < valley
    <= bright_peak holds; in manual mode the threshold echoes the caller's
    value and the analysis fields may be absent.
    """

    threshold: int
    mode: str
    dark_peak: int | None = None
    bright_peak: int | None = None
    valley: int | None = None

    def __post_init__(self):
        if self.mode not in ("auto", "manual"):
            raise ValueError(f"mode must be 'auto' or 'manual', got {self.mode!r}")
        if not 1 <= self.threshold <= 255:
            raise ValueError(f"threshold must lie in [1, 255], got {self.threshold}")
        if self.mode == "auto":
            if self.dark_peak is None or self.bright_peak is None or self.valley is None:
                raise ValueError("auto mode requires dark_peak, bright_peak and valley")
            if not self.dark_peak < self.valley <= self.bright_peak:
                raise ValueError(
                    f"expected dark_peak < valley <= bright_peak, got "
                    f"{self.dark_peak}, {self.valley}, {self.bright_peak}"
                )
            if self.threshold != self.valley:
                raise ValueError("auto mode threshold must equal the valley")


def channel_histogram(image: RasterImage, channel: Channel) -> ChannelHistogram:
    """Count, for each tone 0..255, the pixels whose selected channel equals it."""
    values = image.pixels[:, :, int(channel)]
    return ChannelHistogram(np.bincount(values.ravel(), minlength=256))


def smooth_histogram(hist: ChannelHistogram, window: int = DEFAULT_SMOOTHING_WINDOW) -> np.ndarray:
    """Centered moving mean of the bins; returns real-valued bins.

    The window must be odd and in [1, 31]; at the array ends it shrinks to
    whatever fits inside [0, 255].
    """
    if not isinstance(window, int) or isinstance(window, bool):
        raise InvalidWindow(f"window must be an int, got {window!r}")
    if window % 2 == 0 or not 1 <= window <= 31:
        raise InvalidWindow(f"window must be odd and in [1, 31], got {window}")
    bins = hist.bins.astype(np.float64)
    half = window // 2
    idx = np.arange(256)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half, 255)
    csum = np.concatenate(([0.0], np.cumsum(bins)))
    return (csum[hi + 1] - csum[lo]) / (hi - lo + 1)


def _plateau_maxima(values: np.ndarray) -> list[tuple[int, float]]:
    """Local maxima of a 1-D array, tolerant of plateaus.

    A maximal run of equal values is a maximum when both adjacent values are
    strictly lower (array ends count as lower); its position is the run's
    midpoint. Returns (position, height) pairs in position order.
    """
    maxima = []
    n = len(values)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        left_lower = i == 0 or values[i - 1] < values[i]
        right_lower = j == n - 1 or values[j + 1] < values[j]
        if left_lower and right_lower:
            maxima.append(((i + j) // 2, float(values[i])))
        i = j + 1
    return maxima


def _highest(maxima: list[tuple[int, float]]) -> tuple[int, float]:
    # ties on height break toward the lowest tone index
    return max(maxima, key=lambda m: (m[1], -m[0]))


def auto_threshold(hist: ChannelHistogram) -> ThresholdReport:
    """Pick the removal threshold at the valley between the two histogram peaks.

    Peaks are located on the window-5 smoothed histogram: the bright peak is
    the highest local maximum at tone >= 128, the dark peak the highest local
    maximum below it whose smoothed height reaches 0.1% of all pixels. The
    valley is the lowest-count raw bin strictly between the peaks, ties
    broken toward the lowest tone so fewer drawing pixels are sacrificed.

    Raises NotBimodal when either peak is missing; the caller must then
    supply a manual threshold.
    """
    total = hist.total
    if total == 0:
        raise ValueError("histogram of an empty image")
    smoothed = smooth_histogram(hist, DEFAULT_SMOOTHING_WINDOW)
    maxima = _plateau_maxima(smoothed)

    bright_candidates = [m for m in maxima if m[0] >= BRIGHT_HALF_START]
    if not bright_candidates:
        raise NotBimodal("no bright-region peak; supply a manual threshold")
    bright_peak, _ = _highest(bright_candidates)

    # total/1000, not total*0.001: division keeps the 0.1% boundary exact
    floor = total / (1.0 / DARK_PEAK_MIN_FRACTION)
    dark_candidates = [m for m in maxima if m[0] < bright_peak and m[1] >= floor]
    if not dark_candidates:
        raise NotBimodal(
            "no significant dark-region peak; supply a manual threshold"
        )
    dark_peak, _ = _highest(dark_candidates)

    if dark_peak + 1 >= bright_peak:
        valley = bright_peak
    else:
        between = hist.bins[dark_peak + 1 : bright_peak]
        valley = dark_peak + 1 + int(np.argmin(between))
    return ThresholdReport(
        threshold=valley,
        mode="auto",
        dark_peak=dark_peak,
        bright_peak=bright_peak,
        valley=valley,
    )


def write_histogram_csv(
    path,
    red: ChannelHistogram,
    green: ChannelHistogram,
    blue: ChannelHistogram,
) -> None:
    """Write the three channel histograms as CSV: "bin,red,green,blue" + 256 rows."""
    lines = ["bin,red,green,blue"]
    for tone in range(256):
        lines.append(f"{tone},{red.bins[tone]},{green.bins[tone]},{blue.bins[tone]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
