"""Iterative nearest-neighbor hole filling.

Each pass is synchronous: fill decisions and averages read only the state
from before the pass, so any traversal order or parallel partition of the
pixels produces bit-identical output. A hole pixel with at least
``min_known`` non-hole neighbors is replaced by the per-channel arithmetic
mean of all its non-hole neighbors, rounded half away from zero. Passes
repeat until one fills nothing or the iteration cap is reached; holes that
never gain enough known neighbors (blocks two or more pixels thick, closed
thin loops under the 4-neighborhood) stay in the residual mask rather than
being invented.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import HoleMask, RasterImage, require_same_size

_OFFSETS_N4 = ((-1, 0), (1, 0), (0, -1), (0, 1))
_OFFSETS_N8 = _OFFSETS_N4 + ((-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class InpaintParams:
    """Neighborhood shape, fill requirement, and iteration cap.

    neighborhood 4 is the edge-adjacent (von Neumann) neighborhood,
    8 adds the diagonals. max_iters None means width*height of the
    target image, enough for any fixed point.
    """

    neighborhood: int = 4
    min_known: int = 3
    max_iters: int | None = None

    def __post_init__(self):
        if self.neighborhood not in (4, 8):
            raise ValueError(f"neighborhood must be 4 or 8, got {self.neighborhood}")
        if not 1 <= self.min_known <= self.neighborhood:
            raise ValueError(
                f"min_known must lie in [1, {self.neighborhood}], got {self.min_known}"
            )
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")

    @property
    def offsets(self) -> tuple[tuple[int, int], ...]:
        return _OFFSETS_N8 if self.neighborhood == 8 else _OFFSETS_N4


@dataclass(frozen=True)
class InpaintResult:
    """Final image, the holes that could not be filled, and per-pass accounting."""

    image: RasterImage
    residual_mask: HoleMask
    iterations_run: int
    fills_per_iteration: tuple[int, ...]

    def __post_init__(self):
        fills = tuple(int(f) for f in self.fills_per_iteration)
        object.__setattr__(self, "fills_per_iteration", fills)
        if self.iterations_run != len(fills):
            raise ValueError(
                f"iterations_run {self.iterations_run} != {len(fills)} recorded passes"
            )
        # only the last pass may be unproductive (the fixed-point probe)
        if any(f <= 0 for f in fills[:-1]) or (fills and fills[-1] < 0):
            raise ValueError(f"bad per-pass fill counts {fills}")


def inpaint_step(
    image: RasterImage, mask: HoleMask, params: InpaintParams = InpaintParams()
) -> tuple[RasterImage, HoleMask, int]:
    """One synchronous fill pass; returns (image, mask, filled_count).

    Every decision reads the pre-pass state: a hole is filled when it has at
    least params.min_known non-hole neighbors, with the per-channel mean of
    all its non-hole neighbors, rounded half away from zero. Pixels filled in
    this pass do not count as known for other holes until the next pass.
    """
    height, width = image.height, image.width
    require_same_size(image, mask)

    known = ~mask.holes
    values = image.pixels.astype(np.int32)
    values *= known[:, :, None]  # hole tones must not leak into the sums

    padded_known = np.pad(known, 1)
    padded_values = np.pad(values, ((1, 1), (1, 1), (0, 0)))
    count = np.zeros((height, width), dtype=np.int32)
    total = np.zeros((height, width, 3), dtype=np.int32)
    for dy, dx in params.offsets:
        count += padded_known[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]
        total += padded_values[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width, :]

    fill = mask.holes & (count >= params.min_known)
    filled = int(fill.sum())
    if filled == 0:
        return image, mask, 0

    out = image.pixels.copy()
    c = count[fill][:, None]
    # integer mean rounded half away from zero (all values non-negative)
    out[fill] = ((2 * total[fill] + c) // (2 * c)).astype(np.uint8)
    return RasterImage(out), HoleMask(mask.holes & ~fill), filled


def inpaint(
    image: RasterImage, mask: HoleMask, params: InpaintParams = InpaintParams()
) -> InpaintResult:
    """Run fill passes to a fixed point (a pass that fills nothing) or the cap.

    The hole count never increases, a filled pixel never reverts, and with
    the default cap the loop always terminates at the fixed point.
    """
    require_same_size(image, mask)
    cap = params.max_iters if params.max_iters is not None else image.width * image.height
    fills: list[int] = []
    current, holes = image, mask
    for _ in range(cap):
        current, holes, filled = inpaint_step(current, holes, params)
        fills.append(filled)
        if filled == 0:
            break
    return InpaintResult(current, holes, len(fills), tuple(fills))


def residual_stats(result: InpaintResult) -> tuple[int, float]:
    """Residual hole count and its fraction of all image pixels."""
    count = result.residual_mask.count
    return count, count / (result.image.width * result.image.height)
