"""Synthetic palimpsests with known ground truth, and restoration fidelity metrics.

A synthetic palimpsest is a clean page (background color, optionally a flat
patch or a horizontal gradient standing in for a drawing) with dark ink
strokes written over it. Because the clean page and the exact ink positions
are known, restoration quality can be measured instead of eyeballed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidSpec
from .raster import Channel, HoleMask, RasterImage, Rgb, require_same_size

# Minimum tone gap, on the analysis channel, between the ink and every
# background/drawing color; keeps the overlay histogram safely bimodal.
MIN_TONE_SEPARATION = 32


@dataclass(frozen=True)
class Stroke:
    """Open polyline, rasterized in unit steps along each segment's major axis."""

    points: tuple[tuple[int, int], ...]
    width: int = 1

    def __post_init__(self):
        pts = tuple((int(x), int(y)) for x, y in self.points)
        if not pts:
            raise InvalidSpec("a stroke needs at least one point")
        if self.width not in (1, 2):
            raise InvalidSpec(f"stroke width must be 1 or 2, got {self.width}")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class Drawing:
    """Underlying artwork: nothing, a flat patch, or a horizontal two-color gradient."""

    kind: str = "none"
    color: Rgb | None = None  # patch
    box: tuple[int, int, int, int] | None = None  # patch region x0, y0, x1, y1 inclusive
    left: Rgb | None = None  # gradient endpoints
    right: Rgb | None = None

    def __post_init__(self):
        if self.kind not in ("none", "patch", "gradient"):
            raise InvalidSpec(f"drawing kind must be none, patch or gradient, got {self.kind!r}")
        if self.kind == "patch" and (self.color is None or self.box is None):
            raise InvalidSpec("patch drawing needs color and box")
        if self.kind == "gradient" and (self.left is None or self.right is None):
            raise InvalidSpec("gradient drawing needs left and right colors")

    def colors(self) -> tuple[Rgb, ...]:
        """All drawing colors (gradient columns stay within its endpoints)."""
        if self.kind == "patch":
            return (self.color,)
        if self.kind == "gradient":
            return (self.left, self.right)
        return ()


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic palimpsest.

    Strokes can be given explicitly, generated pseudo-randomly from the seed
    (random_strokes > 0), or both. Randomly placed strokes never touch any
    previously placed stroke and keep one pixel clear of the image borders,
    so each stays an isolated thin line with all its cross-neighbors on the
    canvas. The ink tone must sit at least MIN_TONE_SEPARATION below every
    background and drawing tone on the analysis channel.
    """

    width: int
    height: int
    background: Rgb
    ink_color: Rgb
    drawing: Drawing = field(default_factory=Drawing)
    strokes: tuple[Stroke, ...] = ()
    seed: int = 0
    random_strokes: int = 0
    random_stroke_width: int = 1
    random_stroke_length: tuple[int, int] = (8, 32)
    channel: Channel = Channel.RED

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))
        object.__setattr__(
            self, "random_stroke_length", tuple(int(v) for v in self.random_stroke_length)
        )


def _check_rgb(value, what: str) -> Rgb:
    try:
        r, g, b = (int(c) for c in value)
    except (TypeError, ValueError):
        raise InvalidSpec(f"{what} must be an (r, g, b) triple, got {value!r}") from None
    if any(not 0 <= c <= 255 for c in (r, g, b)):
        raise InvalidSpec(f"{what} components must lie in [0, 255], got {(r, g, b)}")
    return (r, g, b)


def _validate(spec: SynthSpec) -> None:
    if spec.width < 1 or spec.height < 1:
        raise InvalidSpec(f"image must be at least 1x1, got {spec.width}x{spec.height}")
    _check_rgb(spec.background, "background")
    _check_rgb(spec.ink_color, "ink_color")
    for color in spec.drawing.colors():
        _check_rgb(color, "drawing color")
    if spec.drawing.kind == "patch":
        x0, y0, x1, y1 = spec.drawing.box
        if not (0 <= x0 <= x1 < spec.width and 0 <= y0 <= y1 < spec.height):
            raise InvalidSpec(f"patch box {spec.drawing.box} outside {spec.width}x{spec.height}")

    ch = int(spec.channel)
    content = [spec.background[ch]] + [c[ch] for c in spec.drawing.colors()]
    gap = min(content) - spec.ink_color[ch]
    if gap < MIN_TONE_SEPARATION:
        raise InvalidSpec(
            f"ink tone {spec.ink_color[ch]} must sit at least {MIN_TONE_SEPARATION} below "
            f"every content tone on channel {spec.channel.name.lower()} (closest gap {gap})"
        )

    if spec.random_strokes < 0:
        raise InvalidSpec(f"random_strokes must be >= 0, got {spec.random_strokes}")
    if spec.random_stroke_width not in (1, 2):
        raise InvalidSpec(f"random_stroke_width must be 1 or 2, got {spec.random_stroke_width}")
    lo, hi = spec.random_stroke_length
    if not 2 <= lo <= hi:
        raise InvalidSpec(f"random_stroke_length must satisfy 2 <= lo <= hi, got {(lo, hi)}")
    margin = 1 if spec.random_stroke_width == 2 else 0
    if spec.random_strokes and hi > max(spec.width, spec.height) - 2 - margin:
        raise InvalidSpec(
            f"random stroke length up to {hi} cannot fit one pixel inside "
            f"a {spec.width}x{spec.height} canvas"
        )


# --- stroke rasterization ----------------------------------------------------


def _segment_pixels(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Unit steps along the major axis; the minor coordinate rounds half up."""
    steps = max(abs(x1 - x0), abs(y1 - y0))
    if steps == 0:
        return [(x0, y0)]
    pixels = []
    for i in range(steps + 1):
        t = i / steps
        x = math.floor(x0 + (x1 - x0) * t + 0.5)
        y = math.floor(y0 + (y1 - y0) * t + 0.5)
        pixels.append((x, y))
    return pixels


def _stroke_pixels(stroke: Stroke) -> set[tuple[int, int]]:
    pixels: set[tuple[int, int]] = set()
    pts = stroke.points
    if len(pts) == 1:
        segments = [(pts[0], pts[0])]
    else:
        segments = list(zip(pts[:-1], pts[1:]))
    for (x0, y0), (x1, y1) in segments:
        line = _segment_pixels(x0, y0, x1, y1)
        pixels.update(line)
        if stroke.width == 2:
            # thicken one pixel along the segment's minor axis
            if abs(x1 - x0) >= abs(y1 - y0):
                pixels.update((x, y + 1) for x, y in line)
            else:
                pixels.update((x + 1, y) for x, y in line)
    return pixels


def _in_bounds(pixels, width: int, height: int) -> bool:
    return all(0 <= x < width and 0 <= y < height for x, y in pixels)


def _touches(pixels, occupied: np.ndarray) -> bool:
    height, width = occupied.shape
    for x, y in pixels:
        y0, y1 = max(y - 1, 0), min(y + 2, height)
        x0, x1 = max(x - 1, 0), min(x + 2, width)
        if occupied[y0:y1, x0:x1].any():
            return True
    return False


_MAX_PLACEMENT_ATTEMPTS = 200


def _random_stroke(spec: SynthSpec, rng: np.random.Generator) -> Stroke:
    lo, hi = spec.random_stroke_length
    length = int(rng.integers(lo, hi + 1))
    span = length - 1
    margin = 1 if spec.random_stroke_width == 2 else 0
    # horizontal, vertical, diagonal: keep only the orientations that fit.
    # Strokes stay one pixel clear of every border: a border-hugging pixel
    # is missing a cross-neighbor and could never reach 3 known neighbors.
    feasible = []
    for dx, dy in ((span, 0), (0, span), (span, span)):
        max_x = spec.width - 2 - dx - margin
        max_y = spec.height - 2 - dy - margin
        if max_x >= 1 and max_y >= 1:
            feasible.append((dx, dy, max_x, max_y))
    if not feasible:
        raise InvalidSpec(
            f"random stroke of length {length} cannot fit in {spec.width}x{spec.height}"
        )
    dx, dy, max_x, max_y = feasible[int(rng.integers(0, len(feasible)))]
    x0 = int(rng.integers(1, max_x + 1))
    y0 = int(rng.integers(1, max_y + 1))
    return Stroke(points=((x0, y0), (x0 + dx, y0 + dy)), width=spec.random_stroke_width)


def _place_strokes(spec: SynthSpec) -> np.ndarray:
    """Rasterize explicit strokes, then seeded random ones that touch nothing placed."""
    occupied = np.zeros((spec.height, spec.width), dtype=bool)
    for stroke in spec.strokes:
        pixels = _stroke_pixels(stroke)
        if not _in_bounds(pixels, spec.width, spec.height):
            raise InvalidSpec(f"stroke through {stroke.points} leaves the {spec.width}x{spec.height} canvas")
        for x, y in pixels:
            occupied[y, x] = True

    rng = np.random.default_rng(spec.seed)
    placed = 0
    attempts = 0
    while placed < spec.random_strokes:
        if attempts >= _MAX_PLACEMENT_ATTEMPTS * spec.random_strokes:
            raise InvalidSpec(
                f"could only place {placed} of {spec.random_strokes} random strokes "
                f"without contact; lower the count or enlarge the canvas"
            )
        attempts += 1
        pixels = _stroke_pixels(_random_stroke(spec, rng))
        if _touches(pixels, occupied):
            continue
        for x, y in pixels:
            occupied[y, x] = True
        placed += 1
    return occupied


def _render_clean(spec: SynthSpec) -> np.ndarray:
    arr = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    arr[:] = spec.background
    drawing = spec.drawing
    if drawing.kind == "patch":
        x0, y0, x1, y1 = drawing.box
        arr[y0 : y1 + 1, x0 : x1 + 1] = drawing.color
    elif drawing.kind == "gradient":
        left = np.array(drawing.left, dtype=np.float64)
        right = np.array(drawing.right, dtype=np.float64)
        if spec.width == 1:
            t = np.zeros(1)
        else:
            t = np.arange(spec.width) / (spec.width - 1)
        columns = left[None, :] + t[:, None] * (right - left)[None, :]
        arr[:] = np.floor(columns + 0.5).astype(np.uint8)[None, :, :]
    return arr


def generate_palimpsest(spec: SynthSpec) -> tuple[RasterImage, RasterImage, HoleMask]:
    """Build (clean page, page with ink strokes, true ink mask).

    Identical specs (same seed included) give bit-identical outputs.
    Raises InvalidSpec when bounds or tone separation are violated.
    """
    _validate(spec)
    clean = _render_clean(spec)
    truth = _place_strokes(spec)
    overlaid = clean.copy()
    overlaid[truth] = spec.ink_color
    return RasterImage(clean), RasterImage(overlaid), HoleMask(truth)


# --- spec documents ----------------------------------------------------------


def spec_from_json(text: str) -> SynthSpec:
    """Parse a SynthSpec from a JSON document (field names match the type)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"spec is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InvalidSpec("spec document must be a JSON object")

    def require(key):
        if key not in doc:
            raise InvalidSpec(f"spec is missing required field {key!r}")
        return doc[key]

    drawing_doc = doc.get("drawing", {"kind": "none"})
    if not isinstance(drawing_doc, dict) or "kind" not in drawing_doc:
        raise InvalidSpec("drawing must be an object with a 'kind' field")
    kind = drawing_doc["kind"]
    drawing = Drawing(
        kind=kind,
        color=_check_rgb(drawing_doc["color"], "drawing color") if "color" in drawing_doc else None,
        box=tuple(int(v) for v in drawing_doc["box"]) if "box" in drawing_doc else None,
        left=_check_rgb(drawing_doc["left"], "gradient left") if "left" in drawing_doc else None,
        right=_check_rgb(drawing_doc["right"], "gradient right") if "right" in drawing_doc else None,
    )

    strokes = []
    for i, s in enumerate(doc.get("strokes", [])):
        if not isinstance(s, dict) or "points" not in s:
            raise InvalidSpec(f"stroke {i} must be an object with 'points'")
        points = tuple((int(x), int(y)) for x, y in s["points"])
        strokes.append(Stroke(points=points, width=int(s.get("width", 1))))

    channel = doc.get("channel", "red")
    try:
        return SynthSpec(
            width=int(require("width")),
            height=int(require("height")),
            background=_check_rgb(require("background"), "background"),
            ink_color=_check_rgb(require("ink_color"), "ink_color"),
            drawing=drawing,
            strokes=tuple(strokes),
            seed=int(doc.get("seed", 0)),
            random_strokes=int(doc.get("random_strokes", 0)),
            random_stroke_width=int(doc.get("random_stroke_width", 1)),
            random_stroke_length=tuple(doc.get("random_stroke_length", (8, 32))),
            channel=Channel.from_name(channel) if isinstance(channel, str) else Channel(channel),
        )
    except (TypeError, ValueError) as exc:
        raise InvalidSpec(f"bad spec field: {exc}") from None


def load_spec(path) -> SynthSpec:
    """Read a SynthSpec JSON file."""
    return spec_from_json(Path(path).read_text(encoding="utf-8"))


# --- fidelity ----------------------------------------------------------------


@dataclass(frozen=True)
class FidelityMetrics:
    """Restoration quality over the originally-inked pixels.

    mae and max_error cover truth pixels that were actually restored
    (residual holes are excluded there but drive residual_fraction);
    exact_fraction counts truth pixels whose restored value matches the
    clean page bit for bit. An all-residual run reports mae 0 alongside
    residual_fraction 1.0.
    """

    mae: float
    max_error: int
    residual_fraction: float
    exact_fraction: float

    def as_dict(self) -> dict:
        return {
            "mae": self.mae,
            "max_error": self.max_error,
            "residual_fraction": self.residual_fraction,
            "exact_fraction": self.exact_fraction,
        }


def fidelity_metrics(
    restored: RasterImage,
    clean: RasterImage,
    truth_mask: HoleMask,
    residual: HoleMask,
) -> FidelityMetrics:
    """Measure restoration fidelity against the known clean page."""
    require_same_size(restored, clean, truth_mask, residual)
    truth = truth_mask.holes
    n_truth = int(truth.sum())
    if n_truth == 0:
        return FidelityMetrics(mae=0.0, max_error=0, residual_fraction=0.0, exact_fraction=1.0)

    measured = truth & ~residual.holes
    diff = np.abs(
        restored.pixels.astype(np.int16) - clean.pixels.astype(np.int16)
    )
    if measured.any():
        mae = float(diff[measured].mean())
        max_error = int(diff[measured].max())
    else:
        mae = 0.0
        max_error = 0
    exact = (diff == 0).all(axis=2)
    return FidelityMetrics(
        mae=mae,
        max_error=max_error,
        residual_fraction=float((truth & residual.holes).sum() / n_truth),
        exact_fraction=float(exact[truth].sum() / n_truth),
    )
