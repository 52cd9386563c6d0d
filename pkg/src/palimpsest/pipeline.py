"""End-to-end restoration pipeline and its machine-readable report.

Stage order: load, histograms, threshold selection, ink removal, neighbor
interpolation, then an optional background fill applied to whatever holes
interpolation could not reach. Running with max_iters=0 and an auto fill
therefore reproduces the flat-fill treatment, while the default settings
reproduce the interpolation treatment.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .errors import NotBimodal
from .histogram import ThresholdReport, auto_threshold, channel_histogram, write_histogram_csv
from .imgio import load_image, load_mask, save_image, save_mask
from .inpaint import InpaintParams, InpaintResult, inpaint
from .raster import Channel, RasterImage, Rgb, extract_channel_gray, require_same_size
from .removal import apply_threshold, estimate_background, fill_background, verify_dark_peak_removed
from .synth import FidelityMetrics, fidelity_metrics, generate_palimpsest, load_spec

AUTO = "auto"


@dataclass(frozen=True)
class RestoreConfig:
    """Settings for one restoration run.

    threshold None means auto (histogram valley). max_iters None means the
    pixel-count default; 0 skips interpolation entirely so a fill color
    covers every hole. fill is None (leave holes white), "auto" (estimate
    the background from surviving pixels) or an explicit RGB triple.
    """

    input_path: Path
    out_dir: Path
    channel: Channel = Channel.RED
    threshold: int | None = None
    neighborhood: int = 4
    min_known: int = 3
    max_iters: int | None = None
    fill: Rgb | str | None = None
    gray_channel: Channel | None = Channel.BLUE
    emit_histograms: bool = False
    emit_mask: bool = False
    report_path: Path | None = None

    def __post_init__(self):
        object.__setattr__(self, "input_path", Path(self.input_path))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if self.report_path is not None:
            object.__setattr__(self, "report_path", Path(self.report_path))
        if self.threshold is not None and not 1 <= self.threshold <= 255:
            raise ValueError(f"threshold must lie in [1, 255], got {self.threshold}")
        if self.max_iters is not None and self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if isinstance(self.fill, str) and self.fill != AUTO:
            raise ValueError(f"fill must be None, 'auto' or an RGB triple, got {self.fill!r}")


@dataclass(frozen=True)
class RestorationReport:
    """What a restoration run did: threshold, pixel accounting, outputs, timings.

    masked == filled + residual always holds; every manifest path exists
    once the run returns.
    """

    threshold_report: ThresholdReport
    total_pixels: int
    masked_pixels: int
    filled_pixels: int
    residual_pixels: int
    iterations_run: int
    fills_per_iteration: tuple[int, ...]
    manifest: tuple[str, ...]
    timings_ms: dict[str, float] = field(compare=False)

    def as_dict(self) -> dict:
        tr = self.threshold_report
        return {
            "threshold": {
                "mode": tr.mode,
                "threshold": tr.threshold,
                "dark_peak": tr.dark_peak,
                "bright_peak": tr.bright_peak,
                "valley": tr.valley,
            },
            "pixels": {
                "total": self.total_pixels,
                "masked": self.masked_pixels,
                "filled": self.filled_pixels,
                "residual": self.residual_pixels,
            },
            "iterations_run": self.iterations_run,
            "fills_per_iteration": list(self.fills_per_iteration),
            "manifest": list(self.manifest),
            "timings_ms": self.timings_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"


class _Stopwatch:
    def __init__(self):
        self.timings: dict[str, float] = {}
        self._last = time.perf_counter()

    def lap(self, stage: str) -> None:
        now = time.perf_counter()
        self.timings[stage] = round((now - self._last) * 1000.0, 3)
        self._last = now


def _resolve_threshold(image: RasterImage, config: RestoreConfig) -> ThresholdReport:
    if config.threshold is not None:
        return ThresholdReport(threshold=config.threshold, mode="manual")
    hist = channel_histogram(image, config.channel)
    try:
        return auto_threshold(hist)
    except NotBimodal as exc:
        raise NotBimodal(
            f"{exc}; pass --threshold with an explicit value to override"
        ) from None


def _resolve_fill_color(config: RestoreConfig, masked: RasterImage, mask) -> Rgb:
    if config.fill == AUTO:
        return estimate_background(masked, mask)
    return config.fill


def run_restore(config: RestoreConfig) -> RestorationReport:
    """Execute the full restoration and write all requested artifacts.

    Returns the report; also writes it as JSON when a report path is set,
    along with diagnostic figures next to the other outputs.
    """
    watch = _Stopwatch()
    image = load_image(config.input_path)
    watch.lap("load")

    input_hists = tuple(channel_histogram(image, ch) for ch in Channel)
    watch.lap("histograms")

    threshold_report = _resolve_threshold(image, config)
    watch.lap("threshold")

    masked_image, mask = apply_threshold(image, config.channel, threshold_report.threshold)
    assert verify_dark_peak_removed(masked_image, config.channel, threshold_report.threshold)
    watch.lap("removal")

    if config.max_iters == 0:
        result = InpaintResult(
            image=masked_image, residual_mask=mask, iterations_run=0, fills_per_iteration=()
        )
    else:
        params = InpaintParams(
            neighborhood=config.neighborhood,
            min_known=config.min_known,
            max_iters=config.max_iters,
        )
        result = inpaint(masked_image, mask, params)
    watch.lap("inpaint")

    restored = result.image
    if config.fill is not None and result.residual_mask.count > 0:
        color = _resolve_fill_color(config, masked_image, mask)
        restored = fill_background(restored, result.residual_mask, color)
    watch.lap("fill")

    config.out_dir.mkdir(parents=True, exist_ok=True)
    manifest: list[Path] = []

    def emit(name: str, writer) -> Path:
        path = config.out_dir / name
        writer(path)
        manifest.append(path)
        return path

    emit("restored.png", lambda p: save_image(restored, p))
    if config.gray_channel is not None:
        gray = extract_channel_gray(restored, config.gray_channel)
        emit("restored_gray.png", lambda p: save_image(gray, p))
    if config.emit_mask:
        emit("mask.png", lambda p: save_mask(mask, p))
        # the residual mask is what run_eval wants; restore is its only producer
        emit("mask_residual.png", lambda p: save_mask(result.residual_mask, p))
    masked_hists = None
    if config.emit_histograms or config.report_path is not None:
        masked_hists = tuple(channel_histogram(masked_image, ch) for ch in Channel)
    if config.emit_histograms:
        emit("input_histogram.csv", lambda p: write_histogram_csv(p, *input_hists))
        emit("masked_histogram.csv", lambda p: write_histogram_csv(p, *masked_hists))
    watch.lap("save")

    if config.report_path is not None:
        from . import figures

        emit(
            "histograms.png",
            lambda p: figures.render_histograms(
                p, input_hists, masked_hists, threshold_report.threshold
            ),
        )
        emit(
            "fill_curve.png",
            lambda p: figures.render_fill_curve(p, result.fills_per_iteration),
        )
        watch.lap("figures")

    filled = sum(result.fills_per_iteration)
    report = RestorationReport(
        threshold_report=threshold_report,
        total_pixels=image.width * image.height,
        masked_pixels=mask.count,
        filled_pixels=filled,
        residual_pixels=result.residual_mask.count,
        iterations_run=result.iterations_run,
        fills_per_iteration=result.fills_per_iteration,
        manifest=tuple(str(p) for p in manifest + ([config.report_path] if config.report_path else [])),
        timings_ms=watch.timings,
    )
    if config.report_path is not None:
        config.report_path.parent.mkdir(parents=True, exist_ok=True)
        config.report_path.write_text(report.to_json(), encoding="utf-8")
    return report


def run_synth(spec_path, out_dir) -> dict:
    """Generate a synthetic palimpsest triple and write it to out_dir."""
    spec = load_spec(spec_path)
    clean, overlaid, truth = generate_palimpsest(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "clean": out / "clean.png",
        "overlaid": out / "overlaid.png",
        "truth_mask": out / "truth_mask.png",
    }
    save_image(clean, paths["clean"])
    save_image(overlaid, paths["overlaid"])
    save_mask(truth, paths["truth_mask"])
    return {key: str(path) for key, path in paths.items()}


def run_eval(restored_path, clean_path, truth_mask_path, residual_mask_path) -> FidelityMetrics:
    """Score a restored image against its known clean original."""
    restored = load_image(restored_path)
    clean = load_image(clean_path)
    truth = load_mask(truth_mask_path)
    residual = load_mask(residual_mask_path)
    require_same_size(restored, clean, truth, residual)
    return fidelity_metrics(restored, clean, truth, residual)
