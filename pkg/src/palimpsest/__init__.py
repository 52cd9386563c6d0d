"""Palimpsest restoration: strip dark ink from a scan, repair the holes.

The method assumes the page's tone histogram is bimodal: a small dark peak
from the ink and a large bright peak from paper and drawing. Everything
below the valley between them is removed, then the holes are repaired by
iterative neighbor averaging (or painted with a flat background color).
A synthetic-palimpsest generator provides ground truth for measuring how
faithful the repair is.
"""
from .errors import (
    AllPixelsMasked,
    DimensionMismatch,
    InvalidSpec,
    InvalidWindow,
    MalformedImage,
    NotBimodal,
    PalimpsestError,
    UnsupportedDepth,
)
from .histogram import (
    ChannelHistogram,
    ThresholdReport,
    auto_threshold,
    channel_histogram,
    smooth_histogram,
    write_histogram_csv,
)
from .imgio import load_image, load_mask, save_image, save_mask
from .inpaint import InpaintParams, InpaintResult, inpaint, inpaint_step, residual_stats
from .pipeline import RestorationReport, RestoreConfig, run_eval, run_restore, run_synth
from .raster import Channel, GrayImage, HoleMask, RasterImage, extract_channel_gray
from .removal import (
    apply_threshold,
    estimate_background,
    fill_background,
    verify_dark_peak_removed,
)
from .synth import (
    Drawing,
    FidelityMetrics,
    Stroke,
    SynthSpec,
    fidelity_metrics,
    generate_palimpsest,
    load_spec,
    spec_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "AllPixelsMasked",
    "Channel",
    "ChannelHistogram",
    "DimensionMismatch",
    "Drawing",
    "FidelityMetrics",
    "GrayImage",
    "HoleMask",
    "InpaintParams",
    "InpaintResult",
    "InvalidSpec",
    "InvalidWindow",
    "MalformedImage",
    "NotBimodal",
    "PalimpsestError",
    "RasterImage",
    "RestorationReport",
    "RestoreConfig",
    "Stroke",
    "SynthSpec",
    "ThresholdReport",
    "UnsupportedDepth",
    "apply_threshold",
    "auto_threshold",
    "channel_histogram",
    "estimate_background",
    "extract_channel_gray",
    "fidelity_metrics",
    "fill_background",
    "generate_palimpsest",
    "inpaint",
    "inpaint_step",
    "load_image",
    "load_mask",
    "load_spec",
    "residual_stats",
    "run_eval",
    "run_restore",
    "run_synth",
    "save_image",
    "save_mask",
    "smooth_histogram",
    "spec_from_json",
    "verify_dark_peak_removed",
    "write_histogram_csv",
]
