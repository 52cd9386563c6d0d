"""Command-line interface: restore, synth and eval subcommands.

Exit codes: 0 success, 1 for I/O or environment trouble, 2 for bad
flags, bad spec documents, or inputs the method cannot work with.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    AllPixelsMasked,
    DimensionMismatch,
    InvalidSpec,
    MalformedImage,
    NotBimodal,
    UnsupportedDepth,
)
from .pipeline import RestoreConfig, run_eval, run_restore, run_synth
from .raster import Channel


def _threshold_arg(text: str):
    if text == "auto":
        return None
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"threshold must be 'auto' or an integer, got {text!r}"
        ) from None
    if not 1 <= value <= 255:
        raise argparse.ArgumentTypeError(f"threshold must lie in [1, 255], got {value}")
    return value


def _fill_arg(text: str):
    if text == "none":
        return None
    if text == "auto":
        return "auto"
    if text.startswith("#") and len(text) == 7:
        try:
            return tuple(int(text[i : i + 2], 16) for i in (1, 3, 5))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"fill must be 'none', 'auto' or '#RRGGBB', got {text!r}"
    )


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="palimpsest",
        description="Remove dark ink from scanned palimpsests and repair the holes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    restore = sub.add_parser("restore", help="run the full restoration pipeline")
    restore.add_argument("--input", required=True, type=Path, help="input image (PNG or PPM)")
    restore.add_argument("--out", required=True, type=Path, help="output directory")
    restore.add_argument(
        "--channel", choices=("red", "green", "blue"), default="red",
        help="channel analyzed for the ink threshold (default red)",
    )
    restore.add_argument(
        "--threshold", type=_threshold_arg, default=None, metavar="auto|N",
        help="removal threshold; 'auto' picks the histogram valley (default)",
    )
    restore.add_argument(
        "--neighborhood", type=int, choices=(4, 8), default=4,
        help="neighbors considered when repairing holes (default 4)",
    )
    restore.add_argument(
        "--min-known", type=int, default=3, metavar="N",
        help="known neighbors required before a hole fills (default 3)",
    )
    restore.add_argument(
        "--max-iters", type=int, default=None, metavar="N",
        help="cap on repair sweeps; 0 skips repair (default: image pixel count)",
    )
    restore.add_argument(
        "--fill", type=_fill_arg, default=None, metavar="none|auto|#RRGGBB",
        help="paint unfilled holes with this color after repair (default none)",
    )
    restore.add_argument(
        "--gray", choices=("none", "red", "green", "blue"), default="blue",
        help="also write a grayscale image from this channel (default blue)",
    )
    restore.add_argument(
        "--emit-histograms", action="store_true",
        help="write before/after per-channel histogram CSVs",
    )
    restore.add_argument(
        "--emit-mask",
        action="store_true",
        help="write the removal mask and residual mask PNGs",
    )
    restore.add_argument(
        "--report", type=Path, default=None, metavar="f.json",
        help="write a JSON run report and diagnostic figures",
    )
    restore.set_defaults(func=_cmd_restore)

    synth = sub.add_parser("synth", help="generate a synthetic palimpsest with ground truth")
    synth.add_argument("--spec", required=True, type=Path, help="JSON recipe file")
    synth.add_argument("--out", required=True, type=Path, help="output directory")
    synth.set_defaults(func=_cmd_synth)

    evaluate = sub.add_parser("eval", help="score a restoration against known ground truth")
    evaluate.add_argument("--restored", required=True, type=Path)
    evaluate.add_argument("--clean", required=True, type=Path)
    evaluate.add_argument("--truth-mask", required=True, type=Path)
    evaluate.add_argument("--residual-mask", required=True, type=Path)
    evaluate.set_defaults(func=_cmd_eval)

    return parser


def _cmd_restore(args) -> int:
    config = RestoreConfig(
        input_path=args.input,
        out_dir=args.out,
        channel=Channel.from_name(args.channel),
        threshold=args.threshold,
        neighborhood=args.neighborhood,
        min_known=args.min_known,
        max_iters=args.max_iters,
        fill=args.fill,
        gray_channel=None if args.gray == "none" else Channel.from_name(args.gray),
        emit_histograms=args.emit_histograms,
        emit_mask=args.emit_mask,
        report_path=args.report,
    )
    report = run_restore(config)
    print(
        f"threshold {report.threshold_report.threshold} ({report.threshold_report.mode}): "
        f"masked {report.masked_pixels}, filled {report.filled_pixels} "
        f"in {report.iterations_run} iterations, residual {report.residual_pixels}"
    )
    return 0


def _cmd_synth(args) -> int:
    manifest = run_synth(args.spec, args.out)
    print(json.dumps(manifest, indent=2))
    return 0


def _cmd_eval(args) -> int:
    metrics = run_eval(args.restored, args.clean, args.truth_mask, args.residual_mask)
    print(json.dumps(metrics.as_dict(), indent=2))
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (NotBimodal, InvalidSpec, DimensionMismatch, AllPixelsMasked, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MalformedImage, UnsupportedDepth) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        name = exc.filename if exc.filename else exc
        print(f"error: {name}: no such file", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
