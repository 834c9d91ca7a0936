"""Command-line front end: convert, plan, compare, sweep.

Exit codes: 0 success, 1 fatal error, 2 batch finished with per-file
failures, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import accel
from .errors import DexError, InvalidArgument
from .pipeline import NormalizationSpec, process_dataset, transform_image, load_image, write_tensor
from .types import Dtype, ExtensionConfig, ImageTensor, LayerSpec, Strategy

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64

DEFAULT_SWEEP_CHANNELS = (3, 6, 18, 36, 64)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we reserve 2 for partial batches
        raise UsageError(message)


def _parse_chw(text: str) -> tuple[int, int, int]:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise UsageError(f"expected CxHxW, got {text!r}")
    try:
        c, h, w = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"expected integers in CxHxW, got {text!r}") from None
    if min(c, h, w) < 1:
        raise UsageError(f"shape components must be positive, got {text!r}")
    return c, h, w


def _parse_hw(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise UsageError(f"expected HxW, got {text!r}")
    try:
        h, w = (int(p) for p in parts)
    except ValueError:
        raise UsageError(f"expected integers in HxW, got {text!r}") from None
    if min(h, w) < 1:
        raise UsageError(f"shape components must be positive, got {text!r}")
    return h, w


def _strategy(name: str) -> Strategy:
    try:
        return Strategy.from_name(name)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None


def _profile(name: str):
    try:
        return accel.get_profile(name)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def _norm_spec(cfg: dict) -> NormalizationSpec:
    if "mean" in cfg or "std" in cfg:
        return NormalizationSpec(
            mean=tuple(cfg.get("mean", NormalizationSpec().mean)),
            std=tuple(cfg.get("std", NormalizationSpec().std)),
        )
    return NormalizationSpec()


def cmd_convert(args) -> int:
    cfg = _load_config_file(args.config) if args.config else {}
    strategy_name = args.strategy or cfg.get("strategy")
    if not strategy_name:
        raise UsageError("--strategy is required (or provide it in --config)")
    strategy = _strategy(strategy_name)

    if args.out_shape:
        c, h, w = _parse_chw(args.out_shape)
    elif {"out_channels", "out_height", "out_width"} <= cfg.keys():
        c, h, w = cfg["out_channels"], cfg["out_height"], cfg["out_width"]
    else:
        raise UsageError("--out-shape CxHxW is required (or provide it in --config)")

    config = ExtensionConfig(
        strategy=strategy,
        out_channels=c,
        out_height=h,
        out_width=w,
        seed=args.seed if args.seed is not None else cfg.get("seed", 0),
        rotation_range_deg=tuple(cfg.get("rotation_range_deg", (-30.0, 30.0))),
    )
    profile = _profile(args.profile or cfg.get("profile", "max78000"))
    in_path = Path(args.input)
    if not in_path.exists():
        raise UsageError(f"input {in_path} does not exist")

    summary = process_dataset(
        in_path,
        config,
        norm_spec=_norm_spec(cfg),
        profile=profile,
        out_dir=args.output,
        quantize=not args.no_quantize,
    )
    print(Path(args.output) / "summary.json")
    counts = summary["counts"]
    if counts["failed"]:
        print(f"{counts['failed']} of {counts['total']} files failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_plan(args) -> int:
    c, h, w = _parse_chw(args.shape)
    profile = _profile(args.profile)
    if (args.kernel is None) != (args.layer_out is None):
        raise UsageError("--kernel and --layer-out must be given together")
    layer = None
    if args.kernel is not None:
        layer = LayerSpec(kernel_edge=args.kernel, out_channels=args.layer_out)
    orig = _parse_chw(args.orig_shape) if args.orig_shape else None
    report = accel.build_report(c, h, w, 1, profile, orig_shape=orig, layer=layer)

    if args.json:
        payload = {"shape": [c, h, w], "profile": profile.name, **report.as_dict()}
        print(json.dumps(payload, indent=2))
        return EXIT_OK

    print(f"plan: {c}x{h}x{w} on {profile.name} (Q7, 1 byte/value)")
    if report.fits:
        print(
            f"fits ({report.bytes_per_channel} B <= {profile.per_instance_bytes} B per instance)"
        )
    else:
        reasons = []
        if report.bytes_per_channel > profile.per_instance_bytes:
            reasons.append(
                f"{report.bytes_per_channel} B > {profile.per_instance_bytes} B per instance"
            )
        if c > profile.num_processors:
            reasons.append(f"{c} channels > {profile.num_processors} processors")
        print(f"does not fit ({'; '.join(reasons)})")
    print(
        f"processors: {report.processors_used}/{profile.num_processors} "
        f"({accel.percent(report.processor_utilization)}%)"
    )
    if report.info_ratio is not None:
        print(
            f"info ratio vs {args.orig_shape}: {round(report.info_ratio, 1)}x "
            f"(utilization {accel.percent(report.info_utilization)}%)"
        )
    if report.first_layer_params is not None:
        line = f"first-layer weights: {report.first_layer_params}"
        if report.first_layer_param_delta is not None:
            line += f" (+{report.first_layer_param_delta} vs {orig[0]}-channel input)"
        print(line)
    return EXIT_OK


def _effective_channels(strategy: Strategy, c_in: int, requested: int) -> int:
    if strategy is Strategy.DOWNSAMPLE:
        return c_in
    if strategy is Strategy.COORDCONV:
        return c_in + 2
    if strategy is Strategy.COORDCONV_R:
        return c_in + 3
    return requested


def cmd_compare(args) -> int:
    names = [n for n in (args.strategies or "").split(",") if n.strip()]
    if not names:
        raise UsageError("--strategies needs at least one strategy name")
    strategies = [_strategy(n) for n in names]
    c, h, w = _parse_chw(args.out_shape)
    profile = _profile(args.profile)

    in_path = Path(args.input)
    if not in_path.is_file():
        raise UsageError(f"--input must name one image file, got {in_path}")
    image = load_image(in_path)

    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for strategy in strategies:
        channels = _effective_channels(strategy, image.channels, c)
        config = ExtensionConfig(
            strategy=strategy, out_channels=channels, out_height=h, out_width=w, seed=args.seed or 0
        )
        result = transform_image(image, config)
        write_tensor(out_dir / f"{strategy.value}.dext", result)
        if args.previews:
            _write_previews(out_dir / "previews" / strategy.value, result)
        rows.append(
            {
                "strategy": strategy.value,
                "input_channels": channels,
                "info_ratio": round(accel.strategy_info_ratio(strategy, image.channels, channels), 1),
                "proc_util": accel.percent(accel.processor_utilization(channels, profile)),
            }
        )

    csv_path = out_dir / "comparison.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=["strategy", "input_channels", "info_ratio", "proc_util"])
        writer.writeheader()
        writer.writerows(rows)
    print(csv_path)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.channels:
        try:
            channels = [int(x) for x in args.channels.split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad channel list {args.channels!r}") from None
    else:
        channels = list(DEFAULT_SWEEP_CHANNELS)
    if not channels or any(ch < 1 for ch in channels):
        raise UsageError("channel counts must be positive")
    c_in, h_in, w_in = _parse_chw(args.orig_shape)
    h_out, w_out = _parse_hw(args.out_shape)
    profile = _profile(args.profile)

    rows = [
        {
            "channels": ch,
            "info_utilization": accel.percent(
                accel.info_utilization(c_in, h_in, w_in, ch, h_out, w_out)
            ),
            "proc_util": accel.percent(accel.processor_utilization(ch, profile)),
        }
        for ch in channels
    ]
    target = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.DictWriter(target, fieldnames=["channels", "info_utilization", "proc_util"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.output:
            target.close()
    return EXIT_OK


def _write_previews(dest: Path, t: ImageTensor):
    """One 8-bit PGM per channel; extended tensors have no RGB rendering."""
    dest.mkdir(parents=True, exist_ok=True)
    if t.dtype is Dtype.U8:
        gray = t.data
    elif t.dtype is Dtype.I8Q7:
        gray = (t.data.astype(np.int16) + 128).astype(np.uint8)
    else:
        lo, hi = float(t.data.min()), float(t.data.max())
        scale = 255.0 / (hi - lo) if hi > lo else 0.0
        gray = ((t.data - lo) * scale).astype(np.uint8)
    header = f"P5\n{t.width} {t.height}\n255\n".encode("ascii")
    for ch in range(t.channels):
        (dest / f"ch{ch:02d}.pgm").write_bytes(header + gray[ch].tobytes())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dexkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="batch-convert images to .dext tensors")
    p.add_argument("--input", required=True, help="image file or dataset directory")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--strategy", help="extension strategy name")
    p.add_argument("--out-shape", help="target CxHxW, e.g. 64x32x32")
    p.add_argument("--seed", type=int, default=None, help="seed for patch_random")
    p.add_argument("--profile", default=None, help="device profile name")
    p.add_argument("--config", help="JSON config supplying defaults for the flags above")
    p.add_argument("--no-quantize", action="store_true", help="stop after normalization (F32 output)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("plan", help="memory fit and utilization for a tensor shape")
    p.add_argument("--shape", required=True, help="input-layer CxHxW")
    p.add_argument("--profile", default="max78000")
    p.add_argument("--orig-shape", help="original CxHxW for information utilization")
    p.add_argument("--kernel", type=int, help="first-layer kernel edge")
    p.add_argument("--layer-out", type=int, help="first-layer output channels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compare", help="run several strategies on one image")
    p.add_argument("--input", required=True, help="one image file")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--out-shape", required=True, help="target CxHxW")
    p.add_argument("--strategies", required=True, help="comma-separated strategy names")
    p.add_argument("--profile", default="max78000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--previews", action="store_true", help="emit per-channel PGM previews")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="utilization across channel counts")
    p.add_argument("--channels", help="comma-separated counts (default 3,6,18,36,64)")
    p.add_argument("--orig-shape", required=True, help="original CxHxW")
    p.add_argument("--out-shape", required=True, help="target HxW")
    p.add_argument("--profile", default="max78000")
    p.add_argument("--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
