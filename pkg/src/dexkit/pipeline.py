"""Image ingestion, normalization, Q7 quantization, and tensor serialization.

Per-image order is: load (U8) -> channel extension -> normalize -> Q7.
Sampling-based strategies commute with the pointwise normalize/quantize
maps, so extending first keeps the heavy arithmetic on the small output.
Coordinate augmentation is the exception: its ramps are appended between
normalization and quantization so they are not fed through pixel
statistics.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import accel
from .baselines import apply_extension, coordconv_augment
from .errors import (
    BadMagic,
    ChannelError,
    CorruptFile,
    DexError,
    DtypeError,
    InvalidArgument,
    IoError,
    SpecMismatch,
    UnsupportedFormat,
    VersionMismatch,
)
from .transform import downsample
from .types import DeviceProfile, Dtype, ExtensionConfig, ImageTensor, Strategy

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-channel mean/std applied to pixels scaled into [0, 1]."""

    mean: tuple[float, ...] = IMAGENET_MEAN
    std: tuple[float, ...] = IMAGENET_STD

    def __post_init__(self):
        if len(self.mean) != len(self.std) or not self.mean:
            raise InvalidArgument("mean and std must be non-empty and the same length")
        if any(s <= 0 for s in self.std):
            raise InvalidArgument("std values must be strictly positive")


_PIL_FORMATS = {"PNG", "PPM"}


def load_image(path: str | Path) -> ImageTensor:
    """Decode a PNG or binary PPM into a (3, H, W) U8 tensor.

    Single-channel images are promoted to three identical channels; alpha
    is dropped.
    """
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in _PIL_FORMATS:
                raise UnsupportedFormat(f"{path}: expected PNG or PPM(P6), got {fmt}")
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a recognized image ({exc})") from exc
    except DexError:
        raise
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptFile(f"{path}: failed to decode ({exc})") from exc
    # PIL gives H x W x 3; switch to channel-major
    return ImageTensor(Dtype.U8, np.ascontiguousarray(arr.transpose(2, 0, 1)))


def normalize(t: ImageTensor, spec: NormalizationSpec | None = None) -> ImageTensor:
    """(pixel/255 - mean_c) / std_c, yielding F32.

    Extended tensors reuse the base statistics cyclically (channel c uses
    stat c mod len(mean)) because their channels are stacked copies of the
    base channel groups.
    """
    if t.dtype is not Dtype.U8:
        raise DtypeError(f"normalize expects U8 input, got {t.dtype.name}")
    spec = spec or NormalizationSpec()
    base = len(spec.mean)
    if t.channels < base:
        raise SpecMismatch(
            f"{base} per-channel stats cannot apply to {t.channels} channels"
        )
    idx = np.arange(t.channels) % base
    mean = np.asarray(spec.mean, dtype=np.float64)[idx][:, None, None]
    std = np.asarray(spec.std, dtype=np.float64)[idx][:, None, None]
    out = (t.data.astype(np.float64) / 255.0 - mean) / std
    return ImageTensor(Dtype.F32, out.astype(np.float32))


def quantize_q7(t: ImageTensor) -> ImageTensor:
    """Saturating Q7 conversion: clamp(round(x * 128), -128, 127).

    Rounds half away from zero and is monotone; values already on the Q7
    grid pass through unchanged.
    """
    if t.dtype is not Dtype.F32:
        raise DtypeError(f"quantize_q7 expects F32 input, got {t.dtype.name}")
    scaled = t.data.astype(np.float64) * 128.0
    rounded = np.trunc(scaled + np.copysign(0.5, scaled))
    return ImageTensor(Dtype.I8Q7, rounded.clip(-128, 127).astype(np.int8))


# On-disk container: magic, version, dtype code, two reserved zero bytes,
# then C/H/W as little-endian u32 and the raw channel-major payload.
MAGIC = b"DEXT"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sBBHIII")

_DTYPE_CODES = {Dtype.U8: 0, Dtype.I8Q7: 1, Dtype.F32: 2}
_CODE_DTYPES = {v: k for k, v in _DTYPE_CODES.items()}
_PAYLOAD_DTYPES = {
    Dtype.U8: np.dtype("u1"),
    Dtype.I8Q7: np.dtype("i1"),
    Dtype.F32: np.dtype("<f4"),
}


def write_tensor(path: str | Path, t: ImageTensor):
    """Write the binary tensor container; round-trips bit-exactly."""
    header = HEADER.pack(
        MAGIC, FORMAT_VERSION, _DTYPE_CODES[t.dtype], 0, t.channels, t.height, t.width
    )
    payload = np.ascontiguousarray(t.data, dtype=_PAYLOAD_DTYPES[t.dtype]).tobytes()
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload)
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc


def read_tensor(path: str | Path) -> ImageTensor:
    """Read a tensor container written by write_tensor."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(HEADER.size)
            if len(head) < HEADER.size:
                raise IoError(f"{path}: truncated header ({len(head)} bytes)")
            magic, version, code, _reserved, c, h, w = HEADER.unpack(head)
            if magic != MAGIC:
                raise BadMagic(f"{path}: magic {magic!r} != {MAGIC!r}")
            if version != FORMAT_VERSION:
                raise VersionMismatch(f"{path}: version {version}, expected {FORMAT_VERSION}")
            if code not in _CODE_DTYPES:
                raise IoError(f"{path}: unknown dtype code {code}")
            if min(c, h, w) < 1:
                raise IoError(f"{path}: degenerate shape ({c}, {h}, {w})")
            dtype = _CODE_DTYPES[code]
            count = c * h * w
            payload = fh.read(count * dtype.element_size)
    except OSError as exc:
        raise IoError(f"{path}: {exc}") from exc
    if len(payload) != count * dtype.element_size:
        raise IoError(f"{path}: truncated payload ({len(payload)} bytes)")
    arr = np.frombuffer(payload, dtype=_PAYLOAD_DTYPES[dtype]).astype(dtype.np_dtype)
    return ImageTensor(dtype, arr.reshape(c, h, w))


def transform_image(
    t: ImageTensor,
    config: ExtensionConfig,
    norm_spec: NormalizationSpec | None = None,
    quantize: bool = True,
) -> ImageTensor:
    """Run the per-image pipeline for one strategy."""
    if t.dtype is not Dtype.U8:
        raise DtypeError(f"pipeline starts from U8 images, got {t.dtype.name}")
    if config.strategy in (Strategy.COORDCONV, Strategy.COORDCONV_R):
        with_r = config.strategy is Strategy.COORDCONV_R
        expected = t.channels + (3 if with_r else 2)
        if config.out_channels != expected:
            raise ChannelError(
                f"{config.strategy.value} on {t.channels} channels yields "
                f"{expected}, not {config.out_channels}"
            )
        small = downsample(t, config.out_height, config.out_width)
        out = coordconv_augment(normalize(small, norm_spec), with_r=with_r)
    else:
        out = normalize(apply_extension(t, config), norm_spec)
    return quantize_q7(out) if quantize else out


_IMAGE_SUFFIXES = {".png", ".ppm"}


def process_dataset(
    in_dir: str | Path,
    config: ExtensionConfig,
    norm_spec: NormalizationSpec | None = None,
    profile: DeviceProfile | None = None,
    out_dir: str | Path = "out",
    quantize: bool = True,
) -> dict:
    """Convert every supported image under in_dir, preserving subdirectories.

    in_dir may also name a single image file. Per-file failures are
    recorded and the batch continues; the returned summary (also written
    to out_dir/summary.json) embeds the utilization report and one status
    entry per file, ordered by relative path.
    """
    in_dir = Path(in_dir)
    out_dir = Path(out_dir)
    profile = profile or accel.MAX78000
    out_dir.mkdir(parents=True, exist_ok=True)

    if in_dir.is_file():
        paths = [in_dir]
        in_dir = in_dir.parent
    else:
        paths = sorted(
            p for p in in_dir.rglob("*") if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
        )
    entries = []
    orig_shapes = set()
    for path in paths:
        rel = path.relative_to(in_dir)
        entry = {
            "input": str(rel),
            "output": None,
            "orig_shape": None,
            "out_shape": None,
            "status": "ok",
            "error": None,
        }
        try:
            img = load_image(path)
            orig_shapes.add(img.shape)
            result = transform_image(img, config, norm_spec, quantize=quantize)
            dest = (out_dir / rel).with_suffix(".dext")
            dest.parent.mkdir(parents=True, exist_ok=True)
            write_tensor(dest, result)
            entry["output"] = str(dest.relative_to(out_dir))
            entry["orig_shape"] = list(img.shape)
            entry["out_shape"] = list(result.shape)
        except DexError as exc:
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
        entries.append(entry)

    bytes_per_value = Dtype.I8Q7.element_size if quantize else Dtype.F32.element_size
    orig = orig_shapes.pop() if len(orig_shapes) == 1 else None
    report = accel.build_report(
        config.out_channels,
        config.out_height,
        config.out_width,
        bytes_per_value,
        profile,
        orig_shape=orig,
        strategy=config.strategy,
    )
    ok = sum(1 for e in entries if e["status"] == "ok")
    summary = {
        "strategy": config.strategy.value,
        "out_shape": [config.out_channels, config.out_height, config.out_width],
        "profile": profile.name,
        "quantized": quantize,
        "report": report.as_dict(),
        "counts": {"total": len(entries), "ok": ok, "failed": len(entries) - ok},
        "files": entries,
    }
    summary_path = out_dir / "summary.json"
    try:
        summary_path.write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"{summary_path}: {exc}") from exc
    return summary
