"""Resource analytics for per-processor-memory CNN accelerators.

A tensor fits when every channel's spatial slice fits one data-memory
instance and there are enough processors to own one channel each. The
remaining functions quantify how well a preprocessing strategy uses the
device: fraction of processors active in the first layer, fraction of
original-image pixels carried into the input, and the first-layer weight
cost of extending channels.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import InvalidArgument
from .types import DeviceProfile, LayerSpec, Strategy

# Strategies whose extra channels carry pixels sampled from the original
# image; everything else repackages the downsampled pixels (or appends
# content-free coordinates) and earns no information credit.
SAMPLING_STRATEGIES = frozenset(
    {Strategy.DEX, Strategy.TILE, Strategy.PATCH_SEQUENTIAL, Strategy.PATCH_RANDOM}
)

MAX78000 = DeviceProfile(
    name="max78000",
    num_processors=64,
    per_instance_bytes=8192,          # 512 KB split evenly across 64 processors
    total_data_bytes=512 * 1024,
    total_weight_bytes=432 * 1024,
)

MAX78002 = DeviceProfile(
    name="max78002",
    num_processors=64,
    per_instance_bytes=int(1.3 * 1024 * 1024) // 64,
    total_data_bytes=int(1.3 * 1024 * 1024),
    total_weight_bytes=2 * 1024 * 1024,
    per_instance_derived=True,        # vendor states only the 1.3 MB total
)

_BUILTIN = {p.name: p for p in (MAX78000, MAX78002)}

PROFILE_DIR_ENV = "DEXKIT_PROFILE_DIR"


def builtin_profiles() -> dict[str, DeviceProfile]:
    return dict(_BUILTIN)


def load_profile(path: str | Path) -> DeviceProfile:
    """Read a DeviceProfile from a JSON document using the field names."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return DeviceProfile(
            name=raw["name"],
            num_processors=int(raw["num_processors"]),
            per_instance_bytes=int(raw["per_instance_bytes"]),
            total_data_bytes=int(raw["total_data_bytes"]),
            total_weight_bytes=int(raw["total_weight_bytes"]),
            per_instance_derived=bool(raw.get("per_instance_derived", False)),
        )
    except KeyError as missing:
        raise InvalidArgument(f"profile {path}: missing field {missing}") from None


def get_profile(name: str) -> DeviceProfile:
    """Look up a built-in profile, then ``$DEXKIT_PROFILE_DIR/<name>.json``."""
    if name in _BUILTIN:
        return _BUILTIN[name]
    profile_dir = os.environ.get(PROFILE_DIR_ENV)
    if profile_dir:
        candidate = Path(profile_dir) / f"{name}.json"
        if candidate.is_file():
            return load_profile(candidate)
    known = ", ".join(sorted(_BUILTIN))
    raise InvalidArgument(f"unknown device profile {name!r}; built-ins: {known}")


def check_fit(
    channels: int, height: int, width: int, bytes_per_value: int, profile: DeviceProfile
) -> tuple[bool, int]:
    """Memory-fit verdict and the per-channel byte footprint."""
    if min(channels, height, width, bytes_per_value) < 1:
        raise InvalidArgument("dimensions and element size must be positive")
    bytes_per_channel = height * width * bytes_per_value
    fits = channels <= profile.num_processors and bytes_per_channel <= profile.per_instance_bytes
    return fits, bytes_per_channel


def processor_utilization(channels: int, profile: DeviceProfile) -> float:
    """Fraction of processors active in the first layer."""
    if channels < 1:
        raise InvalidArgument("channel count must be >= 1")
    return min(channels, profile.num_processors) / profile.num_processors


def info_utilization(
    c_in: int, h_in: int, w_in: int, c_out: int, h_out: int, w_out: int
) -> float:
    """Fraction of original pixels represented after channel extension.

    Plain downsampling keeps h_out*w_out of h_in*w_in pixels; each factor
    of channel extension multiplies that, capped at covering the whole
    image.
    """
    spatial = (h_out * w_out) / (h_in * w_in)
    return min(1.0, (c_out / c_in) * spatial)


def info_ratio(c_in: int, c_out: int) -> float:
    """Information multiplier relative to plain downsampling (uncapped)."""
    return c_out / c_in


def strategy_info_ratio(strategy: Strategy, c_in: int, c_out: int) -> float:
    """Information multiplier credited to a strategy's output."""
    if strategy in SAMPLING_STRATEGIES:
        return info_ratio(c_in, c_out)
    return 1.0


def max_channels(profile: DeviceProfile) -> int:
    """Largest channel count executable without serializing processors."""
    return profile.num_processors


def first_layer_params(c_out: int, layer: LayerSpec) -> int:
    """Weight count of the first layer for a c_out-channel input.

    kernel contribution is the spatial area (edge squared), the
    conventional per-channel weight count of a square kernel.
    """
    if c_out < 1:
        raise InvalidArgument("channel count must be >= 1")
    return c_out * layer.kernel_edge**2 * layer.out_channels


def param_delta(c_in: int, c_out: int, layer: LayerSpec) -> int:
    """Weights added by extending the input from c_in to c_out channels."""
    return first_layer_params(c_out, layer) - first_layer_params(c_in, layer)


@dataclass(frozen=True)
class UtilizationReport:
    """Fit verdict plus processor/information utilization for one config."""

    fits: bool
    bytes_per_channel: int
    processors_used: int
    processor_utilization: float
    info_utilization: float | None = None
    info_ratio: float | None = None
    first_layer_params: int | None = None
    first_layer_param_delta: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def build_report(
    out_channels: int,
    out_height: int,
    out_width: int,
    bytes_per_value: int,
    profile: DeviceProfile,
    orig_shape: tuple[int, int, int] | None = None,
    layer: LayerSpec | None = None,
    strategy: Strategy | None = None,
) -> UtilizationReport:
    """Assemble the full report; information and parameter fields need the
    original shape and first-layer spec respectively."""
    fits, bytes_per_channel = check_fit(
        out_channels, out_height, out_width, bytes_per_value, profile
    )
    util = None
    ratio = None
    params = None
    delta = None
    if orig_shape is not None:
        c_in, h_in, w_in = orig_shape
        credited = out_channels
        if strategy is not None and strategy not in SAMPLING_STRATEGIES:
            credited = c_in
        util = info_utilization(c_in, h_in, w_in, credited, out_height, out_width)
        ratio = info_ratio(c_in, credited)
    if layer is not None:
        params = first_layer_params(out_channels, layer)
        if orig_shape is not None:
            delta = param_delta(orig_shape[0], out_channels, layer)
    return UtilizationReport(
        fits=fits,
        bytes_per_channel=bytes_per_channel,
        processors_used=min(out_channels, profile.num_processors),
        processor_utilization=processor_utilization(out_channels, profile),
        info_utilization=util,
        info_ratio=ratio,
        first_layer_params=params,
        first_layer_param_delta=delta,
    )


def percent(fraction: float) -> float:
    """Fraction to percent at the one-decimal reporting precision."""
    return round(fraction * 100.0, 1)
