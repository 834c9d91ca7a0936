"""Shared tensor, configuration, and device-profile types.

Tensors are channel-major: a value at (c, i, j) sits at flat index
c*H*W + i*W + j. One channel therefore occupies one contiguous slice,
which is also how the target accelerators lay out per-processor data
memory.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ChannelError, InvalidArgument, LengthMismatch, ValueOutOfRange


class Dtype(Enum):
    """Element type of an ImageTensor."""

    U8 = "u8"        # raw pixel, 0..255
    F32 = "f32"      # normalized real
    I8Q7 = "i8q7"    # Q7 fixed point, scale 1/128

    @property
    def np_dtype(self) -> np.dtype:
        return _NP_DTYPES[self]

    @property
    def element_size(self) -> int:
        return 4 if self is Dtype.F32 else 1


_NP_DTYPES = {
    Dtype.U8: np.dtype(np.uint8),
    Dtype.F32: np.dtype(np.float32),
    Dtype.I8Q7: np.dtype(np.int8),
}

_VALUE_RANGES = {
    Dtype.U8: (0, 255),
    Dtype.I8Q7: (-128, 127),
}


@dataclass(frozen=True)
class ImageTensor:
    """Channel-major image with shape (channels, height, width).

    Immutable after construction; the backing array is marked read-only.
    """

    dtype: Dtype
    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise LengthMismatch(f"expected 3-D (C, H, W) data, got ndim={self.data.ndim}")
        if self.data.dtype != self.dtype.np_dtype:
            raise ValueOutOfRange(
                f"array dtype {self.data.dtype} does not match {self.dtype.name}"
            )
        if not self.data.flags["C_CONTIGUOUS"]:
            object.__setattr__(self, "data", np.ascontiguousarray(self.data))
        self.data.setflags(write=False)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @property
    def flat(self) -> np.ndarray:
        """The buffer in flat index order c*H*W + i*W + j."""
        return self.data.reshape(-1)


def make_tensor(dtype: Dtype, channels: int, height: int, width: int, data) -> ImageTensor:
    """Build a validated ImageTensor from a flat or (C, H, W)-shaped buffer."""
    if channels < 1 or height < 1 or width < 1:
        raise InvalidArgument(f"dimensions must be >= 1, got ({channels}, {height}, {width})")
    arr = np.asarray(data)
    expected = channels * height * width
    if arr.size != expected:
        raise LengthMismatch(f"need {expected} values for ({channels}, {height}, {width}), got {arr.size}")
    arr = arr.reshape(channels, height, width)
    bounds = _VALUE_RANGES.get(dtype)
    if bounds is not None and arr.size:
        lo, hi = bounds
        amin, amax = arr.min(), arr.max()
        if amin < lo or amax > hi:
            raise ValueOutOfRange(f"{dtype.name} values must lie in [{lo}, {hi}], got [{amin}, {amax}]")
    return ImageTensor(dtype, arr.astype(dtype.np_dtype))


class Strategy(Enum):
    """Channel-extension strategy selector."""

    DOWNSAMPLE = "downsample"
    DEX = "dex"
    COORDCONV = "coordconv"
    COORDCONV_R = "coordconv_r"
    REPETITION = "repetition"
    ROTATION = "rotation"
    TILE = "tile"
    PATCH_SEQUENTIAL = "patch_sequential"
    PATCH_RANDOM = "patch_random"

    @classmethod
    def from_name(cls, name: str) -> "Strategy":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise InvalidArgument(f"unknown strategy {name!r}; valid: {valid}") from None


@dataclass(frozen=True)
class ExtensionConfig:
    """Target output shape plus strategy-specific parameters.

    seed is consumed only by PATCH_RANDOM; rotation_range_deg only by
    ROTATION.
    """

    strategy: Strategy
    out_channels: int
    out_height: int
    out_width: int
    seed: int = 0
    rotation_range_deg: tuple[float, float] = (-30.0, 30.0)

    def __post_init__(self):
        if self.out_channels < 1 or self.out_height < 1 or self.out_width < 1:
            raise InvalidArgument(
                f"output shape must be positive, got "
                f"({self.out_channels}, {self.out_height}, {self.out_width})"
            )
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument("seed must be an unsigned 64-bit integer")

    def samples_for(self, in_channels: int) -> int:
        """K = ceil(out_channels / in_channels)."""
        if in_channels < 1:
            raise ChannelError("input must have at least one channel")
        return -(-self.out_channels // in_channels)


@dataclass(frozen=True)
class DeviceProfile:
    """Static accelerator description used for memory-fit planning."""

    name: str
    num_processors: int
    per_instance_bytes: int
    total_data_bytes: int
    total_weight_bytes: int
    # True when per_instance_bytes is inferred as total/num_processors
    # rather than stated by the vendor.
    per_instance_derived: bool = False

    def __post_init__(self):
        if self.num_processors < 1:
            raise InvalidArgument("profile needs at least one processor")
        if self.num_processors * self.per_instance_bytes > self.total_data_bytes:
            raise InvalidArgument(
                f"profile {self.name!r}: {self.num_processors} x {self.per_instance_bytes} B "
                f"exceeds total data memory {self.total_data_bytes} B"
            )


@dataclass(frozen=True)
class LayerSpec:
    """First-layer geometry used for parameter-count deltas."""

    kernel_edge: int
    out_channels: int

    def __post_init__(self):
        if self.kernel_edge < 1 or self.out_channels < 1:
            raise InvalidArgument("kernel_edge and out_channels must be >= 1")
