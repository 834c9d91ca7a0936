"""numpy-facing bindings for the dexkit core.

The boundary type is a plain 3-D channel-major ndarray; its numpy dtype
carries the core dtype (uint8 = raw pixels, int8 = Q7, float32 =
normalized). Conversion is layout-preserving and never changes a value:
non-contiguous inputs are copied, nothing is cast implicitly. All
arithmetic stays in the core library; these wrappers only translate
arrays and propagate the core's exceptions.
"""

from __future__ import annotations

import numpy as np

import dexkit
from dexkit import Dtype, ExtensionConfig, ImageTensor, Strategy

__all__ = [
    "transform",
    "plan",
    "read_tensor",
    "write_tensor",
    "to_tensor",
    "to_array",
]

_ARRAY_DTYPES = {
    np.dtype(np.uint8): Dtype.U8,
    np.dtype(np.int8): Dtype.I8Q7,
    np.dtype(np.float32): Dtype.F32,
}
_NP_DTYPES = {v: k for k, v in _ARRAY_DTYPES.items()}


def to_tensor(array: np.ndarray) -> ImageTensor:
    """Wrap a 3-D channel-major array as a core tensor, value for value."""
    arr = np.asarray(array)
    if arr.ndim != 3:
        raise dexkit.LengthMismatch(f"expected a (C, H, W) array, got ndim={arr.ndim}")
    core_dtype = _ARRAY_DTYPES.get(arr.dtype)
    if core_dtype is None:
        supported = ", ".join(str(d) for d in _ARRAY_DTYPES)
        raise dexkit.DtypeError(f"unsupported array dtype {arr.dtype}; use one of {supported}")
    return ImageTensor(core_dtype, np.ascontiguousarray(arr))


def to_array(tensor: ImageTensor) -> np.ndarray:
    """Copy a core tensor out as a writable channel-major array."""
    return np.array(tensor.data, dtype=_NP_DTYPES[tensor.dtype])


def transform(
    array: np.ndarray,
    strategy: str,
    out_shape: tuple[int, int, int],
    seed: int = 0,
    rotation_range_deg: tuple[float, float] = (-30.0, 30.0),
) -> np.ndarray:
    """Apply a named extension strategy to a channel-major array."""
    c, h, w = out_shape
    config = ExtensionConfig(
        strategy=Strategy.from_name(strategy),
        out_channels=c,
        out_height=h,
        out_width=w,
        seed=seed,
        rotation_range_deg=tuple(rotation_range_deg),
    )
    return to_array(dexkit.apply_extension(to_tensor(array), config))


def plan(
    shape: tuple[int, int, int],
    profile: str = "max78000",
    bytes_per_value: int = 1,
    orig_shape: tuple[int, int, int] | None = None,
) -> dict:
    """Utilization report for a tensor shape, keyed by the report field names."""
    c, h, w = shape
    device = dexkit.get_profile(profile)
    report = dexkit.build_report(c, h, w, bytes_per_value, device, orig_shape=orig_shape)
    return report.as_dict()


def read_tensor(path) -> np.ndarray:
    """Read a .dext container as a channel-major array."""
    return to_array(dexkit.read_tensor(path))


def write_tensor(path, array: np.ndarray):
    """Write a channel-major array as a .dext container."""
    dexkit.write_tensor(path, to_tensor(array))
