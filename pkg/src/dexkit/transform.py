"""Patch-wise even sampling and channel-wise stacking.

The input image is tiled into H_O x W_O patches with floor-based bounds,
K = ceil(C_O / C_I) pixels are sampled per patch at constant flat-index
stride, and each sample's channel group is stacked along the output
channel axis. With C_O = C_I this degenerates to plain nearest-pixel
downsampling.

All index arithmetic is done on exact integers; products like i * H_I are
formed before the division so non-integral ratios (e.g. 350/32) cannot
drift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChannelError, IndexOutOfRange, InvalidArgument, ShapeError
from .types import ExtensionConfig, ImageTensor, Strategy


@dataclass(frozen=True)
class PatchBounds:
    """Half-open row/column interval of one patch in the input image."""

    start_row: int
    end_row: int
    start_col: int
    end_col: int

    @property
    def height(self) -> int:
        return self.end_row - self.start_row

    @property
    def width(self) -> int:
        return self.end_col - self.start_col


def patch_bounds(i: int, j: int, h_in: int, w_in: int, h_out: int, w_out: int) -> PatchBounds:
    """Bounds of the patch feeding output pixel (i, j)."""
    if h_out > h_in or w_out > w_in:
        raise ShapeError(f"output grid {h_out}x{w_out} exceeds input {h_in}x{w_in}")
    if not (0 <= i < h_out and 0 <= j < w_out):
        raise IndexOutOfRange(f"patch index ({i}, {j}) outside {h_out}x{w_out} grid")
    return PatchBounds(
        start_row=(i * h_in) // h_out,
        end_row=((i + 1) * h_in) // h_out,
        start_col=(j * w_in) // w_out,
        end_col=((j + 1) * w_in) // w_out,
    )


def even_sample_offsets(patch_h: int, patch_w: int, k: int) -> list[tuple[int, int]]:
    """(row, col) offsets of k evenly strided samples inside a patch.

    The stride is floor((patch_h*patch_w - 1) / (k - 1)); a single sample
    sits at (0, 0). Duplicates are kept when the patch has fewer than k
    pixels.
    """
    if k < 1:
        raise InvalidArgument("sample count must be >= 1")
    if patch_h < 1 or patch_w < 1:
        raise InvalidArgument(f"empty patch {patch_h}x{patch_w}")
    if k == 1:
        return [(0, 0)]
    step = (patch_h * patch_w - 1) // (k - 1)
    return [((n * step) // patch_w, (n * step) % patch_w) for n in range(k)]


def _edges(n_in: int, n_out: int) -> np.ndarray:
    """Floor-based tile edges; n_out+1 values from 0 to n_in."""
    return (np.arange(n_out + 1, dtype=np.int64) * n_in) // n_out


def _require_downscale(t: ImageTensor, h_out: int, w_out: int):
    if h_out > t.height or w_out > t.width:
        raise ShapeError(
            f"cannot upsample {t.height}x{t.width} to {h_out}x{w_out}"
        )
    if h_out < 1 or w_out < 1:
        raise InvalidArgument("output dimensions must be >= 1")


def stack_patch_samples(t: ImageTensor, c_out: int, flat_idx: np.ndarray) -> ImageTensor:
    """Gather per-patch flat indices and stack channel groups.

    flat_idx has shape (K, H_O, W_O); entry [k, i, j] addresses a pixel of
    patch (i, j) in row-major flat order. Sample k lands in output channels
    [k*C_I, (k+1)*C_I), truncated at c_out keeping lower channel indices.
    """
    c_in, h_in, w_in = t.shape
    k_total, h_out, w_out = flat_idx.shape
    row_edges = _edges(h_in, h_out)
    col_edges = _edges(w_in, w_out)
    patch_w = (col_edges[1:] - col_edges[:-1])[None, None, :]
    rows = row_edges[:-1][None, :, None] + flat_idx // patch_w
    cols = col_edges[:-1][None, None, :] + flat_idx % patch_w

    out = np.zeros((c_out, h_out, w_out), dtype=t.data.dtype)
    for k in range(k_total):
        lo = k * c_in
        hi = min(lo + c_in, c_out)
        if lo >= hi:
            break
        out[lo:hi] = t.data[: hi - lo, rows[k], cols[k]]
    return ImageTensor(t.dtype, out)


def even_flat_indices(t: ImageTensor, c_out: int, h_out: int, w_out: int) -> np.ndarray:
    """Constant-stride flat indices for every patch, shape (K, H_O, W_O)."""
    row_edges = _edges(t.height, h_out)
    col_edges = _edges(t.width, w_out)
    pixels = (row_edges[1:] - row_edges[:-1])[:, None] * (col_edges[1:] - col_edges[:-1])[None, :]
    k = -(-c_out // t.channels)
    if k == 1:
        return np.zeros((1, h_out, w_out), dtype=np.int64)
    step = (pixels - 1) // (k - 1)
    return np.arange(k, dtype=np.int64)[:, None, None] * step[None, :, :]


def dex_extend(t: ImageTensor, config: ExtensionConfig) -> ImageTensor:
    """Extend channels by patch-wise even sampling and channel-wise stacking."""
    if config.strategy is not Strategy.DEX:
        raise InvalidArgument(f"config built for {config.strategy.value}, not dex")
    _require_downscale(t, config.out_height, config.out_width)
    if config.out_channels < t.channels:
        raise ChannelError(
            f"cannot extend {t.channels} channels down to {config.out_channels}"
        )
    flat = even_flat_indices(t, config.out_channels, config.out_height, config.out_width)
    return stack_patch_samples(t, config.out_channels, flat)


def downsample(t: ImageTensor, h_out: int, w_out: int) -> ImageTensor:
    """Keep the top-left pixel of each patch; channels unchanged."""
    _require_downscale(t, h_out, w_out)
    rows = _edges(t.height, h_out)[:-1]
    cols = _edges(t.width, w_out)[:-1]
    return ImageTensor(t.dtype, t.data[:, rows[:, None], cols[None, :]])
