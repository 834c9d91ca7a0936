"""Coordinate augmentation and the alternative channel-extension strategies.

All strategies share the transform module's channel-stacking semantics and
differ only in which pixels fill the extra channels: nothing here
interpolates, every output value is either a copied input pixel, a
coordinate ramp, or zero fill.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ChannelError, DtypeError, ShapeError
from .transform import _edges, _require_downscale, dex_extend, downsample, stack_patch_samples
from .types import Dtype, ExtensionConfig, ImageTensor, Strategy


def coordconv_augment(t: ImageTensor, with_r: bool = False) -> ImageTensor:
    """Append normalized i/j coordinate channels (optionally radial r).

    i and j ramps span [-1, 1]; r is the distance from the image center
    scaled by its maximum so it lands in [0, 1]. Applied after
    downsampling and normalization, hence the F32 requirement.
    """
    if t.dtype is not Dtype.F32:
        raise DtypeError(f"coordinate augmentation expects F32 input, got {t.dtype.name}")
    h, w = t.height, t.width
    i_ramp = _centered_ramp(h)[:, None] * np.ones((1, w))
    j_ramp = np.ones((h, 1)) * _centered_ramp(w)[None, :]
    extra = [i_ramp, j_ramp]
    if with_r:
        ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
        r = np.sqrt((ii - h / 2) ** 2 + (jj - w / 2) ** 2)
        r_max = math.sqrt((h / 2) ** 2 + (w / 2) ** 2)
        extra.append(r / r_max)
    coords = np.stack(extra).astype(np.float32)
    return ImageTensor(Dtype.F32, np.concatenate([t.data, coords]))


def _centered_ramp(n: int) -> np.ndarray:
    # 2*x/(n-1) - 1; a single row/column has no extent, so sit at the midpoint
    if n == 1:
        return np.zeros(1)
    return 2.0 * np.arange(n) / (n - 1) - 1.0


def repetition_extend(t: ImageTensor, c_out: int, h_out: int, w_out: int) -> ImageTensor:
    """Repeat the downsampled image across channel groups."""
    _check_extend(t, c_out)
    ds = downsample(t, h_out, w_out)
    picks = np.arange(c_out) % t.channels
    return ImageTensor(t.dtype, ds.data[picks])


def rotation_extend(
    t: ImageTensor,
    c_out: int,
    h_out: int,
    w_out: int,
    range_deg: tuple[float, float] = (-30.0, 30.0),
) -> ImageTensor:
    """Stack rotated variants of the downsampled image, ascending angle.

    K = ceil(c_out / C_I) angles are linearly spaced inclusive across
    range_deg (a single variant stays unrotated). Resampling is nearest
    neighbor with zero fill outside the frame.
    """
    _check_extend(t, c_out)
    base = downsample(t, h_out, w_out)
    k = -(-c_out // t.channels)
    angles = [0.0] if k == 1 else np.linspace(range_deg[0], range_deg[1], k)
    groups = [_rotate_nearest(base.data, a) for a in angles]
    return ImageTensor(t.dtype, np.concatenate(groups)[:c_out])


def _rotate_nearest(data: np.ndarray, angle_deg: float) -> np.ndarray:
    _, h, w = data.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ii, jj = np.meshgrid(np.arange(h) - cy, np.arange(w) - cx, indexing="ij")
    rad = math.radians(angle_deg)
    cos, sin = math.cos(rad), math.sin(rad)
    src_i = np.rint(cy + ii * cos + jj * sin).astype(np.int64)
    src_j = np.rint(cx - ii * sin + jj * cos).astype(np.int64)
    inside = (src_i >= 0) & (src_i < h) & (src_j >= 0) & (src_j < w)
    vals = data[:, src_i.clip(0, h - 1), src_j.clip(0, w - 1)]
    return np.where(inside[None, :, :], vals, data.dtype.type(0))


def tile_extend(t: ImageTensor, c_out: int, h_out: int, w_out: int) -> ImageTensor:
    """Split the input into a square grid of tiles and stack each, downsampled.

    The grid edge is the smallest g with g*g >= K; tiles are ordered
    row-major and tiles beyond c_out are discarded.
    """
    _check_extend(t, c_out)
    k = -(-c_out // t.channels)
    g = math.isqrt(k)
    if g * g < k:
        g += 1
    row_edges = _edges(t.height, g)
    col_edges = _edges(t.width, g)
    groups = []
    for pi in range(g):
        for pj in range(g):
            sub = ImageTensor(
                t.dtype,
                t.data[:, row_edges[pi]:row_edges[pi + 1], col_edges[pj]:col_edges[pj + 1]],
            )
            groups.append(downsample(sub, h_out, w_out).data)
    return ImageTensor(t.dtype, np.concatenate(groups)[:c_out])


def patch_sequential_extend(t: ImageTensor, c_out: int, h_out: int, w_out: int) -> ImageTensor:
    """Like the even-sampling transform but taking the first K pixels per patch."""
    _check_extend(t, c_out)
    _require_downscale(t, h_out, w_out)
    k = -(-c_out // t.channels)
    pixels = _patch_pixel_counts(t, h_out, w_out)
    # first k row-major positions, repeating the last pixel of small patches
    flat = np.minimum(np.arange(k, dtype=np.int64)[:, None, None], pixels[None] - 1)
    return stack_patch_samples(t, c_out, flat)


def patch_random_extend(
    t: ImageTensor, c_out: int, h_out: int, w_out: int, seed: int = 0
) -> ImageTensor:
    """Like the even-sampling transform but sampling K random pixels per patch.

    Sampling is without replacement whenever the patch has at least K
    pixels. Each patch draws from a generator keyed by (seed, i, j), so the
    output is independent of patch evaluation order; indices are sorted
    ascending to keep channel order stable.
    """
    _check_extend(t, c_out)
    _require_downscale(t, h_out, w_out)
    k = -(-c_out // t.channels)
    pixels = _patch_pixel_counts(t, h_out, w_out)
    flat = np.empty((k, h_out, w_out), dtype=np.int64)
    for i in range(h_out):
        for j in range(w_out):
            n = int(pixels[i, j])
            rng = np.random.default_rng((seed, i, j))
            if n >= k:
                picks = rng.choice(n, size=k, replace=False)
            else:
                picks = rng.integers(0, n, size=k)
            picks.sort()
            flat[:, i, j] = picks
    return stack_patch_samples(t, c_out, flat)


def _patch_pixel_counts(t: ImageTensor, h_out: int, w_out: int) -> np.ndarray:
    row_edges = _edges(t.height, h_out)
    col_edges = _edges(t.width, w_out)
    return (row_edges[1:] - row_edges[:-1])[:, None] * (col_edges[1:] - col_edges[:-1])[None, :]


def _check_extend(t: ImageTensor, c_out: int):
    if c_out < t.channels:
        raise ChannelError(f"cannot extend {t.channels} channels down to {c_out}")


def apply_extension(t: ImageTensor, config: ExtensionConfig) -> ImageTensor:
    """Dispatch a configured strategy against an input tensor.

    Coordinate augmentation does not resample, so its input must already
    be at the target spatial size (and F32, i.e. post-normalization).
    """
    s = config.strategy
    c_out, h_out, w_out = config.out_channels, config.out_height, config.out_width
    if s is Strategy.DOWNSAMPLE:
        if c_out != t.channels:
            raise ChannelError(
                f"downsample keeps the channel count; configure {t.channels}, not {c_out}"
            )
        return downsample(t, h_out, w_out)
    if s is Strategy.DEX:
        return dex_extend(t, config)
    if s in (Strategy.COORDCONV, Strategy.COORDCONV_R):
        with_r = s is Strategy.COORDCONV_R
        expected = t.channels + (3 if with_r else 2)
        if c_out != expected:
            raise ChannelError(
                f"{s.value} on {t.channels} channels yields {expected}, not {c_out}"
            )
        if (t.height, t.width) != (h_out, w_out):
            raise ShapeError(
                f"coordinate augmentation expects input already at {h_out}x{w_out}, "
                f"got {t.height}x{t.width}; downsample first"
            )
        return coordconv_augment(t, with_r=with_r)
    if s is Strategy.REPETITION:
        return repetition_extend(t, c_out, h_out, w_out)
    if s is Strategy.ROTATION:
        return rotation_extend(t, c_out, h_out, w_out, config.rotation_range_deg)
    if s is Strategy.TILE:
        return tile_extend(t, c_out, h_out, w_out)
    if s is Strategy.PATCH_SEQUENTIAL:
        return patch_sequential_extend(t, c_out, h_out, w_out)
    if s is Strategy.PATCH_RANDOM:
        return patch_random_extend(t, c_out, h_out, w_out, config.seed)
    raise AssertionError(f"unhandled strategy {s}")
