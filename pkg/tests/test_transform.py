import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dexkit import (
    ChannelError,
    Dtype,
    ExtensionConfig,
    IndexOutOfRange,
    InvalidArgument,
    ShapeError,
    Strategy,
    dex_extend,
    downsample,
    even_sample_offsets,
    make_tensor,
    patch_bounds,
)

from reference import random_u8, rational_bounds, reference_extend


def dex_config(c, h, w, **kw):
    return ExtensionConfig(Strategy.DEX, c, h, w, **kw)


@st.composite
def tensors(draw, max_c=3, max_hw=8):
    c = draw(st.sampled_from([1, 3])) if max_c >= 3 else 1
    h = draw(st.integers(1, max_hw))
    w = draw(st.integers(1, max_hw))
    seed = draw(st.integers(0, 2**32 - 1))
    data = random_u8(np.random.default_rng(seed), c, h, w)
    return make_tensor(Dtype.U8, c, h, w, data)


class TestPatchBounds:
    def test_exact_halving(self):
        b = patch_bounds(0, 0, 4, 4, 2, 2)
        assert (b.start_row, b.end_row, b.start_col, b.end_col) == (0, 2, 0, 2)

    def test_non_integral_ratio(self):
        b = patch_bounds(1, 0, 350, 350, 32, 32)
        assert (b.start_row, b.end_row) == (10, 21)

    def test_last_patch_ends_at_input_edge(self):
        b = patch_bounds(31, 31, 350, 350, 32, 32)
        assert (b.start_row, b.end_row) == (339, 350)
        assert b.end_col == 350

    def test_matches_rational_oracle(self):
        for h_in, h_out in [(7, 3), (12, 5), (350, 32), (9, 9), (10, 1)]:
            for i in range(h_out):
                b = patch_bounds(i, 0, h_in, h_in, h_out, h_out)
                sr, er, sc, ec = rational_bounds(i, 0, h_in, h_in, h_out, h_out)
                assert (b.start_row, b.end_row, b.start_col, b.end_col) == (sr, er, sc, ec)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            patch_bounds(2, 0, 4, 4, 2, 2)
        with pytest.raises(IndexOutOfRange):
            patch_bounds(0, -1, 4, 4, 2, 2)

    @given(h_in=st.integers(1, 48), r=st.integers(0, 10**6))
    def test_tiling_no_gap_no_overlap(self, h_in, r):
        h_out = 1 + r % h_in
        edges = [patch_bounds(i, 0, h_in, h_in, h_out, h_out) for i in range(h_out)]
        assert edges[0].start_row == 0
        assert edges[-1].end_row == h_in
        for prev, cur in zip(edges, edges[1:]):
            assert prev.end_row == cur.start_row
            assert cur.height >= 1


class TestEvenSampleOffsets:
    def test_two_of_four(self):
        assert even_sample_offsets(2, 2, 2) == [(0, 0), (1, 1)]

    def test_single_sample_is_top_left(self):
        assert even_sample_offsets(3, 3, 1) == [(0, 0)]

    def test_small_patch_duplicates(self):
        assert even_sample_offsets(1, 1, 3) == [(0, 0), (0, 0), (0, 0)]

    def test_errors(self):
        with pytest.raises(InvalidArgument):
            even_sample_offsets(2, 2, 0)
        with pytest.raises(InvalidArgument):
            even_sample_offsets(0, 2, 1)

    @given(ph=st.integers(1, 9), pw=st.integers(1, 9), k=st.integers(1, 30))
    def test_monotone_and_in_patch(self, ph, pw, k):
        offsets = even_sample_offsets(ph, pw, k)
        assert len(offsets) == k
        flat = [r * pw + c for r, c in offsets]
        assert flat == sorted(flat)
        assert all(0 <= f <= ph * pw - 1 for f in flat)
        # strict increase whenever the stride is non-zero
        if k > 1 and (ph * pw - 1) // (k - 1) > 0:
            assert all(b > a for a, b in zip(flat, flat[1:]))


class TestDexExtend:
    def test_toy_grid(self):
        data = [16 * c + 4 * i + j for c in range(3) for i in range(4) for j in range(4)]
        t = make_tensor(Dtype.U8, 3, 4, 4, data)
        out = dex_extend(t, dex_config(6, 2, 2))
        assert out.shape == (6, 2, 2)
        assert list(out.data[0:3, 0, 0]) == [0, 16, 32]
        assert list(out.data[3:6, 0, 0]) == [5, 21, 37]
        assert np.array_equal(out.data, reference_extend(t.data, 6, 2, 2))

    def test_same_channels_equals_downsample(self):
        t = make_tensor(Dtype.U8, 3, 5, 7, np.arange(105) % 256)
        out = dex_extend(t, dex_config(3, 2, 3))
        assert np.array_equal(out.data, downsample(t, 2, 3).data)

    def test_full_scale_shape_and_overflow(self):
        rng = np.random.default_rng(0)
        t = make_tensor(Dtype.U8, 3, 350, 350, random_u8(rng, 3, 350, 350))
        out = dex_extend(t, dex_config(64, 32, 32))
        assert out.shape == (64, 32, 32)
        # channel 63 is the first channel of sample k=21
        full = dex_extend(t, dex_config(66, 32, 32))
        assert np.array_equal(out.data[63], full.data[63])
        assert np.array_equal(full.data[63], full.data[21 * 3])

    def test_dtype_passthrough(self):
        t = make_tensor(Dtype.F32, 1, 4, 4, np.linspace(-1, 1, 16))
        out = dex_extend(t, dex_config(4, 2, 2))
        assert out.dtype is Dtype.F32

    def test_upsampling_rejected(self):
        t = make_tensor(Dtype.U8, 1, 4, 4, np.zeros(16))
        with pytest.raises(ShapeError):
            dex_extend(t, dex_config(4, 8, 4))

    def test_channel_reduction_rejected(self):
        t = make_tensor(Dtype.U8, 3, 4, 4, np.zeros(48))
        with pytest.raises(ChannelError):
            dex_extend(t, dex_config(2, 2, 2))

    def test_wrong_strategy_rejected(self):
        t = make_tensor(Dtype.U8, 1, 4, 4, np.zeros(16))
        with pytest.raises(InvalidArgument):
            dex_extend(t, ExtensionConfig(Strategy.TILE, 4, 2, 2))

    @settings(max_examples=60)
    @given(t=tensors(), c_out=st.integers(1, 24), seed=st.integers(0, 99))
    def test_matches_brute_force_oracle(self, t, c_out, seed):
        h_out = 1 + seed % t.height
        w_out = 1 + (seed // 7) % t.width
        c_out = max(c_out, t.channels)
        out = dex_extend(t, dex_config(c_out, h_out, w_out))
        assert np.array_equal(out.data, reference_extend(t.data, c_out, h_out, w_out))

    @settings(max_examples=40)
    @given(t=tensors(), c_out=st.integers(3, 16))
    def test_pixel_provenance(self, t, c_out):
        c_out = max(c_out, t.channels)
        h_out, w_out = max(1, t.height // 2), max(1, t.width // 2)
        out = dex_extend(t, dex_config(c_out, h_out, w_out))
        for i in range(h_out):
            for j in range(w_out):
                b = patch_bounds(i, j, t.height, t.width, h_out, w_out)
                patch = t.data[:, b.start_row:b.end_row, b.start_col:b.end_col]
                for ch in range(c_out):
                    assert out.data[ch, i, j] in patch[ch % t.channels]

    def test_channel_group_coherence(self):
        rng = np.random.default_rng(3)
        t = make_tensor(Dtype.U8, 3, 9, 9, random_u8(rng, 3, 9, 9))
        out = dex_extend(t, dex_config(9, 3, 3))
        for i in range(3):
            for j in range(3):
                b = patch_bounds(i, j, 9, 9, 3, 3)
                patch = t.data[:, b.start_row:b.end_row, b.start_col:b.end_col]
                for k in range(3):
                    group = out.data[3 * k:3 * k + 3, i, j]
                    # all three channels must come from one spatial location
                    matches = (patch == group[:, None, None]).all(axis=0)
                    assert matches.any()

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        t = make_tensor(Dtype.U8, 3, 12, 10, random_u8(rng, 3, 12, 10))
        cfg = dex_config(16, 5, 4)
        a = dex_extend(t, cfg)
        b = dex_extend(t, cfg)
        assert np.array_equal(a.data, b.data)


class TestDownsample:
    def test_identity_when_same_shape(self):
        t = make_tensor(Dtype.U8, 2, 3, 3, np.arange(18))
        assert np.array_equal(downsample(t, 3, 3).data, t.data)

    def test_quarter_grid_picks(self):
        t = make_tensor(Dtype.U8, 1, 4, 4, np.arange(16))
        out = downsample(t, 2, 2)
        assert list(out.data.ravel()) == [0, 2, 8, 10]

    def test_full_scale(self):
        t = make_tensor(Dtype.U8, 3, 350, 350, np.zeros(3 * 350 * 350))
        assert downsample(t, 32, 32).shape == (3, 32, 32)

    def test_upsampling_rejected(self):
        t = make_tensor(Dtype.U8, 1, 2, 2, [1, 2, 3, 4])
        with pytest.raises(ShapeError):
            downsample(t, 4, 4)

    @settings(max_examples=60)
    @given(t=tensors(), seed=st.integers(0, 99))
    def test_equals_dex_degenerate_case(self, t, seed):
        h_out = 1 + seed % t.height
        w_out = 1 + (seed // 11) % t.width
        ds = downsample(t, h_out, w_out)
        dx = dex_extend(t, dex_config(t.channels, h_out, w_out))
        assert ds.dtype is dx.dtype
        assert np.array_equal(ds.data, dx.data)
