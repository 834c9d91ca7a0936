import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dexkit import (
    MAX78000,
    MAX78002,
    DeviceProfile,
    InvalidArgument,
    LayerSpec,
    Strategy,
    build_report,
    builtin_profiles,
    check_fit,
    first_layer_params,
    get_profile,
    info_ratio,
    info_utilization,
    load_profile,
    max_channels,
    param_delta,
    processor_utilization,
    strategy_info_ratio,
)
from dexkit.accel import PROFILE_DIR_ENV, percent


class TestCheckFit:
    def test_imagenet_shape_does_not_fit(self):
        fits, per_channel = check_fit(3, 224, 224, 1, MAX78000)
        assert not fits
        assert per_channel == 50176
        assert per_channel > MAX78000.per_instance_bytes == 8192

    def test_small_shape_fits(self):
        fits, per_channel = check_fit(3, 32, 32, 1, MAX78000)
        assert fits and per_channel == 1024

    def test_extended_channels_still_fit(self):
        fits, _ = check_fit(64, 32, 32, 1, MAX78000)
        assert fits
        assert 64 <= MAX78000.num_processors

    def test_too_many_channels(self):
        fits, _ = check_fit(65, 32, 32, 1, MAX78000)
        assert not fits

    def test_f32_element_size_counts(self):
        fits, per_channel = check_fit(3, 32, 32, 4, MAX78000)
        assert fits and per_channel == 4096
        assert not check_fit(3, 64, 64, 4, MAX78000)[0]

    @given(
        c=st.integers(1, 80),
        h=st.integers(1, 300),
        w=st.integers(1, 300),
        dc=st.integers(0, 10),
        dh=st.integers(0, 50),
        dw=st.integers(0, 50),
    )
    def test_monotone_in_all_dimensions(self, c, h, w, dc, dh, dw):
        grown, _ = check_fit(c + dc, h + dh, w + dw, 1, MAX78000)
        shrunk, _ = check_fit(c, h, w, 1, MAX78000)
        if grown:
            assert shrunk


class TestProcessorUtilization:
    @pytest.mark.parametrize(
        "channels,expected", [(3, 4.7), (5, 7.8), (6, 9.4), (64, 100.0)]
    )
    def test_reference_points(self, channels, expected):
        assert percent(processor_utilization(channels, MAX78000)) == expected

    def test_exact_fraction(self):
        assert processor_utilization(3, MAX78000) * 64 == 3

    def test_saturates_at_processor_count(self):
        assert processor_utilization(200, MAX78000) == 1.0

    @given(c=st.integers(1, 256))
    def test_bounded(self, c):
        u = processor_utilization(c, MAX78000)
        assert 0 < u <= 1.0


class TestInfoUtilization:
    def test_downsampling_fraction(self):
        assert percent(info_utilization(3, 256, 256, 3, 32, 32)) == 1.6

    def test_extension_fraction(self):
        assert percent(info_utilization(3, 256, 256, 64, 32, 32)) == 33.3

    def test_larger_original_resolutions(self):
        assert percent(info_utilization(3, 300, 300, 64, 32, 32)) == 24.3
        assert percent(info_utilization(3, 512, 512, 64, 32, 32)) == 8.3

    def test_capped_at_one(self):
        assert info_utilization(1, 4, 4, 64, 4, 4) == 1.0

    def test_ratio_reference(self):
        assert round(info_ratio(3, 64), 1) == 21.3
        assert info_ratio(3, 3) == 1.0

    @given(
        c_in=st.integers(1, 4),
        c_out=st.integers(1, 64),
        h=st.integers(8, 64),
        w=st.integers(8, 64),
    )
    def test_ratio_independent_of_spatial_dims(self, c_in, c_out, h, w):
        c_out = max(c_out, c_in)
        a = info_utilization(c_in, h * 4, w * 4, c_out, h, w)
        b = info_utilization(c_in, h * 8, w * 8, c_out, h, w)
        assert info_ratio(c_in, c_out) == c_out / c_in
        if a < 1.0 and b < 1.0:
            assert a == pytest.approx(4 * b)

    def test_strategy_credit(self):
        assert round(strategy_info_ratio(Strategy.DEX, 3, 64), 1) == 21.3
        assert round(strategy_info_ratio(Strategy.TILE, 3, 64), 1) == 21.3
        assert round(strategy_info_ratio(Strategy.PATCH_SEQUENTIAL, 3, 64), 1) == 21.3
        assert round(strategy_info_ratio(Strategy.PATCH_RANDOM, 3, 64), 1) == 21.3
        assert strategy_info_ratio(Strategy.REPETITION, 3, 64) == 1.0
        assert strategy_info_ratio(Strategy.ROTATION, 3, 64) == 1.0
        assert strategy_info_ratio(Strategy.COORDCONV, 3, 5) == 1.0
        assert strategy_info_ratio(Strategy.DOWNSAMPLE, 3, 3) == 1.0


class TestMaxChannels:
    def test_builtins(self):
        assert max_channels(MAX78000) == 64
        assert max_channels(MAX78002) == 64

    def test_custom(self):
        tiny = DeviceProfile("tiny16", 16, 1024, 16 * 1024, 0)
        assert max_channels(tiny) == 16


class TestFirstLayerParams:
    def test_baseline_weights(self):
        assert first_layer_params(3, LayerSpec(3, 64)) == 1728

    def test_extended_weights_and_delta(self):
        layer = LayerSpec(3, 64)
        assert first_layer_params(64, layer) == 36864
        assert param_delta(3, 64, layer) == 35136

    def test_zero_delta(self):
        assert param_delta(3, 3, LayerSpec(3, 64)) == 0


class TestReport:
    def test_full_report(self):
        r = build_report(
            64, 32, 32, 1, MAX78000,
            orig_shape=(3, 256, 256), layer=LayerSpec(3, 64), strategy=Strategy.DEX,
        )
        assert r.fits
        assert r.bytes_per_channel == 1024
        assert r.processors_used == 64
        assert r.processor_utilization == 1.0
        assert percent(r.info_utilization) == 33.3
        assert round(r.info_ratio, 1) == 21.3
        assert r.first_layer_params == 36864
        assert r.first_layer_param_delta == 35136

    def test_ratio_consistent_with_utilizations(self):
        r = build_report(64, 32, 32, 1, MAX78000, orig_shape=(3, 256, 256))
        base = info_utilization(3, 256, 256, 3, 32, 32)
        assert r.info_ratio == pytest.approx(r.info_utilization / base)

    def test_repetition_gets_no_information_credit(self):
        r = build_report(
            64, 32, 32, 1, MAX78000, orig_shape=(3, 256, 256), strategy=Strategy.REPETITION
        )
        assert r.info_ratio == 1.0
        assert percent(r.info_utilization) == 1.6

    def test_optional_fields_default_to_none(self):
        r = build_report(3, 32, 32, 1, MAX78000)
        assert r.info_utilization is None and r.info_ratio is None
        assert r.first_layer_params is None and r.first_layer_param_delta is None
        d = r.as_dict()
        assert set(d) == {
            "fits",
            "bytes_per_channel",
            "processors_used",
            "processor_utilization",
            "info_utilization",
            "info_ratio",
            "first_layer_params",
            "first_layer_param_delta",
        }


class TestProfiles:
    def test_builtin_lookup(self):
        assert get_profile("max78000") is MAX78000
        assert get_profile("max78002") is MAX78002
        assert set(builtin_profiles()) == {"max78000", "max78002"}

    def test_unknown_profile(self):
        with pytest.raises(InvalidArgument):
            get_profile("max99999")

    def test_json_loading(self, tmp_path):
        doc = {
            "name": "coral-ish",
            "num_processors": 16,
            "per_instance_bytes": 4096,
            "total_data_bytes": 65536,
            "total_weight_bytes": 131072,
        }
        path = tmp_path / "coral-ish.json"
        path.write_text(json.dumps(doc))
        p = load_profile(path)
        assert p.num_processors == 16 and not p.per_instance_derived

    def test_profile_dir_env(self, tmp_path, monkeypatch):
        doc = {
            "name": "lab-board",
            "num_processors": 8,
            "per_instance_bytes": 2048,
            "total_data_bytes": 16384,
            "total_weight_bytes": 0,
        }
        (tmp_path / "lab-board.json").write_text(json.dumps(doc))
        monkeypatch.setenv(PROFILE_DIR_ENV, str(tmp_path))
        assert get_profile("lab-board").num_processors == 8

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"name": "broken"}))
        with pytest.raises(InvalidArgument):
            load_profile(path)
