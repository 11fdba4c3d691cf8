import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tactile_teleop.frames import TactileFrame
from tactile_teleop.haptics import (HapticConfig, HapticMapper,
                                    NotCalibratedError, feedback_curve)
from tactile_teleop.pipeline import SensorCalibration

from conftest import random_frame


class TestFeedbackCurve:
    @pytest.mark.parametrize("alpha", [10.0, 100.0, 1000.0])
    def test_endpoints_exact(self, alpha):
        assert feedback_curve(0.0, alpha) == 0.0
        assert feedback_curve(1.0, alpha) == 1.0

    def test_reference_values(self):
        # independent evaluation: log10(1 + 1000 p) / log10(1001)
        assert feedback_curve(0.01, 1000.0) == pytest.approx(
            math.log10(11.0) / math.log10(1001.0), abs=1e-12)
        assert feedback_curve(0.01, 1000.0) == pytest.approx(0.34708, abs=1e-4)
        assert feedback_curve(0.1, 1000.0) == pytest.approx(0.66801, abs=1e-4)

    @given(p=st.floats(0.001, 0.999))
    def test_gain_ordering(self, p):
        assert feedback_curve(p, 1000.0) > feedback_curve(p, 100.0) > feedback_curve(p, 10.0)

    @given(p1=st.floats(0.0, 1.0), p2=st.floats(0.0, 1.0),
           alpha=st.floats(0.01, 1e4))
    def test_strictly_increasing(self, p1, p2, alpha):
        lo, hi = min(p1, p2), max(p1, p2)
        if hi - lo < 1e-9:  # below float resolution of the curve
            return
        assert feedback_curve(lo, alpha) < feedback_curve(hi, alpha)

    @pytest.mark.parametrize("alpha", [0.5, 10.0, 1000.0])
    def test_strictly_concave_on_grid(self, alpha):
        grid = np.linspace(0.0, 1.0, 201)
        values = [feedback_curve(p, alpha) for p in grid]
        second_diff = np.diff(values, 2)
        assert (second_diff < 0).all()

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            feedback_curve(1.5, 100.0)
        with pytest.raises(ValueError):
            feedback_curve(0.5, 0.0)


def calibrated_mapper(rng, alpha=1000.0, c=2, size=8):
    mapper = HapticMapper(HapticConfig(alpha=alpha, window_length=c))
    for s in (1, 2):
        mapper.set_calibration(SensorCalibration(
            s, rng.uniform(0.3, 0.7, (size, size, 3)), 0.05))
    return mapper


class TestHapticMapper:
    def test_requires_calibration(self, rng):
        mapper = HapticMapper(HapticConfig())
        with pytest.raises(NotCalibratedError):
            mapper.step(random_frame(rng), random_frame(rng, 2), tick=0)

    def test_reference_frames_give_zero_intensity(self, rng):
        mapper = calibrated_mapper(rng)
        f1 = TactileFrame(1, 0, mapper.calibrations[1].reference)
        f2 = TactileFrame(2, 0, mapper.calibrations[2].reference)
        sample = mapper.step(f1, f2, tick=0)
        assert sample.intensity == 0.0
        assert sample.ratio_mean == 0.0

    def test_mean_and_curve_chain(self, rng):
        # sensor 2 contributes a 2% persistent change, sensor 1 none
        mapper = calibrated_mapper(rng, size=10)
        ref1 = mapper.calibrations[1].reference
        ref2 = mapper.calibrations[2].reference
        changed = ref2.copy()
        changed[0, :2] = np.clip(ref2[0, :2] + 0.5, 0, 1)
        for tick in range(3):
            sample = mapper.step(TactileFrame(1, tick, ref1),
                                 TactileFrame(2, tick, changed), tick=tick)
        assert sample.ratio_s1 == 0.0
        assert sample.ratio_s2 == pytest.approx(0.02)
        assert sample.ratio_mean == pytest.approx(0.01)
        assert sample.intensity == pytest.approx(0.34708, abs=1e-4)

    def test_steady_contact_gives_constant_intensity(self, rng):
        mapper = calibrated_mapper(rng, c=3)
        contact1 = np.clip(mapper.calibrations[1].reference + 0.3, 0, 1)
        contact2 = np.clip(mapper.calibrations[2].reference + 0.3, 0, 1)
        intensities = []
        for tick in range(8):
            sample = mapper.step(TactileFrame(1, tick, contact1),
                                 TactileFrame(2, tick, contact2), tick=tick)
            intensities.append(sample.intensity)
        assert len(set(intensities[3:])) == 1

    def test_sensor_symmetry(self, rng):
        mapper_a = calibrated_mapper(rng)
        mapper_b = HapticMapper(mapper_a.config)
        cal1, cal2 = mapper_a.calibrations[1], mapper_a.calibrations[2]
        mapper_b.set_calibration(SensorCalibration(1, cal2.reference, cal2.noise_threshold))
        mapper_b.set_calibration(SensorCalibration(2, cal1.reference, cal1.noise_threshold))
        f1, f2 = random_frame(rng, 1), random_frame(rng, 2)
        sa = mapper_a.step(f1, f2, tick=0)
        sb = mapper_b.step(TactileFrame(1, 0, f2.pixels), TactileFrame(2, 0, f1.pixels), tick=0)
        assert sa.ratio_mean == sb.ratio_mean
        assert sa.intensity == sb.intensity

    def test_missing_frame_reemits_stale(self, rng):
        mapper = calibrated_mapper(rng)
        contact = np.clip(mapper.calibrations[1].reference + 0.3, 0, 1)
        live = mapper.step(TactileFrame(1, 0, contact),
                           TactileFrame(2, 0, mapper.calibrations[2].reference), tick=0)
        stale = mapper.step(None, None, tick=1)
        assert stale.stale
        assert stale.intensity == live.intensity
        assert len(mapper.windows[1]) == 1  # windows did not advance

    def test_window_never_exceeds_capacity(self, rng):
        mapper = calibrated_mapper(rng, c=2)
        for tick in range(10):
            mapper.step(random_frame(rng, 1, tick), random_frame(rng, 2, tick), tick=tick)
            assert len(mapper.windows[1]) <= 1
            assert len(mapper.windows[2]) <= 1

    def test_intensity_always_in_range(self, rng):
        mapper = calibrated_mapper(rng)
        for tick in range(20):
            sample = mapper.step(random_frame(rng, 1, tick),
                                 random_frame(rng, 2, tick), tick=tick)
            assert 0.0 <= sample.intensity <= 1.0
