"""Fusion, filtering, and spectrum tests.

Filter attenuation is measured by quadrature projection (lock-in) onto the
probe tone over the interior of the signal, which separates the filter's
steady-state response from edge transients that otherwise dominate the RMS
at deep attenuation levels.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tugait.errors import ConfigurationError, IngestionError
from tugait.signal_core import (
    MagnitudeSignal,
    RawRecording,
    butterworth_lowpass,
    load_recording,
    magnitude_fuse,
    power_spectrum,
)

FS = 200.0


def lockin_amplitude(values: np.ndarray, fs: float, freq: float) -> float:
    """Amplitude of the `freq` component over the interior 80% of `values`."""
    n = values.size
    lo, hi = int(0.1 * n), int(0.9 * n)
    t = np.arange(n) / fs
    seg, ts = values[lo:hi], t[lo:hi]
    c = np.cos(2 * np.pi * freq * ts)
    s = np.sin(2 * np.pi * freq * ts)
    # 2/N * projection; exact for tones away from DC/Nyquist
    return float(np.hypot(2 * np.mean(seg * c), 2 * np.mean(seg * s)))


def tone(freq: float, amp: float = 1.0, duration_s: float = 100.0, fs: float = FS):
    t = np.arange(int(duration_s * fs)) / fs
    return amp * np.sin(2 * np.pi * freq * t)


class TestMagnitudeFuse:
    def test_pythagorean_triple(self):
        xyz = np.array([[3.0, 4.0, 12.0]])
        rec = RawRecording("s1", xyz, FS)
        sig = magnitude_fuse(rec)
        assert sig.values[0] == pytest.approx(13.0, abs=1e-12)
        assert sig.sampling_rate_hz == FS
        assert not sig.filtered

    def test_axis_permutation_invariant(self):
        xyz = np.random.default_rng(0).normal(size=(50, 3))
        base = magnitude_fuse(RawRecording("s", xyz, FS)).values
        for perm in [(1, 2, 0), (2, 0, 1), (0, 2, 1)]:
            permuted = magnitude_fuse(RawRecording("s", xyz[:, perm], FS)).values
            # summation order changes, so exactness only to the last ulp
            np.testing.assert_allclose(permuted, base, rtol=1e-14)

    def test_rotation_invariant(self, rng):
        xyz = rng.normal(size=(200, 3))
        base = magnitude_fuse(RawRecording("s", xyz, FS)).values
        for _ in range(20):
            q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
            rotated = magnitude_fuse(RawRecording("s", xyz @ q.T, FS)).values
            assert np.max(np.abs(rotated - base)) < 1e-9

    @given(
        x=st.floats(-10, 10, allow_nan=False),
        y=st.floats(-10, 10, allow_nan=False),
        z=st.floats(-10, 10, allow_nan=False),
    )
    @settings(max_examples=50, deadline=None)
    def test_sign_flips_invariant(self, x, y, z):
        a = magnitude_fuse(RawRecording("s", np.array([[x, y, z]]), FS)).values[0]
        b = magnitude_fuse(RawRecording("s", np.array([[-x, -y, z]]), FS)).values[0]
        assert a == pytest.approx(b, abs=1e-12)

    @pytest.mark.parametrize(
        "xyz",
        [
            np.empty((0, 3)),
            np.array([[1.0, np.nan, 0.0]]),
            np.array([[1.0, np.inf, 0.0]]),
        ],
    )
    def test_rejects_bad_samples(self, xyz):
        with pytest.raises(IngestionError):
            RawRecording("s", xyz, FS)

    def test_rejects_bad_rate(self):
        with pytest.raises(IngestionError):
            RawRecording("s", np.ones((4, 3)), 0.0)

    def test_rejects_wrong_shape(self):
        with pytest.raises(IngestionError):
            RawRecording("s", np.ones((4, 2)), FS)


class TestButterworthLowpass:
    def test_passband_tone_unchanged(self):
        # 1 Hz is deep in the passband of a 20 Hz cutoff: <=1% amplitude change
        sig = MagnitudeSignal(tone(1.0), FS)
        out = butterworth_lowpass(sig, cutoff_hz=20.0, order=4)
        amp = lockin_amplitude(out.values, FS, 1.0)
        assert abs(amp - 1.0) <= 0.01

    def test_stopband_tone_rms(self):
        # 90 Hz through a 20 Hz cutoff: residual RMS under 1% of input RMS
        x = tone(90.0)
        out = butterworth_lowpass(MagnitudeSignal(x, FS), cutoff_hz=20.0, order=4)
        assert np.sqrt(np.mean(out.values**2)) < 0.01 * np.sqrt(np.mean(x**2))

    def test_stopband_attenuation_matches_magnitude_response(self):
        # net gain at 90 Hz, fc=20, order=4:
        # 1/(1 + (90/20)^8) = 5.946991353190725e-06
        expected = 5.946991353190725e-06
        out = butterworth_lowpass(MagnitudeSignal(tone(90.0), FS), 20.0, 4)
        measured = lockin_amplitude(out.values, FS, 90.0)
        assert measured == pytest.approx(expected, rel=0.1)

    @pytest.mark.parametrize("fc,order", [(20.0, 2), (40.0, 4), (60.0, 4), (99.0, 4)])
    def test_gain_tracks_analytic_curve(self, fc, order):
        for f in (5.0, 30.0, 70.0):
            out = butterworth_lowpass(MagnitudeSignal(tone(f), FS), fc, order)
            expected = 1.0 / (1.0 + (f / fc) ** (2 * order))
            assert lockin_amplitude(out.values, FS, f) == pytest.approx(expected, rel=1e-3)

    def test_constant_signal_unchanged(self):
        sig = MagnitudeSignal(np.full(1000, 9.81), FS)
        out = butterworth_lowpass(sig, 20.0, 4)
        np.testing.assert_allclose(out.values, sig.values, rtol=0, atol=1e-10)

    def test_deterministic(self):
        x = tone(7.3, duration_s=5.0)
        a = butterworth_lowpass(MagnitudeSignal(x, FS), 20.0, 4)
        b = butterworth_lowpass(MagnitudeSignal(x, FS), 20.0, 4)
        np.testing.assert_array_equal(a.values, b.values)

    def test_records_parameters(self):
        out = butterworth_lowpass(MagnitudeSignal(tone(1.0, duration_s=2.0), FS), 25.0, 2)
        assert out.filtered
        assert out.filter_params["cutoff_hz"] == 25.0
        assert out.filter_params["order"] == 2
        assert out.values.size == int(2.0 * FS)

    def test_short_signal(self):
        out = butterworth_lowpass(MagnitudeSignal(np.array([1.0, 2.0]), FS), 20.0, 4)
        assert out.values.size == 2
        assert np.all(np.isfinite(out.values))

    @pytest.mark.parametrize("fc,order", [(100.0, 4), (150.0, 4), (0.0, 4), (-5.0, 4), (20.0, 0), (20.0, 2.5)])
    def test_rejects_bad_parameters(self, fc, order):
        sig = MagnitudeSignal(tone(1.0, duration_s=1.0), FS)
        with pytest.raises(ConfigurationError):
            butterworth_lowpass(sig, fc, order)


class TestPowerSpectrum:
    def test_tone_lands_on_its_bin(self):
        spec = power_spectrum(MagnitudeSignal(tone(2.0, duration_s=10.0), FS))
        peak = spec.frequencies_hz[np.argmax(spec.power)]
        assert peak == pytest.approx(2.0, abs=spec.bin_width_hz / 2)

    def test_constant_concentrates_at_dc(self):
        spec = power_spectrum(MagnitudeSignal(np.full(400, 3.0), FS))
        assert np.max(spec.power[1:]) < 1e-9 * spec.power[0]

    @pytest.mark.parametrize("n", [2, 3, 16, 100, 255, 256, 1000])
    def test_parseval_identity(self, n, rng):
        s = rng.normal(size=n)
        spec = power_spectrum(s, FS)
        assert spec.weighted_energy() == pytest.approx(n * np.sum(s**2), rel=1e-6)

    @given(n=st.integers(2, 600))
    @settings(max_examples=60, deadline=None)
    def test_parseval_property(self, n):
        s = np.random.default_rng(n).normal(size=n)
        spec = power_spectrum(s, FS)
        assert spec.weighted_energy() == pytest.approx(n * np.sum(s**2), rel=1e-6)

    def test_pad_to_changes_resolution(self):
        s = tone(2.0, duration_s=1.0)
        spec = power_spectrum(s, FS, pad_to=1024)
        assert spec.n_fft == 1024
        assert spec.bin_width_hz == pytest.approx(FS / 1024)
        assert spec.power.size == 513

    def test_rejects_tiny_input(self):
        with pytest.raises(ConfigurationError):
            power_spectrum(np.array([1.0]), FS)

    def test_array_requires_rate(self):
        with pytest.raises(ConfigurationError):
            power_spectrum(np.ones(8))


class TestLoadRecording:
    def _write(self, path, text):
        path.write_text(text)
        return path

    def test_xyz_header(self, tmp_path):
        p = self._write(tmp_path / "S01.csv", "x,y,z\n1.0,0.0,0.0\n0.0,1.0,0.0\n")
        rec = load_recording(p, sampling_rate_hz=FS)
        assert rec.subject_id == "S01"
        assert rec.xyz.shape == (2, 3)

    def test_txyz_header(self, tmp_path):
        p = self._write(tmp_path / "a.csv", "t,x,y,z\n0.0,1,2,3\n0.005,4,5,6\n")
        rec = load_recording(p, sampling_rate_hz=FS, subject_id="S09")
        assert rec.subject_id == "S09"
        np.testing.assert_array_equal(rec.xyz[1], [4.0, 5.0, 6.0])

    def test_rejects_non_monotone_time(self, tmp_path):
        p = self._write(tmp_path / "a.csv", "t,x,y,z\n0.0,1,2,3\n0.0,4,5,6\n")
        with pytest.raises(IngestionError):
            load_recording(p, sampling_rate_hz=FS)

    @pytest.mark.parametrize("header", ["a,b,c", "x,y", "x,y,z,w", "z,y,x"])
    def test_rejects_wrong_header(self, tmp_path, header):
        p = self._write(tmp_path / "a.csv", header + "\n" + ",".join("1" * len(header.split(","))) + "\n")
        with pytest.raises(IngestionError):
            load_recording(p, sampling_rate_hz=FS)
