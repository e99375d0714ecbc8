"""Magnitude fusion and zero-phase low-pass filtering.

Shows that the fused magnitude ignores sensor orientation and that the
filter's measured attenuation tracks the analytic Butterworth curve.
Attenuation is measured by projecting the output onto the probe tone
over the signal interior (a lock-in), which is how you measure deep
stopband gains without edge transients swamping the number.
"""

import numpy as np

from tugait.signal_core import MagnitudeSignal, RawRecording, butterworth_lowpass, magnitude_fuse

FS = 200.0


def lockin_amplitude(values, fs, freq):
    n = values.size
    lo, hi = int(0.1 * n), int(0.9 * n)
    t = np.arange(n)[lo:hi] / fs
    seg = values[lo:hi]
    return float(
        np.hypot(
            2 * np.mean(seg * np.cos(2 * np.pi * freq * t)),
            2 * np.mean(seg * np.sin(2 * np.pi * freq * t)),
        )
    )


rng = np.random.default_rng(1)

# --- orientation independence -------------------------------------------
t = np.arange(int(10 * FS)) / FS
xyz = np.column_stack(
    [0.1 * np.sin(2 * np.pi * 1.3 * t), 0.05 * np.cos(2 * np.pi * 2.1 * t), 1.0 + 0.2 * np.sin(2 * np.pi * 0.7 * t)]
)
q, _ = np.linalg.qr(rng.normal(size=(3, 3)))  # a random re-mounting of the sensor
mag_a = magnitude_fuse(RawRecording("upright", xyz, FS)).values
mag_b = magnitude_fuse(RawRecording("rotated", xyz @ q.T, FS)).values
print("orientation independence:")
print(f"  max |magnitude difference| after random rotation: {np.max(np.abs(mag_a - mag_b)):.2e}")

# --- filter response ------------------------------------------------------
print("\nzero-phase Butterworth (cutoff 20 Hz, order 4), net gain per tone:")
print(f"  {'freq':>6}  {'measured':>12}  {'analytic':>12}")
for freq in (1.0, 5.0, 15.0, 20.0, 30.0, 60.0, 90.0):
    probe = np.sin(2 * np.pi * freq * np.arange(int(100 * FS)) / FS)
    out = butterworth_lowpass(MagnitudeSignal(probe, FS), cutoff_hz=20.0, order=4)
    measured = lockin_amplitude(out.values, FS, freq)
    analytic = 1.0 / (1.0 + (freq / 20.0) ** 8)
    print(f"  {freq:5.0f}   {measured:12.6e}  {analytic:12.6e}")

print("\nthe 20 Hz point sits at the half-power gain (amplitude 0.5 here,")
print("since the zero-phase pass applies the squared magnitude response)")
