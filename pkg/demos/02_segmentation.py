"""Trial segmentation: recovery, ambiguity, and manual override.

Generates one synthetic subject with known burst boundaries, runs the
detector, and compares.  Then shows what an ambiguous recording looks
like (four bursts) and how a manual override resolves it.
"""

import numpy as np

from tugait.segmentation import SegmentationAmbiguous, apply_override, segment_trials
from tugait.signal_core import MagnitudeSignal
from tugait.synth import SynthSpec, build_subject_signal

spec = SynthSpec(n_subjects=1)
fs = spec.sampling_rate_hz

xyz, truth = build_subject_signal(spec, np.random.default_rng(42), faller=True)
sig = MagnitudeSignal(np.sqrt((xyz**2).sum(axis=1)), fs)
seg = segment_trials(sig)

print("automatic segmentation vs generator truth:")
print(f"  {'trial':>6}  {'detected':>16}  {'truth':>16}  {'worst edge err':>14}")
for s, (t0, t1) in zip(seg.segments, truth["boundaries_s"]):
    err = max(abs(s.start / fs - t0), abs(s.end / fs - t1))
    print(
        f"  {s.label:>6}  [{s.start / fs:6.2f}, {s.end / fs:6.2f}]"
        f"  [{t0:6.2f}, {t1:6.2f}]  {err:11.3f} s"
    )
print(f"  threshold theta = {seg.parameters['theta']:.3f} (scale {seg.parameters['threshold_scale']})")

# --- an ambiguous recording ------------------------------------------------
t = np.arange(int(65 * fs)) / fs
s = np.ones(t.size)
four_bursts = [(5, 15), (20, 30), (35, 45), (50, 58)]
for t0, t1 in four_bursts:
    m = (t >= t0) & (t < t1)
    s[m] += 0.4 + np.sin(2 * np.pi * 2.0 * t[m])
ambiguous = MagnitudeSignal(s, fs)

try:
    segment_trials(ambiguous)
except SegmentationAmbiguous as exc:
    print(f"\nfour-burst recording: {exc.n_candidates} candidates, detector refuses to guess:")
    for a, b in exc.candidates:
        print(f"  candidate [{a / fs:6.2f}, {b / fs:6.2f}] s")

# a human looks at the candidates and picks the three real trials
override = apply_override(ambiguous, [(5.0, 15.0), (20.0, 30.0), (35.0, 45.0)])
print("\nmanual override accepted:")
for seg_ in override.segments:
    print(f"  {seg_.label}: [{seg_.start / fs:.2f}, {seg_.end / fs:.2f}] s (source={override.source})")
