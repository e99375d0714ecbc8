"""Deterministic synthetic TUG corpus with exact ground truth.

Test oracle for the whole pipeline: every recording is built from known
trial boundaries and known tone sets, so segmentation recovery and
spectral-peak features can be checked against construction instead of
against other code.

Signal model per subject (before optional re-orientation):

* gravity baseline of 1 g on the z axis, x = y = 0;
* during each trial, a constant offset (default 0.4 g) plus a sum of
  low-frequency tones is added on z — the offset is what the window-sum
  detector sees, the tones are what the spectral features see;
* white Gaussian noise on all three axes.

The offset rides *on* the gravity axis so the fused magnitude carries
the tones at their true frequencies (tones on an orthogonal axis would
frequency-double under the norm).  An optional random orthonormal
rotation is applied per subject to every sample; fusion removes it
exactly, so downstream results must not depend on it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import ConfigurationError

DEFAULT_FALLER_TONES = [[1.8, 3.6, 5.4]] * 3
DEFAULT_NONFALLER_TONES = [[1.2, 2.4, 3.6]] * 3


@dataclass(frozen=True)
class SynthSpec:
    """Generator parameters; defaults give a cleanly separable 36-subject cohort."""

    n_subjects: int = 36
    faller_fraction: float = 0.5
    sampling_rate_hz: float = 200.0
    n_trials: int = 3
    burst_s: tuple[float, float] = (8.0, 15.0)  # trial duration range
    gap_s: tuple[float, float] = (3.0, 8.0)  # lead-in / between / tail range
    burst_offset_g: float = 0.4
    tone_amps_g: tuple[float, ...] = (0.15, 0.10, 0.07)
    faller_tones_hz: list = field(default_factory=lambda: [list(t) for t in DEFAULT_FALLER_TONES])
    nonfaller_tones_hz: list = field(
        default_factory=lambda: [list(t) for t in DEFAULT_NONFALLER_TONES]
    )
    noise_g: float = 0.01
    rotate: bool = True
    #: Quantize each burst's sample count so every tone frequency lands
    #: exactly on a DFT bin of the true trial segment.  With this on (and
    #: zero noise) a single tone concentrates all non-DC energy in one bin.
    bin_align_tones: bool = False

    def __post_init__(self):
        if self.n_subjects < 1:
            raise ConfigurationError("n_subjects must be >= 1")
        if self.n_trials < 1:
            raise ConfigurationError("n_trials must be >= 1")
        if not 0.0 <= self.faller_fraction <= 1.0:
            raise ConfigurationError(f"faller_fraction must be in [0, 1], got {self.faller_fraction}")
        for lo, hi in (self.burst_s, self.gap_s):
            if not 0 < lo <= hi:
                raise ConfigurationError(f"invalid duration range ({lo}, {hi})")
        for tones in (self.faller_tones_hz, self.nonfaller_tones_hz):
            if len(tones) != self.n_trials:
                raise ConfigurationError(
                    f"need one tone list per trial ({self.n_trials}), got {len(tones)}"
                )


def synth_spec_from_dict(d: dict) -> SynthSpec:
    """Build a SynthSpec from a parsed config mapping (lists become tuples)."""
    kwargs = dict(d)
    for key in ("burst_s", "gap_s", "tone_amps_g"):
        if key in kwargs:
            kwargs[key] = tuple(kwargs[key])
    return SynthSpec(**kwargs)


def _random_rotation(rng: np.random.Generator) -> np.ndarray:
    # QR of a Gaussian matrix; sign-fix the diagonal so the draw is unique
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    return q * np.sign(np.diag(r))


def _tone_quantum_samples(tones_hz, sampling_rate_hz: float) -> int:
    """Smallest N such that every tone is an integer multiple of fs/N.

    A tone f is bin-aligned over N samples iff N * f / fs is an integer,
    i.e. N is a multiple of the reduced denominator of f/fs.  Frequencies
    are taken at millihertz resolution.
    """
    quantum = 1
    for f in tones_hz:
        frac = Fraction(round(f * 1000), round(sampling_rate_hz * 1000))
        quantum = math.lcm(quantum, frac.denominator)
    return quantum


def build_subject_signal(
    spec: SynthSpec, rng: np.random.Generator, faller: bool
) -> tuple[np.ndarray, dict]:
    """Generate one subject's (n, 3) samples plus its ground truth.

    Returns
    -------
    xyz : ndarray
        Triaxial samples in g, after optional rotation.
    truth : dict
        True trial boundaries in seconds, tone sets, and the rotation flag.
    """
    fs = spec.sampling_rate_hz
    tones = spec.faller_tones_hz if faller else spec.nonfaller_tones_hz

    bursts = rng.uniform(*spec.burst_s, size=spec.n_trials)
    gaps = rng.uniform(*spec.gap_s, size=spec.n_trials + 1)

    # lay the trials out sample-exactly before allocating the array
    boundary_samples = []
    cursor = int(round(gaps[0] * fs))
    for i in range(spec.n_trials):
        n_burst = int(round(bursts[i] * fs))
        if spec.bin_align_tones:
            quantum = _tone_quantum_samples(tones[i], fs)
            n_burst = max(quantum, round(n_burst / quantum) * quantum)
        boundary_samples.append((cursor, cursor + n_burst))
        cursor = cursor + n_burst + int(round(gaps[i + 1] * fs))
    n = cursor

    t = np.arange(n) / fs
    z = np.ones(n)
    boundaries = []
    for i, (i0, i1) in enumerate(boundary_samples):
        seg_t = t[i0:i1]
        z[i0:i1] += spec.burst_offset_g
        for amp, freq in zip(spec.tone_amps_g, tones[i]):
            phase = rng.uniform(0, 2 * np.pi)
            z[i0:i1] += amp * np.sin(2 * np.pi * freq * seg_t + phase)
        boundaries.append((i0 / fs, i1 / fs))

    xyz = np.zeros((n, 3))
    xyz[:, 2] = z
    xyz += rng.normal(0.0, spec.noise_g, size=(n, 3))
    if spec.rotate:
        xyz = xyz @ _random_rotation(rng).T

    truth = {
        "faller": int(faller),
        "boundaries_s": boundaries,
        "boundaries_samples": [list(b) for b in boundary_samples],
        "tones_hz": [list(map(float, tr)) for tr in tones],
        "tone_amps_g": list(spec.tone_amps_g),
        "rotated": bool(spec.rotate),
    }
    return xyz, truth


def generate_synthetic_corpus(spec: SynthSpec, seed: int, outdir: str | Path) -> dict:
    """Write a full corpus: recordings, labels sidecar, and ground truth.

    Layout under ``outdir``::

        recordings/<subject_id>.csv   x,y,z samples in g
        subjects.csv                  subject_id,faller,gender
        truth.json                    per-subject boundaries/tones + params

    Deterministic: same (spec, seed) produces byte-identical files.
    """
    outdir = Path(outdir)
    rec_dir = outdir / "recordings"
    rec_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    n_fallers = round(spec.n_subjects * spec.faller_fraction)
    rows = []
    truth: dict = {
        "seed": seed,
        "spec": asdict(spec),
        "sampling_rate_hz": spec.sampling_rate_hz,
        "subjects": {},
    }
    for i in range(spec.n_subjects):
        subject_id = f"S{i + 1:02d}"
        faller = i < n_fallers
        xyz, subject_truth = build_subject_signal(spec, rng, faller)
        frame = pd.DataFrame(xyz, columns=["x", "y", "z"])
        frame.to_csv(rec_dir / f"{subject_id}.csv", index=False, float_format="%.9g")
        gender = "F" if rng.uniform() < 0.5 else "M"
        rows.append({"subject_id": subject_id, "faller": int(faller), "gender": gender})
        truth["subjects"][subject_id] = subject_truth

    pd.DataFrame(rows).to_csv(outdir / "subjects.csv", index=False)
    with open(outdir / "truth.json", "w") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
    return truth
