"""Spectral features, distance features, and normalized-average fusion.

Ten features per source signal — power spectral entropy (PSE), the
frequencies of the three largest spectral peaks (PSPF), those peak
amplitudes (PSP), and the frequency-weighted amplitudes (WPSP) — over
four sources: the three TUG trials plus the concatenation of the
segmented regions ("whole signal"; samples outside the trials are
ignored).  That gives the 40 base features; absolute per-feature
differences between source pairs add the distance features.

Conventions fixed here:

* PSE is computed on the unit-sum-normalized one-sided spectrum (DC bin
  included), natural log, with the epsilon inside the log kept at its
  published value 0.001.  Raw ``|F|^2`` grows with length and amplitude,
  which would make entropies incomparable across subjects; the
  unnormalized variant stays available via ``normalize=False``.
* Peak search excludes DC always, and by default an exclusion
  neighborhood of +/-2 bins around every chosen peak so three peaks
  mean three spectral structures, not three bins of one lobe.
  ``exclusion_bins=0`` gives the literal exact-bin-removal reading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import FeatureError, ValidationError
from .segmentation import TrialSegmentation
from .signal_core import MagnitudeSignal, PowerSpectrum, power_spectrum

#: A peak must carry at least this fraction of total spectral power to be
#: selectable; keeps float dust in an analytically-flat spectrum (e.g. a
#: constant signal) from masquerading as a peak.
PEAK_FLOOR_REL = 1e-12

BASE_COMPONENTS = (
    "pse",
    "pspf1",
    "pspf2",
    "pspf3",
    "psp1",
    "psp2",
    "psp3",
    "wpsp1",
    "wpsp2",
    "wpsp3",
)
SOURCES = ("s", "t", "m", "c")
SOURCE_TRIAL_LABELS = {"t": "TUG", "m": "TUG-M", "c": "TUG-C"}
SOURCE_PAIRS = (("s", "t"), ("s", "m"), ("s", "c"), ("t", "m"), ("t", "c"), ("m", "c"))

#: Published fusion presets: averages of min-max-normalized columns.
FUSION_PRESETS = {
    "feats_avg": ("pse_c", "wpsp2_c", "wpsp3_c"),
    "dists_avg": ("d_pse_s_c", "d_psp1_s_c", "d_pspf1_t_m", "d_wpsp1_m_c"),
}


def base_feature_names() -> list[str]:
    return [f"{comp}_{src}" for src in SOURCES for comp in BASE_COMPONENTS]


def distance_feature_names() -> list[str]:
    return [f"d_{comp}_{a}_{b}" for a, b in SOURCE_PAIRS for comp in BASE_COMPONENTS]


@dataclass(frozen=True)
class SpectralFeatureSet:
    """The ten spectral features of one source signal."""

    pse: float
    pspf: tuple[float, float, float]
    psp: tuple[float, float, float]
    wpsp: tuple[float, float, float]

    def components(self) -> dict[str, float]:
        # keyed and ordered exactly as BASE_COMPONENTS
        out = {"pse": self.pse}
        for name, triple in (("pspf", self.pspf), ("psp", self.psp), ("wpsp", self.wpsp)):
            for i in range(3):
                out[f"{name}{i + 1}"] = triple[i]
        return out


@dataclass(frozen=True)
class FeatureVector:
    """All per-subject features: 40 base + one distance per (feature, pair)."""

    sources: dict  # source code -> SpectralFeatureSet
    distances: dict  # "d_<comp>_<a>_<b>" -> float

    def flatten(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for src in SOURCES:
            for comp, value in self.sources[src].components().items():
                out[f"{comp}_{src}"] = value
        out.update(self.distances)
        return out


def pse(spectrum: PowerSpectrum, epsilon: float = 0.001, *, normalize: bool = True) -> float:
    """Power spectral entropy ``-sum(S * ln(S + epsilon))``.

    With ``normalize=True`` (default) the spectrum is scaled to unit sum
    first, making values comparable across segment lengths and energies.
    An all-zero spectrum has no spread to measure and returns 0.
    """
    s = spectrum.power
    if normalize:
        total = s.sum()
        if total == 0.0:
            return 0.0
        s = s / total
    return float(-np.sum(s * np.log(s + epsilon)))


def spectral_peaks(
    spectrum: PowerSpectrum, n_peaks: int = 3, exclusion_bins: int = 2
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Frequencies and amplitudes of the ``n_peaks`` largest spectrum values.

    Iterative argmax over the non-DC bins; after each pick, the chosen
    bin and ``exclusion_bins`` neighbors on each side are removed from
    further consideration.  Amplitudes come out non-increasing by
    construction.  Ties resolve to the lower frequency.

    Raises
    ------
    FeatureError
        If fewer than ``n_peaks`` selectable bins exist (too-short
        spectrum, or nothing above the relative power floor — e.g. a
        constant signal).
    """
    power = spectrum.power
    if power.size - 1 < 4:
        raise FeatureError(f"peak search needs >= 4 non-DC bins, got {power.size - 1}")
    selectable = np.ones(power.size, dtype=bool)
    selectable[0] = False  # DC is never a gait peak
    floor = PEAK_FLOOR_REL * float(power.sum())

    freqs: list[float] = []
    amps: list[float] = []
    for _ in range(n_peaks):
        idx = np.flatnonzero(selectable & (power > floor))
        if idx.size == 0:
            raise FeatureError(
                f"only {len(freqs)} of {n_peaks} peaks found above the exclusion floor"
            )
        k = idx[np.argmax(power[idx])]
        freqs.append(float(spectrum.frequencies_hz[k]))
        amps.append(float(power[k]))
        selectable[max(0, k - exclusion_bins) : k + exclusion_bins + 1] = False
    return tuple(freqs), tuple(amps)


def wpsp(pspf: tuple[float, ...], psp: tuple[float, ...]) -> tuple[float, ...]:
    """Frequency-weighted peak amplitudes: elementwise ``pspf * psp``."""
    return tuple(f * p for f, p in zip(pspf, psp))


def spectral_features(
    segment: np.ndarray,
    sampling_rate_hz: float,
    *,
    epsilon: float = 0.001,
    normalize_pse: bool = True,
    exclusion_bins: int = 2,
    pad_to: int | None = None,
) -> SpectralFeatureSet:
    """Compute the ten spectral features of one 1-D segment."""
    spec = power_spectrum(segment, sampling_rate_hz, pad_to=pad_to)
    pspf_v, psp_v = spectral_peaks(spec, exclusion_bins=exclusion_bins)
    return SpectralFeatureSet(
        pse=pse(spec, epsilon, normalize=normalize_pse),
        pspf=pspf_v,
        psp=psp_v,
        wpsp=wpsp(pspf_v, psp_v),
    )


def distance_feature(fv_a: float, fv_b: float) -> float:
    """Scalar Euclidean distance, i.e. ``|a - b|``."""
    return abs(float(fv_a) - float(fv_b))


def build_feature_vector(
    signal: MagnitudeSignal,
    seg: TrialSegmentation,
    *,
    epsilon: float = 0.001,
    normalize_pse: bool = True,
    exclusion_bins: int = 2,
    pad_to: int | None = None,
) -> FeatureVector:
    """Extract all features for one subject from its segmented recording.

    The "whole signal" source is the time-ordered concatenation of the
    three trial regions; everything between trials is discarded.
    """
    fs = signal.sampling_rate_hz
    kwargs = dict(
        epsilon=epsilon,
        normalize_pse=normalize_pse,
        exclusion_bins=exclusion_bins,
        pad_to=pad_to,
    )
    trial_values = {
        src: seg.by_label(label).slice(signal.values)
        for src, label in SOURCE_TRIAL_LABELS.items()
    }
    sources = {src: spectral_features(vals, fs, **kwargs) for src, vals in trial_values.items()}
    whole = np.concatenate([s.slice(signal.values) for s in seg.segments])
    sources["s"] = spectral_features(whole, fs, **kwargs)

    distances = {}
    for a, b in SOURCE_PAIRS:
        comp_a, comp_b = sources[a].components(), sources[b].components()
        for comp in BASE_COMPONENTS:
            distances[f"d_{comp}_{a}_{b}"] = distance_feature(comp_a[comp], comp_b[comp])
    return FeatureVector(sources=sources, distances=distances)


def minmax_normalize(column: np.ndarray) -> np.ndarray:
    """Scale to [0, 1]; a constant column maps to all 0.5.

    0.5 is the neutral element for averaging fusion — a column with no
    spread should not pull fused scores toward either end.
    """
    v = np.asarray(column, dtype=float)
    if v.size < 2:
        raise ValidationError("min-max normalization needs a cohort of >= 2 subjects")
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.full(v.shape, 0.5)
    return (v - lo) / (hi - lo)


def fuse_average(columns: list[np.ndarray]) -> np.ndarray:
    """Per-subject mean of already-normalized columns."""
    if not columns:
        raise ValidationError("fusion needs at least one column")
    arrs = [np.asarray(c, dtype=float) for c in columns]
    n = arrs[0].size
    if any(a.size != n for a in arrs):
        raise ValidationError("fusion columns must have equal lengths")
    return np.mean(np.column_stack(arrs), axis=1)


def add_fusion_columns(
    frame: pd.DataFrame, presets: dict[str, tuple[str, ...]] | None = None
) -> dict[str, list[str]]:
    """Append fusion preset columns to a cohort table, in place.

    Each preset is the mean of the min-max-normalized component columns.
    Presets whose components are missing from the table are skipped and
    reported, so a reduced external dataset degrades loudly rather than
    silently.  Returns ``{"applied": [...], "missing": [...]}``.
    """
    presets = FUSION_PRESETS if presets is None else presets
    applied, missing = [], []
    for name, components in presets.items():
        absent = [c for c in components if c not in frame.columns]
        if absent:
            missing.append(name)
            continue
        normalized = [minmax_normalize(frame[c].to_numpy()) for c in components]
        frame[name] = fuse_average(normalized)
        applied.append(name)
    return {"applied": applied, "missing": missing}


def build_cohort_table(
    rows: list[tuple[str, int, str | None, FeatureVector]]
) -> pd.DataFrame:
    """Assemble (subject_id, faller, gender, features) rows into a table."""
    records = []
    has_gender = any(g is not None for _, _, g, _ in rows)
    for subject_id, faller, gender, fv in rows:
        rec = {"subject_id": subject_id, "faller": int(faller)}
        if has_gender:
            rec["gender"] = gender
        rec.update(fv.flatten())
        records.append(rec)
    return pd.DataFrame(records)


def read_feature_table(
    path, column_mapping: dict[str, str] | None = None
) -> pd.DataFrame:
    """Load a feature CSV, optionally renaming external columns to internal names.

    Requires a ``faller`` column (after mapping) with values in {0, 1}.
    Lines starting with ``#`` are provenance comments and are skipped.
    """
    frame = pd.read_csv(path, comment="#")
    if column_mapping:
        frame = frame.rename(columns=dict(column_mapping))
    if "faller" not in frame.columns:
        raise ValidationError(f"{path}: no 'faller' column (add a column_mapping?)")
    labels = frame["faller"].to_numpy()
    if not np.isin(labels, (0, 1)).all():
        raise ValidationError(f"{path}: 'faller' must be 0/1")
    return frame
