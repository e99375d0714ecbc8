"""Split a fused recording into the three consecutive TUG trials.

The detector works on the mean-subtracted magnitude signal: a rolling
median suppresses step-level spikes, the result is summed over
consecutive half-second windows, and windows whose sum exceeds a
threshold are marked active.  Runs of active windows become trial
candidates; exactly three must survive, otherwise the recording needs a
manual override (real cohorts contain a few such signals).

Threshold convention: comparing a *window sum* against a *per-sample
mean* is dimensionally inconsistent, and after mean subtraction the
literal comparison would be against a quantity the subtraction just
removed.  The threshold is therefore ``theta = threshold_scale *
mean(s) * window_samples`` with ``mean(s)`` taken before subtraction.
Setting ``threshold_scale = 1 / window_samples`` recovers the literal
``theta = mean(s)`` reading.  The choice is recorded in every
segmentation report.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.ndimage import median_filter

from .errors import ConfigurationError, TugaitError, ValidationError
from .signal_core import MagnitudeSignal

#: Acquisition-order labels: single-task, manual dual-task, cognitive dual-task.
DEFAULT_TRIAL_ORDER = ("TUG", "TUG-M", "TUG-C")

DEFAULT_WINDOW_S = 0.5
DEFAULT_THRESHOLD_SCALE = 0.02
DEFAULT_MIN_SEGMENT_S = 3.0  # no complete TUG trial is faster than this


class SegmentationAmbiguous(TugaitError):
    """Raised when the detector finds anything but exactly 3 segments.

    Carries the surviving candidate spans so a human can pick boundaries
    for a manual override.
    """

    def __init__(self, message: str, candidates: list[tuple[int, int]]):
        super().__init__(message)
        self.candidates = tuple((int(a), int(b)) for a, b in candidates)

    @property
    def n_candidates(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class TrialSegment:
    start: int  # inclusive sample index
    end: int  # exclusive sample index
    label: str

    @property
    def n_samples(self) -> int:
        return self.end - self.start

    def slice(self, values: np.ndarray) -> np.ndarray:
        return values[self.start : self.end]


@dataclass(frozen=True)
class TrialSegmentation:
    """Exactly three ordered, non-overlapping labeled trial spans."""

    segments: tuple[TrialSegment, TrialSegment, TrialSegment]
    source: str  # "automatic" | "manual_override"
    parameters: dict

    def __post_init__(self):
        if len(self.segments) != 3:
            raise ValidationError(
                f"a finalized segmentation has exactly 3 segments, got {len(self.segments)}"
            )
        prev_end = 0
        for seg in self.segments:
            if seg.start < prev_end or seg.end <= seg.start:
                raise ValidationError("segments must be ordered, non-empty, non-overlapping")
            prev_end = seg.end

    def by_label(self, label: str) -> TrialSegment:
        for seg in self.segments:
            if seg.label == label:
                return seg
        raise KeyError(label)

    def to_dict(self, sampling_rate_hz: float) -> dict:
        return {
            "source": self.source,
            "parameters": self.parameters,
            "segments": [
                {
                    "label": seg.label,
                    "start_sample": seg.start,
                    "end_sample": seg.end,
                    "start_s": seg.start / sampling_rate_hz,
                    "end_s": seg.end / sampling_rate_hz,
                }
                for seg in self.segments
            ],
        }


def default_k(sampling_rate_hz: float) -> int:
    """Rolling-median window: 0.25 s worth of samples, rounded up to odd."""
    k = max(3, round(0.25 * sampling_rate_hz))
    return k + 1 if k % 2 == 0 else k


def activity_profile(
    signal: MagnitudeSignal,
    k: int | None = None,
    window_s: float = DEFAULT_WINDOW_S,
    threshold_scale: float = DEFAULT_THRESHOLD_SCALE,
) -> dict:
    """Intermediate detector state, exposed for debugging and plot data.

    Returns the mean-subtracted median-filtered signal, the per-window
    sums ``g``, the threshold ``theta``, and the active mask after gap
    bridging.  ``segment_trials`` is a thin wrapper over this.
    """
    if k is None:
        k = default_k(signal.sampling_rate_hz)
    if k < 3 or k % 2 == 0:
        raise ConfigurationError(f"rolling-median window k must be odd and >= 3, got {k}")
    if window_s <= 0:
        raise ConfigurationError(f"window_s must be positive, got {window_s}")
    window_samples = round(window_s * signal.sampling_rate_hz)
    if window_samples < 1:
        raise ConfigurationError(f"window_s={window_s} is below one sample")
    if len(signal) <= 3 * window_samples:
        raise ValidationError(
            f"signal too short to hold three trials: {len(signal)} samples "
            f"<= 3 * {window_samples}"
        )

    s = signal.values
    mean_ref = float(np.mean(s))
    u = median_filter(s - mean_ref, size=k, mode="reflect")

    # Non-overlapping windows; a trailing partial window is dropped so every
    # sum competes against the same threshold.
    n_windows = u.size // window_samples
    g = u[: n_windows * window_samples].reshape(n_windows, window_samples).sum(axis=1)
    theta = threshold_scale * mean_ref * window_samples
    active = g > theta
    bridged = _bridge_single_gaps(active)

    return {
        "k": k,
        "window_s": window_s,
        "window_samples": window_samples,
        "threshold_scale": threshold_scale,
        "mean_ref": mean_ref,
        "theta": float(theta),
        "filtered": u,
        "window_sums": g,
        "active": bridged,
        "active_raw": active,
    }


def _bridge_single_gaps(active: np.ndarray) -> np.ndarray:
    """Mark inactive windows flanked by active ones on both sides as active.

    Mid-trial turns produce exactly this signature — one quiet window
    inside an otherwise active trial — and without bridging a trial
    splits in two.
    """
    out = active.copy()
    inner = (~active[1:-1]) & active[:-2] & active[2:]
    out[1:-1] |= inner
    return out


def _candidate_spans(active: np.ndarray, window_samples: int) -> list[tuple[int, int]]:
    edges = np.flatnonzero(np.diff(np.concatenate(([False], active, [False]))))
    starts, ends = edges[::2], edges[1::2]
    return [(int(a) * window_samples, int(b) * window_samples) for a, b in zip(starts, ends)]


def segment_trials(
    signal: MagnitudeSignal,
    k: int | None = None,
    window_s: float = DEFAULT_WINDOW_S,
    threshold_scale: float = DEFAULT_THRESHOLD_SCALE,
    min_segment_s: float = DEFAULT_MIN_SEGMENT_S,
    trial_order: tuple[str, str, str] = DEFAULT_TRIAL_ORDER,
) -> TrialSegmentation:
    """Detect the three TUG trials in a fused recording.

    Parameters
    ----------
    signal : MagnitudeSignal
        Fused (optionally filtered) magnitude signal.
    k : int, optional
        Rolling-median window in samples, odd and >= 3.  Defaults to
        0.25 s worth of samples (51 at 200 Hz).
    window_s : float
        Summation window length in seconds (default 0.5).
    threshold_scale : float
        Scale applied to ``mean(s) * window_samples`` to form the
        activity threshold; see module docstring.
    min_segment_s : float
        Candidates shorter than this are discarded before counting.
    trial_order : tuple of str
        Labels assigned to the segments in temporal order.

    Returns
    -------
    TrialSegmentation
        Exactly three labeled segments, ``source="automatic"``.

    Raises
    ------
    SegmentationAmbiguous
        If anything but exactly 3 candidates survive; carries the
        candidate spans for manual override.
    """
    prof = activity_profile(signal, k=k, window_s=window_s, threshold_scale=threshold_scale)
    spans = _candidate_spans(prof["active"], prof["window_samples"])
    min_samples = min_segment_s * signal.sampling_rate_hz
    spans = [sp for sp in spans if sp[1] - sp[0] >= min_samples]

    if len(spans) != 3:
        raise SegmentationAmbiguous(
            f"expected 3 trial segments, found {len(spans)} "
            f"(theta={prof['theta']:.6g}, k={prof['k']}); manual override required",
            candidates=spans,
        )
    params = {
        "k": prof["k"],
        "window_s": prof["window_s"],
        "threshold_scale": prof["threshold_scale"],
        "min_segment_s": min_segment_s,
        "theta": prof["theta"],
    }
    segments = tuple(
        TrialSegment(start=a, end=b, label=lab) for (a, b), lab in zip(spans, trial_order)
    )
    return TrialSegmentation(segments=segments, source="automatic", parameters=params)


def apply_override(
    signal: MagnitudeSignal,
    boundaries: list[tuple[float, float]],
    trial_order: tuple[str, str, str] = DEFAULT_TRIAL_ORDER,
) -> TrialSegmentation:
    """Build a segmentation from hand-picked ``(start_s, end_s)`` pairs.

    Pairs must be ordered, non-overlapping, and inside the recording.
    Indices are ``round(seconds * sampling_rate)``.
    """
    if len(boundaries) != 3:
        raise ValidationError(f"need exactly 3 (start_s, end_s) pairs, got {len(boundaries)}")
    fs = signal.sampling_rate_hz
    duration = len(signal) / fs
    prev_end = 0.0
    segments = []
    for (start_s, end_s), label in zip(boundaries, trial_order):
        if start_s < 0 or end_s > duration:
            raise ValidationError(
                f"override ({start_s}, {end_s}) outside recording of {duration:.3f} s"
            )
        if start_s >= end_s:
            raise ValidationError(f"override ({start_s}, {end_s}) is empty or inverted")
        if start_s < prev_end:
            raise ValidationError(f"override ({start_s}, {end_s}) overlaps the previous pair")
        prev_end = end_s
        segments.append(
            TrialSegment(start=round(start_s * fs), end=round(end_s * fs), label=label)
        )
    return TrialSegmentation(
        segments=tuple(segments),
        source="manual_override",
        parameters={"boundaries_s": [list(map(float, b)) for b in boundaries]},
    )


OVERRIDE_COLUMNS = [
    "subject_id",
    "start1_s",
    "end1_s",
    "start2_s",
    "end2_s",
    "start3_s",
    "end3_s",
]


def load_overrides(path: str | Path) -> dict[str, list[tuple[float, float]]]:
    """Read the manual-override sidecar CSV into ``{subject_id: 3 pairs}``."""
    frame = pd.read_csv(path)
    cols = [c.strip() for c in frame.columns]
    if cols != OVERRIDE_COLUMNS:
        raise ValidationError(
            f"{path}: expected header {','.join(OVERRIDE_COLUMNS)}, got {','.join(cols)}"
        )
    out: dict[str, list[tuple[float, float]]] = {}
    for row in frame.itertuples(index=False):
        out[str(row.subject_id)] = [
            (float(row.start1_s), float(row.end1_s)),
            (float(row.start2_s), float(row.end2_s)),
            (float(row.start3_s), float(row.end3_s)),
        ]
    return out
