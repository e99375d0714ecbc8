"""tugait: accelerometer-based TUG gait analysis for faller identification.

Library-first: each stage is an importable pure function (see the
``demos/`` scripts for narrative walkthroughs), with a thin CLI on top
for batch runs.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    FeatureError,
    IngestionError,
    TugaitError,
    ValidationError,
)
from .features import (
    FUSION_PRESETS,
    FeatureVector,
    SpectralFeatureSet,
    add_fusion_columns,
    base_feature_names,
    build_cohort_table,
    build_feature_vector,
    distance_feature,
    distance_feature_names,
    fuse_average,
    minmax_normalize,
    pse,
    read_feature_table,
    spectral_features,
    spectral_peaks,
    wpsp,
)
from .pipeline import (
    PipelineConfig,
    RunResult,
    build_report,
    config_from_dict,
    load_config,
    run_pipeline,
)
from .segmentation import (
    SegmentationAmbiguous,
    TrialSegment,
    TrialSegmentation,
    apply_override,
    segment_trials,
)
from .signal_core import (
    FFT_CONVENTION,
    MagnitudeSignal,
    PowerSpectrum,
    RawRecording,
    butterworth_lowpass,
    load_recording,
    magnitude_fuse,
    power_spectrum,
)
from .stats import (
    GroupComparison,
    RocResult,
    analyze_variable,
    bootstrap_auc_ci,
    fisher_exact,
    mann_whitney_u,
    optimal_cutoff,
    roc_curve,
    welch_t_test,
)
from .synth import SynthSpec, build_subject_signal, generate_synthetic_corpus

__all__ = [
    "ConfigurationError",
    "FeatureError",
    "IngestionError",
    "TugaitError",
    "ValidationError",
    "FUSION_PRESETS",
    "FeatureVector",
    "SpectralFeatureSet",
    "add_fusion_columns",
    "base_feature_names",
    "build_cohort_table",
    "build_feature_vector",
    "distance_feature",
    "distance_feature_names",
    "fuse_average",
    "minmax_normalize",
    "pse",
    "read_feature_table",
    "spectral_features",
    "spectral_peaks",
    "wpsp",
    "PipelineConfig",
    "RunResult",
    "build_report",
    "config_from_dict",
    "load_config",
    "run_pipeline",
    "SegmentationAmbiguous",
    "TrialSegment",
    "TrialSegmentation",
    "apply_override",
    "segment_trials",
    "FFT_CONVENTION",
    "MagnitudeSignal",
    "PowerSpectrum",
    "RawRecording",
    "butterworth_lowpass",
    "load_recording",
    "magnitude_fuse",
    "power_spectrum",
    "GroupComparison",
    "RocResult",
    "analyze_variable",
    "bootstrap_auc_ci",
    "fisher_exact",
    "mann_whitney_u",
    "optimal_cutoff",
    "roc_curve",
    "welch_t_test",
    "SynthSpec",
    "build_subject_signal",
    "generate_synthetic_corpus",
]
