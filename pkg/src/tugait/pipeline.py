"""Configuration, orchestration, and report emission.

Two run modes share the statistics stage:

* ``raw_signals``: fuse → filter → segment → features per subject, emit
  the feature table, then run statistics;
* ``precomputed_features``: load an existing feature CSV (e.g. a
  published dataset) and run statistics only.

Reproducibility rules enforced here:

* The statistics stage always consumes the *serialized* feature table —
  the raw path writes ``feature_table.csv`` and reads it back before any
  test runs.  Serialization rounds to 9 significant digits, so feeding
  the emitted table into ``precomputed_features`` mode reproduces the
  raw run's statistics byte for byte; the stats stage cannot see
  precision the table file does not carry.
* No output contains timestamps or machine identity.  Floats are
  written with ``%.9g`` everywhere.
* The run manifest records the verbatim config plus its hash.  Stats
  outputs are stamped with a *stats-scope* hash (stats config + feature
  table digest) rather than the full config hash, precisely so the two
  modes emit identical bytes when fed the same table.
"""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import pandas as pd

from . import __version__
from .errors import ConfigurationError, TugaitError, ValidationError
from .features import (
    FUSION_PRESETS,
    add_fusion_columns,
    base_feature_names,
    build_cohort_table,
    build_feature_vector,
    distance_feature_names,
    read_feature_table,
)
from .segmentation import (
    SegmentationAmbiguous,
    apply_override,
    load_overrides,
    segment_trials,
)
from .signal_core import FFT_CONVENTION, butterworth_lowpass, load_recording, magnitude_fuse
from .stats import (
    _cutoff_value,
    _point_metrics,
    analyze_variable,
    fisher_exact,
    mann_whitney_u,
    welch_t_test,
)

DEFAULT_ROC_VARIABLES = (
    "pse_c",
    "wpsp2_c",
    "wpsp3_c",
    "d_pse_s_c",
    "d_psp1_s_c",
    "d_pspf1_t_m",
    "d_wpsp1_m_c",
    "feats_avg",
    "dists_avg",
)
DURATION_COLUMNS = ("tug_duration_s", "tugm_duration_s", "tugc_duration_s")
LABEL_COLUMNS = ("subject_id", "faller", "gender")

#: Interpretation notes repeated in the manifest and every report, so no
#: number travels without its conventions.
CONVENTION_NOTES = [
    f"FFT convention: {FFT_CONVENTION}.",
    "PSE is computed on the unit-sum-normalized spectrum (DC bin included), "
    "natural log, epsilon = 0.001 inside the log; set normalize_pse=false "
    "for the literal unnormalized form.",
    "Segmentation threshold: theta = threshold_scale * mean(s) * window_samples. "
    "Comparing a window sum against a bare per-sample mean mixes units, so the "
    "scaled form is the default; threshold_scale = 1/window_samples recovers "
    "the literal theta = mean(s) comparison.",
    "Feature vector: 10 spectral features per source over 4 sources (s, t, m, c) "
    "= 40 base features; distance features cover all six unordered source "
    "pairs, including (m, c).",
    "Distance references without an explicit peak index resolve to index 1 "
    "(e.g. d_psp_s_c means d_psp1_s_c); golden-number comparisons must name "
    "indices explicitly.",
]


def fmt9(x: float) -> str:
    return f"{float(x):.9g}"


def round9(obj):
    """Recursively round floats to 9 significant digits for canonical JSON."""
    if isinstance(obj, float):
        return float(fmt9(obj))
    if isinstance(obj, dict):
        return {k: round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round9(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(fmt9(float(obj)))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def canonical_json(obj) -> str:
    return json.dumps(round9(obj), indent=2, sort_keys=True)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class FilterParams:
    enabled: bool = True
    cutoff_hz: float = 99.0  # 0.99 * Nyquist at the nominal 200 Hz rate
    order: int = 4


@dataclass(frozen=True)
class SegmentationParams:
    k: int | None = None  # None -> 0.25 s worth of samples, odd
    window_s: float = 0.5
    threshold_scale: float = 0.02
    min_segment_s: float = 3.0
    override_file: str | None = None


@dataclass(frozen=True)
class FeatureParams:
    epsilon: float = 0.001
    normalize_pse: bool = True
    exclusion_bins: int = 2
    pad_to: int | None = None


@dataclass(frozen=True)
class StatsParams:
    resamples: int = 2000
    seed: int = 0
    alpha: float = 0.05
    roc_variables: tuple | str = "default"  # "default" | "all" | explicit list
    welch_variables: tuple = DURATION_COLUMNS


@dataclass(frozen=True)
class PipelineConfig:
    mode: str
    dataset: str
    output_dir: str
    sampling_rate_hz: float = 200.0
    filter: FilterParams = field(default_factory=FilterParams)
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    features: FeatureParams = field(default_factory=FeatureParams)
    stats: StatsParams = field(default_factory=StatsParams)
    column_mapping: dict = field(default_factory=dict)
    golden: dict | None = None

    def __post_init__(self):
        if self.mode not in ("raw_signals", "precomputed_features"):
            raise ConfigurationError(
                f"mode must be raw_signals or precomputed_features, got {self.mode!r}"
            )
        if self.sampling_rate_hz <= 0:
            raise ConfigurationError("sampling_rate_hz must be positive")

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("filter", "segmentation", "features", "stats"):
            sub = d[key]
            for k, v in list(sub.items()):
                if isinstance(v, tuple):
                    sub[k] = list(v)
        return d

    def config_hash(self) -> str:
        # identifies the analysis semantics; where outputs land is not part
        # of what was computed
        d = self.as_dict()
        d.pop("output_dir")
        return _digest(canonical_json(d))


_SECTION_TYPES = {
    "filter": FilterParams,
    "segmentation": SegmentationParams,
    "features": FeatureParams,
    "stats": StatsParams,
}


def config_from_dict(raw: dict) -> PipelineConfig:
    """Build a validated PipelineConfig from a parsed config mapping.

    Unknown keys anywhere are configuration errors — a typo in a knob
    name must not silently fall back to a default.
    """
    if not isinstance(raw, dict):
        raise ConfigurationError("config root must be a mapping")
    raw = dict(raw)
    kwargs = {}
    for section, cls in _SECTION_TYPES.items():
        sub = raw.pop(section, {})
        if sub is None:
            sub = {}
        if not isinstance(sub, dict):
            raise ConfigurationError(f"config section {section!r} must be a mapping")
        allowed = set(cls.__dataclass_fields__)
        unknown = set(sub) - allowed
        if unknown:
            raise ConfigurationError(f"unknown keys in {section!r}: {sorted(unknown)}")
        coerced = dict(sub)
        for key, value in coerced.items():
            if isinstance(value, list):
                coerced[key] = tuple(value)
        kwargs[section] = cls(**coerced)

    top_allowed = {
        "mode",
        "dataset",
        "output_dir",
        "sampling_rate_hz",
        "column_mapping",
        "golden",
    }
    unknown = set(raw) - top_allowed
    if unknown:
        raise ConfigurationError(f"unknown top-level config keys: {sorted(unknown)}")
    for required in ("mode", "dataset", "output_dir"):
        if required not in raw:
            raise ConfigurationError(f"config is missing required key {required!r}")
    return PipelineConfig(**raw, **kwargs)


def load_config(path: str | Path) -> PipelineConfig:
    """Load a YAML config file into a validated PipelineConfig."""
    import yaml

    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    cfg = config_from_dict(raw)
    return cfg


# ---------------------------------------------------------------------------
# Output helpers


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _frame_csv(frame: pd.DataFrame, comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    frame.to_csv(buf, index=False, float_format="%.9g", lineterminator="\n")
    return buf.getvalue()


def _table_digest(csv_text: str) -> str:
    """Digest of a CSV's payload, ignoring provenance comment lines."""
    payload = "\n".join(
        line for line in csv_text.splitlines() if not line.startswith("#")
    )
    return _digest(payload)


@dataclass
class RunResult:
    exit_code: int
    output_dir: Path
    n_subjects: int = 0
    failures: list = field(default_factory=list)
    messages: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Raw-signal stage


def process_subject(
    recording_path: Path,
    subject_id: str,
    config: PipelineConfig,
    overrides: dict,
) -> tuple[dict, dict]:
    """Run one subject through fuse → filter → segment → features.

    Returns ``(feature_row, segmentation_report)``.
    Raises SegmentationAmbiguous (and other TugaitError subclasses) on
    failure; the orchestrator collects them.
    """
    rec = load_recording(recording_path, config.sampling_rate_hz, subject_id=subject_id)
    sig = magnitude_fuse(rec)
    if config.filter.enabled:
        sig = butterworth_lowpass(sig, config.filter.cutoff_hz, config.filter.order)

    seg_cfg = config.segmentation
    if subject_id in overrides:
        seg = apply_override(sig, overrides[subject_id])
    else:
        seg = segment_trials(
            sig,
            k=seg_cfg.k,
            window_s=seg_cfg.window_s,
            threshold_scale=seg_cfg.threshold_scale,
            min_segment_s=seg_cfg.min_segment_s,
        )

    feat_cfg = config.features
    fv = build_feature_vector(
        sig,
        seg,
        epsilon=feat_cfg.epsilon,
        normalize_pse=feat_cfg.normalize_pse,
        exclusion_bins=feat_cfg.exclusion_bins,
        pad_to=feat_cfg.pad_to,
    )
    row = fv.flatten()
    fs = config.sampling_rate_hz
    for col, label in zip(DURATION_COLUMNS, ("TUG", "TUG-M", "TUG-C")):
        row[col] = seg.by_label(label).n_samples / fs
    return row, seg.to_dict(fs)


def _load_labels(dataset_root: Path) -> pd.DataFrame:
    labels_path = dataset_root / "subjects.csv"
    if not labels_path.is_file():
        raise ValidationError(f"labels sidecar not found: {labels_path}")
    labels = pd.read_csv(labels_path)
    if "subject_id" not in labels.columns or "faller" not in labels.columns:
        raise ValidationError(f"{labels_path}: need columns subject_id,faller[,gender]")
    labels["subject_id"] = labels["subject_id"].astype(str)
    return labels


def run_raw_stage(config: PipelineConfig, outdir: Path) -> tuple[Path, list, dict]:
    """Fuse/segment/extract every subject; emit feature table + seg reports.

    Returns ``(feature_table_path, failures, seg_sources)``.
    """
    dataset_root = Path(config.dataset)
    rec_dir = dataset_root / "recordings"
    if not rec_dir.is_dir():
        raise ValidationError(f"recordings directory not found: {rec_dir}")
    labels = _load_labels(dataset_root)
    recordings = {p.stem: p for p in sorted(rec_dir.glob("*.csv"))}
    if not recordings:
        raise ValidationError(f"no recordings in {rec_dir}")
    missing = sorted(set(labels["subject_id"]) - set(recordings))
    if missing:
        raise ValidationError(f"labeled subjects without recordings: {missing}")

    overrides = {}
    if config.segmentation.override_file:
        overrides = load_overrides(config.segmentation.override_file)

    rows = []
    failures = []
    seg_sources: dict[str, str] = {}
    seg_dir = outdir / "segmentation"
    has_gender = "gender" in labels.columns
    for rec_row in labels.sort_values("subject_id").itertuples(index=False):
        subject_id = str(rec_row.subject_id)
        try:
            row, seg_report = process_subject(
                recordings[subject_id], subject_id, config, overrides
            )
        except SegmentationAmbiguous as exc:
            failures.append(
                {
                    "subject_id": subject_id,
                    "error": "SegmentationAmbiguous",
                    "detail": str(exc),
                    "candidates": [list(c) for c in exc.candidates],
                }
            )
            seg_sources[subject_id] = "failed"
            _write_text(
                seg_dir / f"{subject_id}.json",
                canonical_json(
                    {
                        "subject_id": subject_id,
                        "error": "SegmentationAmbiguous",
                        "candidates": [list(c) for c in exc.candidates],
                    }
                )
                + "\n",
            )
            continue
        except TugaitError as exc:
            failures.append(
                {"subject_id": subject_id, "error": type(exc).__name__, "detail": str(exc)}
            )
            seg_sources[subject_id] = "failed"
            continue
        seg_sources[subject_id] = seg_report["source"]
        seg_report["subject_id"] = subject_id
        _write_text(seg_dir / f"{subject_id}.json", canonical_json(seg_report) + "\n")
        gender = getattr(rec_row, "gender", None) if has_gender else None
        full_row = {"subject_id": subject_id, "faller": int(rec_row.faller)}
        if has_gender:
            full_row["gender"] = gender
        full_row.update(row)
        rows.append(full_row)

    if not rows:
        raise ValidationError("every subject failed the raw stage; nothing to analyze")

    frame = pd.DataFrame(rows)
    table_path = outdir / "feature_table.csv"
    _write_text(
        table_path,
        _frame_csv(frame, comment=f"tugait feature table config={config.config_hash()[:12]}"),
    )
    return table_path, failures, seg_sources


# ---------------------------------------------------------------------------
# Stats stage


def _numeric_feature_columns(frame: pd.DataFrame) -> list[str]:
    return [
        c
        for c in frame.columns
        if c not in LABEL_COLUMNS and pd.api.types.is_numeric_dtype(frame[c])
    ]


def _resolve_roc_variables(config: PipelineConfig, frame: pd.DataFrame) -> tuple[list, list]:
    spec = config.stats.roc_variables
    if spec == "default":
        wanted = list(DEFAULT_ROC_VARIABLES) + [
            c for c in DURATION_COLUMNS if c in frame.columns
        ]
    elif spec == "all":
        wanted = _numeric_feature_columns(frame)
    else:
        wanted = list(spec)
    present = [v for v in wanted if v in frame.columns]
    absent = [v for v in wanted if v not in frame.columns]
    return present, absent


def run_stats_stage(config: PipelineConfig, table_path: Path, outdir: Path) -> dict:
    """Run every test and ROC analysis off a serialized feature table.

    Emits group_comparisons.csv, roc_summary.csv, and per-variable
    roc_points / sens_spec files, all stamped with the stats-scope hash.
    Returns a summary dict for the manifest.
    """
    table_text = Path(table_path).read_text()
    frame = read_feature_table(table_path, column_mapping=config.column_mapping or None)
    fusion_report = add_fusion_columns(frame)

    stats_scope = _digest(
        canonical_json(
            {
                "stats": asdict(config.stats),
                "column_mapping": config.column_mapping,
                "table": _table_digest(table_text),
            }
        )
    )[:12]
    stamp = f"tugait stats stats_scope={stats_scope}"

    fallers = frame[frame["faller"] == 1]
    nonfallers = frame[frame["faller"] == 0]
    if len(fallers) < 2 or len(nonfallers) < 2:
        raise ValidationError(
            f"need >= 2 subjects per class, got {len(fallers)} fallers / "
            f"{len(nonfallers)} non-fallers"
        )

    comparisons = []
    numeric = _numeric_feature_columns(frame)
    for col in numeric:
        comparisons.append(
            mann_whitney_u(fallers[col].to_numpy(), nonfallers[col].to_numpy(), variable=col)
        )
    for col in config.stats.welch_variables:
        if col in frame.columns:
            comparisons.append(
                welch_t_test(fallers[col].to_numpy(), nonfallers[col].to_numpy(), variable=col)
            )
    if "gender" in frame.columns:
        genders = sorted(frame["gender"].dropna().unique())
        if len(genders) == 2:
            counts = [
                [int((grp["gender"] == g).sum()) for g in genders]
                for grp in (fallers, nonfallers)
            ]
            comparisons.append(fisher_exact(counts, variable="gender"))

    comp_frame = pd.DataFrame(
        [
            {
                "variable": c.variable,
                "test": c.test,
                "n_faller": c.n_faller,
                "n_nonfaller": c.n_nonfaller,
                "mean_faller": c.mean_faller,
                "sd_faller": c.sd_faller,
                "mean_nonfaller": c.mean_nonfaller,
                "sd_nonfaller": c.sd_nonfaller,
                "statistic": c.statistic,
                "p_value": c.p_value,
                "method_detail": c.method_detail,
            }
            for c in comparisons
        ]
    )
    _write_text(outdir / "group_comparisons.csv", _frame_csv(comp_frame, comment=stamp))

    roc_vars, roc_missing = _resolve_roc_variables(config, frame)
    labels = frame["faller"].to_numpy()
    summary_rows = []
    for var in roc_vars:
        result = analyze_variable(
            frame[var].to_numpy(),
            labels,
            variable=var,
            resamples=config.stats.resamples,
            seed=config.stats.seed,
        )
        summary_rows.append(
            {
                "variable": var,
                "auc": result.auc,
                "auc_ci_low": result.auc_ci_95[0],
                "auc_ci_high": result.auc_ci_95[1],
                "tpr": result.sensitivity,
                "one_minus_fpr": result.specificity,
                "f1": result.f1,
                "prob_cutoff": result.prob_cutoff,
                "value_cutoff": result.value_cutoff,
                "polarity": result.polarity,
                "resamples": result.bootstrap["resamples"],
                "seed": result.bootstrap["seed"],
                "n_faller": result.n_faller,
                "n_nonfaller": result.n_nonfaller,
            }
        )
        points = pd.DataFrame(
            {
                "fpr": [p[0] for p in result.points],
                "tpr": [p[1] for p in result.points],
                "value_threshold": [np.nan] + list(result.thresholds),
            }
        )
        _write_text(outdir / f"roc_points_{var}.csv", _frame_csv(points, comment=stamp))

        sweep_rows = []
        for idx in range(len(result.points)):
            sens, spec, f1 = _point_metrics(result, idx)
            cut = _cutoff_value(result, idx)
            lo, hi = min(result.thresholds), max(result.thresholds)
            prob = 0.5 if hi == lo else min(1.0, max(0.0, (cut - lo) / (hi - lo)))
            sweep_rows.append(
                {
                    "value_cutoff": cut,
                    "prob_cutoff": prob,
                    "sensitivity": sens,
                    "specificity": spec,
                    "f1": f1,
                    "youden_j": sens + spec - 1.0,
                }
            )
        _write_text(
            outdir / f"sens_spec_{var}.csv",
            _frame_csv(pd.DataFrame(sweep_rows), comment=stamp),
        )

    summary_frame = pd.DataFrame(summary_rows)
    _write_text(outdir / "roc_summary.csv", _frame_csv(summary_frame, comment=stamp))

    return {
        "stats_scope": stats_scope,
        "n_faller": int(len(fallers)),
        "n_nonfaller": int(len(nonfallers)),
        "n_comparisons": len(comparisons),
        "roc_variables": roc_vars,
        "roc_variables_missing": roc_missing,
        "fusions": fusion_report,
    }


# ---------------------------------------------------------------------------
# Orchestration


def run_pipeline(config: PipelineConfig) -> RunResult:
    """Execute a full run per the config; see module docstring for modes."""
    outdir = Path(config.output_dir)

    # validate enough to guarantee "no partial outputs on validation failure"
    if config.mode == "raw_signals":
        dataset_root = Path(config.dataset)
        if not dataset_root.is_dir():
            raise ValidationError(f"dataset root not found: {dataset_root}")
    else:
        if not Path(config.dataset).is_file():
            raise ValidationError(f"feature CSV not found: {config.dataset}")

    outdir.mkdir(parents=True, exist_ok=True)
    failures: list = []
    seg_sources: dict = {}

    if config.mode == "raw_signals":
        table_path, failures, seg_sources = run_raw_stage(config, outdir)
    else:
        table_path = Path(config.dataset)

    stats_summary = run_stats_stage(config, table_path, outdir)

    manifest = {
        "tool": "tugait",
        "version": __version__,
        "mode": config.mode,
        "config": config.as_dict(),
        "config_hash": config.config_hash(),
        "stats_scope": stats_summary["stats_scope"],
        "environment": {
            "numpy": np.__version__,
            "pandas": pd.__version__,
        },
        "conventions": CONVENTION_NOTES,
        "subjects": {
            "segmentation_sources": seg_sources,
            "n_faller": stats_summary["n_faller"],
            "n_nonfaller": stats_summary["n_nonfaller"],
        },
        "stats": {
            k: stats_summary[k]
            for k in ("n_comparisons", "roc_variables", "roc_variables_missing", "fusions")
        },
        "failures": failures,
    }
    _write_text(outdir / "run_manifest.json", canonical_json(manifest) + "\n")

    report = build_report(outdir, golden=config.golden)
    _write_text(outdir / "report.md", report)

    result = RunResult(
        exit_code=3 if failures else 0,
        output_dir=outdir,
        n_subjects=stats_summary["n_faller"] + stats_summary["n_nonfaller"],
        failures=failures,
    )
    if failures:
        result.messages.append(
            f"{len(failures)} subject(s) failed and were excluded: "
            + ", ".join(f["subject_id"] for f in failures)
        )
    return result


# ---------------------------------------------------------------------------
# Report


def _md_table(frame: pd.DataFrame, columns: list[str]) -> str:
    cols = [c for c in columns if c in frame.columns]
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for _, row in frame.iterrows():
        cells = []
        for c in cols:
            v = row[c]
            cells.append(fmt9(v) if isinstance(v, (float, np.floating)) else str(v))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def build_report(artifact_dir: str | Path, golden: dict | None = None) -> str:
    """Render report.md from an artifact directory's emitted CSVs."""
    artifact_dir = Path(artifact_dir)
    comp_path = artifact_dir / "group_comparisons.csv"
    roc_path = artifact_dir / "roc_summary.csv"
    if not comp_path.is_file() or not roc_path.is_file():
        raise ValidationError(f"{artifact_dir}: missing stats outputs; run analyze first")
    comparisons = pd.read_csv(comp_path, comment="#")
    roc = pd.read_csv(roc_path, comment="#")

    manifest = {}
    manifest_path = artifact_dir / "run_manifest.json"
    if manifest_path.is_file():
        manifest = json.loads(manifest_path.read_text())

    out = ["# Faller-identification analysis report", ""]
    out.append("## Conventions")
    out.append("")
    for note in manifest.get("conventions", CONVENTION_NOTES):
        out.append(f"- {note}")
    if manifest:
        out.append(f"- Config hash: `{manifest['config_hash'][:12]}`; "
                   f"stats scope: `{manifest['stats_scope']}`.")
    out.append("")

    failures = manifest.get("failures", [])
    if failures:
        out.append("## Excluded subjects")
        out.append("")
        for f in failures:
            out.append(f"- `{f['subject_id']}`: {f['error']} — {f.get('detail', '')}")
        out.append("")

    out.append("## Group comparisons (faller vs non-faller)")
    out.append("")
    out.append(
        _md_table(
            comparisons,
            [
                "variable",
                "test",
                "mean_faller",
                "sd_faller",
                "mean_nonfaller",
                "sd_nonfaller",
                "p_value",
                "method_detail",
            ],
        )
    )
    out.append("")
    out.append("## ROC analysis")
    out.append("")
    out.append(
        _md_table(
            roc,
            [
                "variable",
                "auc",
                "auc_ci_low",
                "auc_ci_high",
                "tpr",
                "one_minus_fpr",
                "f1",
                "prob_cutoff",
                "value_cutoff",
                "polarity",
            ],
        )
    )
    out.append("")

    if golden:
        out.append("## Golden-number comparison")
        out.append("")
        out.extend(_golden_section(golden, comparisons, roc))
        out.append("")
    return "\n".join(out)


def _golden_section(golden: dict, comparisons: pd.DataFrame, roc: pd.DataFrame) -> list[str]:
    tol = golden.get("tolerance", {})
    tol_p = float(tol.get("p", 0.01))
    tol_auc = float(tol.get("auc", 0.02))
    tol_rate = float(tol.get("rate", 0.03))
    lines = [
        "| quantity | variable | expected | computed | tolerance | verdict |",
        "|---|---|---|---|---|---|",
    ]

    def verdict(expected, computed, tol_abs):
        if computed is None:
            return "not reproducible", ""
        ok = abs(computed - expected) <= tol_abs
        return ("within tolerance" if ok else "OUT OF TOLERANCE"), fmt9(computed)

    comp_by_var = {
        (r["variable"], r["test"]): r["p_value"] for _, r in comparisons.iterrows()
    }
    for var, expected in (golden.get("group_p") or {}).items():
        computed = comp_by_var.get((var, "mann_whitney_u"))
        v, c = verdict(expected, computed, tol_p)
        lines.append(f"| U-test p | {var} | {fmt9(expected)} | {c} | {fmt9(tol_p)} | {v} |")

    roc_by_var = {r["variable"]: r for _, r in roc.iterrows()}
    for var, expected in (golden.get("auc") or {}).items():
        row = roc_by_var.get(var)
        v, c = verdict(expected, None if row is None else row["auc"], tol_auc)
        lines.append(f"| AUC | {var} | {fmt9(expected)} | {c} | {fmt9(tol_auc)} | {v} |")
    for field_name, label in (("tpr", "TPR"), ("one_minus_fpr", "1-FPR"), ("f1", "f1")):
        for var, expected in (golden.get(field_name) or {}).items():
            row = roc_by_var.get(var)
            v, c = verdict(expected, None if row is None else row[field_name], tol_rate)
            lines.append(
                f"| {label} | {var} | {fmt9(expected)} | {c} | {fmt9(tol_rate)} | {v} |"
            )
    for var, bounds in (golden.get("ci") or {}).items():
        row = roc_by_var.get(var)
        if row is None:
            lines.append(f"| AUC 95% CI | {var} | {bounds} |  |  | not reproducible |")
        else:
            lines.append(
                f"| AUC 95% CI | {var} | {bounds} | "
                f"({fmt9(row['auc_ci_low'])}, {fmt9(row['auc_ci_high'])}) |  | see bounds |"
            )
    return lines
