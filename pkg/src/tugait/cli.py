"""Command-line entry point.

Subcommands::

    tugait analyze --config cfg.yaml          full pipeline run
    tugait segment --subject ID --config ...  per-subject detector debug
    tugait synth --spec synth.yaml --seed N   generate a synthetic corpus
    tugait report --from artifacts/           re-render report.md

Exit codes: 0 success, 2 configuration/validation error, 3 run finished
but some subjects failed and were excluded.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import TugaitError
from .pipeline import (
    _frame_csv,
    _write_text,
    build_report,
    canonical_json,
    load_config,
    run_pipeline,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PARTIAL = 3


def _cmd_analyze(args) -> int:
    config = load_config(args.config)
    if args.out:
        config = replace(config, output_dir=args.out)
    result = run_pipeline(config)
    for msg in result.messages:
        print(msg, file=sys.stderr)
    print(f"artifacts written to {result.output_dir}")
    return result.exit_code


def _cmd_segment(args) -> int:
    import pandas as pd

    from .segmentation import activity_profile, segment_trials
    from .signal_core import butterworth_lowpass, load_recording, magnitude_fuse

    config = load_config(args.config)
    rec_path = Path(config.dataset) / "recordings" / f"{args.subject}.csv"
    rec = load_recording(rec_path, config.sampling_rate_hz, subject_id=args.subject)
    sig = magnitude_fuse(rec)
    if config.filter.enabled:
        sig = butterworth_lowpass(sig, config.filter.cutoff_hz, config.filter.order)

    outdir = Path(args.out or config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    seg_cfg = config.segmentation
    prof = activity_profile(
        sig, k=seg_cfg.k, window_s=seg_cfg.window_s, threshold_scale=seg_cfg.threshold_scale
    )

    try:
        seg = segment_trials(
            sig,
            k=seg_cfg.k,
            window_s=seg_cfg.window_s,
            threshold_scale=seg_cfg.threshold_scale,
            min_segment_s=seg_cfg.min_segment_s,
        )
        payload = seg.to_dict(sig.sampling_rate_hz)
        payload["subject_id"] = args.subject
        status = EXIT_OK
    except TugaitError as exc:
        payload = {
            "subject_id": args.subject,
            "error": type(exc).__name__,
            "detail": str(exc),
            "candidates": [list(c) for c in getattr(exc, "candidates", ())],
        }
        status = EXIT_PARTIAL
    _write_text(outdir / f"segment_{args.subject}.json", canonical_json(payload) + "\n")

    if args.plot_data:
        fs = sig.sampling_rate_hz
        w = prof["window_samples"]
        windows = pd.DataFrame(
            {
                "window_start_s": [i * w / fs for i in range(prof["window_sums"].size)],
                "window_sum": prof["window_sums"],
                "theta": prof["theta"],
                "active_raw": prof["active_raw"].astype(int),
                "active_bridged": prof["active"].astype(int),
            }
        )
        _write_text(
            outdir / f"segment_{args.subject}_windows.csv",
            _frame_csv(windows, comment=f"tugait segment debug subject={args.subject}"),
        )
        samples = pd.DataFrame(
            {
                "t_s": [i / fs for i in range(len(sig))],
                "magnitude": sig.values,
                "median_filtered_mean_subtracted": prof["filtered"],
            }
        )
        _write_text(
            outdir / f"segment_{args.subject}_signal.csv",
            _frame_csv(samples, comment=f"tugait segment debug subject={args.subject}"),
        )
    print(f"segmentation debug for {args.subject} written to {outdir}")
    return status


def _cmd_synth(args) -> int:
    import yaml

    from .synth import SynthSpec, generate_synthetic_corpus, synth_spec_from_dict

    if args.spec:
        with open(args.spec) as fh:
            spec = synth_spec_from_dict(yaml.safe_load(fh) or {})
    else:
        spec = SynthSpec()
    generate_synthetic_corpus(spec, seed=args.seed, outdir=args.out)
    print(f"synthetic corpus written to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    report = build_report(args.artifacts)
    out_path = Path(args.artifacts) / "report.md"
    _write_text(out_path, report)
    print(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tugait", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="YAML pipeline config")
    p.add_argument("--out", help="override the config's output directory")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("segment", help="debug the trial detector on one subject")
    p.add_argument("--subject", required=True, help="subject id (recording CSV stem)")
    p.add_argument("--config", required=True, help="YAML pipeline config")
    p.add_argument("--plot-data", action="store_true", help="emit plot-data CSVs")
    p.add_argument("--out", help="output directory (default: config output_dir)")
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("synth", help="generate a synthetic ground-truth corpus")
    p.add_argument("--spec", help="YAML generator parameters (defaults if omitted)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="corpus output directory")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("report", help="re-render report.md from an artifact directory")
    p.add_argument("--from", dest="artifacts", required=True, help="artifact directory")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TugaitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
