"""Shared fixtures: small synthetic corpora reused across test modules."""

import json
from pathlib import Path

import numpy as np
import pytest

from tugait.synth import SynthSpec, generate_synthetic_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> Path:
    """12-subject corpus with bin-aligned tones; fast enough for e2e runs."""
    out = tmp_path_factory.mktemp("corpus12")
    spec = SynthSpec(n_subjects=12, bin_align_tones=True)
    generate_synthetic_corpus(spec, seed=2024, outdir=out)
    return out


@pytest.fixture(scope="session")
def small_corpus_truth(small_corpus) -> dict:
    return json.loads((small_corpus / "truth.json").read_text())


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(8121)
