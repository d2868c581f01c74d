"""Python bindings for the finelens fine-prediction toolkit."""

import json

from ._core import (
    FittedModel,
    Method,
    NumericalError,
    ValidationError,
    f_pvalue,
    ols_fit,
    pcr_fit,
    pls1_fit,
    preprocess_jsonl,
    preprocess_text,
    ridge_fit,
    run_cli,
    split,
    t_quantile,
    tf_matrix,
    tfidf_matrix,
    validate_jsonl,
)
from . import _core

__version__ = "0.1.0"


def synth(seed=42, n=200, noise_sd=0.5, effects=None, text_signal=False):
    """Synthetic corpus as (jsonl_text, truth_dict)."""
    corpus, truth = _core.synth_jsonl(seed, n, noise_sd, dict(effects or {}), text_signal)
    return corpus, json.loads(truth)


def anova(corpus_jsonl):
    """ANOVA of log-fines on article dummies, as a dict."""
    return json.loads(_core.anova_json(corpus_jsonl))


def main(argv):
    code, out, err = run_cli(list(argv))
    print(out, end="")
    if err:
        import sys

        print(err, end="", file=sys.stderr)
    return code


__all__ = [
    "FittedModel",
    "Method",
    "NumericalError",
    "ValidationError",
    "anova",
    "f_pvalue",
    "main",
    "ols_fit",
    "pcr_fit",
    "pls1_fit",
    "preprocess_jsonl",
    "preprocess_text",
    "ridge_fit",
    "run_cli",
    "split",
    "synth",
    "t_quantile",
    "tf_matrix",
    "tfidf_matrix",
    "validate_jsonl",
]
