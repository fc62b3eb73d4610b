"""Goodness-of-fit tests for the bivariate and trivariate Poisson distribution."""

import json

from ._core import (
    DegenerateSampleError,
    DomainError,
    NumericalError,
    ParseError,
    UnstableStatisticError,
    alternative_moments,
    estimate,
    ks_uniformity,
    sample_alternative,
    sample_poisson,
    statistic,
    statistic_names,
)
from ._core import bootstrap_test_raw as _bootstrap_test_raw

__all__ = [
    "DegenerateSampleError",
    "DomainError",
    "NumericalError",
    "ParseError",
    "UnstableStatisticError",
    "alternative_moments",
    "bootstrap_test",
    "estimate",
    "ks_uniformity",
    "sample_alternative",
    "sample_poisson",
    "statistic",
    "statistic_names",
]


def bootstrap_test(counts, name="tn", B=500, seed=0, a=None, method="mle", workers=1, keep_replicates=False):
    """Parametric bootstrap test of the Poisson null.

    Returns the report as a dict with the same keys as the CLI JSON output.
    With keep_replicates the bootstrap statistic values are added under
    "replicates".
    """
    text, reps = _bootstrap_test_raw(counts, name, B, seed, a, method, workers, keep_replicates)
    report = json.loads(text)
    if keep_replicates:
        report["replicates"] = reps
    return report
