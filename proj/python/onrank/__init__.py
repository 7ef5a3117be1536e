"""Online ranking with discrete-choice feedback."""

import json

from ._onrank import (
    ConfigError,
    TraceError,
    auto_eta,
    complexity_bound,
    generate_feedback,
    hindsight_best,
    pairwise_loss,
    pairwise_marginal,
    position_loss,
    regret_upper_bound,
    sample_rankings,
    total_pairwise_loss,
    verify,
)

__all__ = [
    "ConfigError",
    "TraceError",
    "auto_eta",
    "complexity_bound",
    "generate_feedback",
    "hindsight_best",
    "pairwise_loss",
    "pairwise_marginal",
    "position_loss",
    "regret_upper_bound",
    "run",
    "sample_rankings",
    "sweep",
    "total_pairwise_loss",
    "verify",
]


def run(config):
    """Run an experiment config (dict) and return its summary as a dict."""
    from ._onrank import run_json

    return json.loads(run_json(json.dumps(config)))


def sweep(config):
    """Run the sweep section of a config (dict) and return one dict per cell."""
    from ._onrank import sweep_json

    return json.loads(sweep_json(json.dumps(config)))
