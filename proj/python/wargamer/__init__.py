"""Python access to the wargamer simulation and analytics core.

Documents are plain dicts in the same JSON shapes the CLI and server use.
"""

import json as _json

from . import _core
from ._core import ValidationError, paired_t, tlx_score, trend, trust_score

__all__ = [
    "ValidationError",
    "analytics",
    "compare",
    "detect_effects",
    "paired_t",
    "run",
    "sync_matrix",
    "tlx_score",
    "trend",
    "trust_score",
    "validate",
]

_REVERSE_CODED = [False] * 13


def _s(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def validate(scenario, plan, hypothesis=""):
    return _json.loads(_core.validate(_s(scenario), _s(plan), hypothesis))


def run(scenario, plan, hypothesis="", horizon=52, seed=0, noise=False, threshold=None, persistence=None):
    """Baseline and plan trajectories plus detected effects for one hypothesis."""
    return _json.loads(
        _core.run(_s(scenario), _s(plan), hypothesis, horizon, seed, noise, threshold, persistence)
    )


def detect_effects(baseline, run, threshold, persistence):
    return _json.loads(_core.detect_effects(_s(baseline), _s(run), threshold, persistence))


def sync_matrix(plan, bucket_ticks=1):
    return _json.loads(_core.sync_matrix(_s(plan), bucket_ticks))


def compare(scenario, plans, effects, horizon=52, seed=0, noise=False, threads=0):
    return _json.loads(
        _core.compare(_s(scenario), [_s(p) for p in plans], _s(effects), horizon, seed, noise, threads)
    )


def analytics(name, body):
    """Same request bodies as POST /analytics/{name}: pfnet, tlx, sna, trend, trust."""
    return _json.loads(_core.analytics(name, _s(body)))
