"""Governed agent-selection simulator."""

import json
import os

from ._core import (
    SelgovError,
    default_fixtures_json,
    gsi,
    hash_embed,
    policy,
    project_capped_simplex,
    rsc,
    token_hash,
    variance_clamp,
)
from . import _core

__all__ = [
    "SelgovError",
    "default_config",
    "default_fixtures",
    "gsi",
    "hash_embed",
    "policy",
    "project_capped_simplex",
    "replay",
    "rsc",
    "run",
    "sweep",
    "token_hash",
    "variance_clamp",
]


def default_config():
    """Default run configuration as a dict."""
    return json.loads(_core.default_config_json())


def default_fixtures():
    """Built-in roster and scenario definitions."""
    return json.loads(default_fixtures_json())


def run(config=None, fixtures=None, paired=False, **overrides):
    """Run one episode.

    Returns a dict with ``summary``, ``sc_series``, ``top_share_series`` and the
    JSONL ``audit_log`` text. Keyword overrides use the config-file keys
    (``scenario``, ``mode``, ``lr``, ``seed``, ...).
    """
    cfg = dict(config or {})
    cfg.update(overrides)
    return json.loads(_core._run(json.dumps(cfg), os.fspath(fixtures or ""), paired))


def sweep(scenarios=(), modes=(), lrs=(), seeds=(), base=None, threads=0, fixtures=None):
    """Run a scenario x mode x lr x seed grid; one dict per cell."""
    return json.loads(
        _core._sweep(json.dumps(base or {}), list(scenarios), list(modes), list(lrs),
                     list(seeds), threads, os.fspath(fixtures or ""))
    )


def replay(path):
    """Recompute the summary metrics from an audit log file."""
    return json.loads(_core._replay(os.fspath(path)))
