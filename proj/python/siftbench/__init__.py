"""SIFT feature toolkit and deformation-robustness benchmark.

Images are (H, W) float arrays with samples in [0, 1]. The heavy lifting
lives in the C++ extension module; this package adds small dict-friendly
wrappers around the JSON-based entry points.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import (
    __version__,
    default_synth_config as _default_synth_config_json,
    run_suite_json as _run_suite_json,
    schedule as _schedule_json,
)


def default_synth_config():
    """The bundled 7-class x 5-kind x 5-level synthetic suite as a dict."""
    return _json.loads(_default_synth_config_json())


def run_suite(config):
    """Runs a benchmark suite from a dict (or JSON string); returns records."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _json.loads(_run_suite_json(config))


def schedule(kind, level):
    """Resolved deformation parameters for (kind, level) as a dict."""
    return _json.loads(_schedule_json(kind, level))
