"""Seeded-retraining stability benchmarks for demand forecasters.

Thin Python layer over the C++ core. Config-shaped arguments accept plain
dicts and are forwarded to the core as JSON.
"""

import json

from . import _core
from ._core import (
    SeedstabError,
    cv_cell,
    cv_grid,
    derive_seed,
    fnv1a64,
    histogram,
    load_long_csv,
    postprocess,
    quantiles,
    rmse,
    run_seed,
)

__all__ = [
    "SeedstabError",
    "cv_cell",
    "cv_grid",
    "derive_seed",
    "emit_quantile_table",
    "fit_ensemble",
    "fit_predict",
    "fnv1a64",
    "histogram",
    "load_long_csv",
    "postprocess",
    "quantiles",
    "rmse",
    "run_experiment",
    "run_seed",
    "synth_generate",
]


def _as_json(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def synth_generate(config):
    return _core.synth_generate(_as_json(config))


def fit_predict(kind, train, horizon, seed=0):
    return _core.fit_predict(_as_json(kind), train, horizon, seed)


def fit_ensemble(components, train, horizon, n_windows=2, seed=0, iterations=100):
    return _core.fit_ensemble(_as_json(components), train, horizon, n_windows, seed, iterations)


def run_experiment(config, threads=0):
    return _core.run_experiment(_as_json(config), threads)


def emit_quantile_table(cv_values, probs=(0.25, 0.5, 0.75, 0.9)):
    return _core.emit_quantile_table({k: list(map(float, v)) for k, v in cv_values.items()}, list(probs))
