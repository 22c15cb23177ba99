import math

import numpy as np
import pytest

import seedstab


def test_postprocess_clips_and_rounds():
    out = seedstab.postprocess(np.array([[-0.4, 2.6, 1.5, 2.5]]))
    assert out.tolist() == [[0.0, 3.0, 2.0, 3.0]]


def test_cv_cell_and_grid():
    assert seedstab.cv_cell([1, 2, 3]) == (0.5, 2.0, 1.0)
    assert seedstab.cv_cell([0, 0, 0])[0] == 0.0
    grid = seedstab.cv_grid(np.array([[[1.0]], [[2.0]], [[3.0]]]))
    assert grid["cv"].shape == (1, 1)
    assert grid["cv"][0, 0] == 0.5


def test_rmse_and_quantiles():
    assert math.isclose(seedstab.rmse(np.array([[3.0, 5.0]]), np.array([[1.0, 1.0]])), math.sqrt(10), abs_tol=1e-12)
    assert seedstab.quantiles(np.arange(1, 11, dtype=float), [0.5]) == [5.5]
    bins, excluded = seedstab.histogram(np.array([0.0, 0.5, 1.0]), 2, 1.0)
    assert [b[2] for b in bins] == [1, 2]
    assert excluded == 0


def test_seed_derivation():
    assert seedstab.derive_seed(0, 0) == 0xE220A8397B1DCDAF
    assert seedstab.run_seed(2024, "ar", 3) == seedstab.derive_seed(2024, seedstab.fnv1a64("ar") ^ 3)


def test_synth_and_forecasters():
    panel = seedstab.synth_generate({"n_series": 5, "length": 60, "seed": 3})
    values = panel["values"]
    assert values.shape == (5, 60)
    assert (values >= 0).all()
    assert panel["series_ids"][0] == "item_0000"

    ar = {"kind": "LinearAR", "params": {"epochs": 2}}
    a = seedstab.fit_predict(ar, values, 7, seed=1)
    b = seedstab.fit_predict(ar, values, 7, seed=1)
    c = seedstab.fit_predict(ar, values, 7, seed=2)
    assert a.shape == (5, 7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)

    snaive = seedstab.fit_predict({"kind": "SeasonalNaive", "params": {"period": 2}}, np.array([[1.0, 2, 3, 4]]), 4)
    assert snaive.tolist() == [[3.0, 4.0, 3.0, 4.0]]


def test_fit_ensemble_weights_on_simplex():
    values = seedstab.synth_generate({"n_series": 6, "length": 80, "seed": 5})["values"]
    comps = [{"kind": "SeasonalNaive", "params": {"period": 7}}, {"kind": "GlobalMean", "params": {}}]
    fit = seedstab.fit_ensemble(comps, values, 7, n_windows=2, seed=4)
    assert math.isclose(sum(fit["weights"]), 1.0, abs_tol=1e-12)
    assert fit["validation_rmse"] <= min(fit["component_validation_rmse"]) + 1e-9


def test_run_experiment_and_table():
    config = {
        "dataset": {"synth": {"n_series": 4, "length": 50, "seed": 2}},
        "split": {"train_length": 43, "horizon": 7},
        "models": [
            {"label": "snaive", "forecaster": {"kind": "SeasonalNaive", "params": {"period": 7}}},
            {"label": "ar", "forecaster": {"kind": "LinearAR", "params": {"epochs": 1}}},
        ],
        "run_count": 3,
        "master_seed": 9,
    }
    out = seedstab.run_experiment(config)
    assert out["runs"]["snaive"].shape == (3, 4, 7)
    assert out["actuals"].shape == (4, 7)
    cv = {label: seedstab.cv_grid(runs)["cv"].ravel() for label, runs in out["runs"].items()}
    assert (cv["snaive"] == 0).all()
    table = seedstab.emit_quantile_table(cv)
    lines = table.splitlines()
    assert lines[0] == "model,q25,q50,q75,q90"
    assert lines[2] == "snaive,0.000,0.000,0.000,0.000"


def test_errors_carry_codes():
    with pytest.raises(seedstab.SeedstabError) as info:
        seedstab.quantiles(np.array([1.0]), [1.5])
    assert info.value.code == "ProbOutOfRange"
    with pytest.raises(seedstab.SeedstabError) as info:
        seedstab.load_long_csv("/nonexistent/panel.csv")
    assert info.value.code == "IoError"
