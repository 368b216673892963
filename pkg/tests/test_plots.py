"""Figure rendering smoke tests: every report figure writes a real PNG."""

import numpy as np

from claimsect import pba, plots
from claimsect.evaluate import (
    SweepTask,
    TemperatureResult,
    experiment_folds,
    experiment_p_sweep,
    step_oracle,
    uniform_column,
    weighted_f1,
)
from claimsect.annotation import SimulatedAnnotator
from claimsect.pba import BisectionConfig

from test_evaluate import fold_fixture


def png_ok(path):
    return path.exists() and path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_posterior_figure(tmp_path):
    state = pba.update(pba.init(BisectionConfig(p=0.7)), 0.5, False)
    assert png_ok(plots.save_posterior_figure(state, tmp_path / "p.png", title="x"))


def test_trajectory_figure(tmp_path):
    def factory(seed):
        return [SweepTask("c", uniform_column(80, seed), 0.5, step_oracle(0.5))]

    report = experiment_p_sweep(factory, [0.6, 0.8], seeds=[0, 1], max_steps=8)
    assert png_ok(plots.save_trajectory_figure(report, tmp_path / "t.png"))


def test_folds_figure(tmp_path):
    tax, matrix, docs = fold_fixture(n_docs=120)
    report = experiment_folds(
        matrix, tax, SimulatedAnnotator.from_documents(docs), docs,
        k=2, seed=0, config=BisectionConfig(p=0.7),
    )
    assert png_ok(plots.save_folds_figure(report, tmp_path / "f.png"))


def test_temperature_figure(tmp_path):
    results = [
        TemperatureResult("c1", 5, 1.2, False, 30, 30),
        TemperatureResult("c1", 10, 0.9, False, 30, 30),
        TemperatureResult("c2", 5, None, False, 2, 58),
    ]
    assert png_ok(plots.save_temperature_figure(results, tmp_path / "T.png"))


def test_metrics_figure(tmp_path):
    gold = {"d1": {"A"}, "d2": {"B"}}
    report = weighted_f1(gold, gold, ["A", "B"])
    assert png_ok(plots.save_metrics_figure(report, tmp_path / "m.png"))
