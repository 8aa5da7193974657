from __future__ import annotations

from fractions import Fraction

import pytest

QtCore = pytest.importorskip("PyQt6.QtCore")

from services.ops import build_config, demo_job, factor_job, smooth_lab_job  # noqa: E402
from services.pipeline import PipelineConfig  # noqa: E402


@pytest.fixture(scope="module")
def app():
    return QtCore.QCoreApplication.instance() or QtCore.QCoreApplication([])


def test_build_config_ignores_empty_fields():
    base = PipelineConfig(seed=5, workers=2)
    cfg = build_config({"seed": "", "trials": "3", "c": "3/4", "workers": " "}, base)
    assert (cfg.seed, cfg.trial_budget, cfg.workers) == (5, 3, 2)
    assert cfg.hasse_scale_c == Fraction(3, 4)


def test_factor_job_needs_a_modulus(app):
    with pytest.raises(ValueError):
        factor_job({"N": "  "})
    with pytest.raises(ValueError):
        smooth_lab_job({"x": ""})


def test_demo_worker_streams_trials_and_finishes(app):
    worker = demo_job()
    trials, summaries, progress = [], [], []
    worker.trial_done.connect(trials.append)
    worker.finished.connect(summaries.append)
    worker.progress.connect(lambda done, total: progress.append((done, total)))
    worker.run()

    assert len(trials) == 1
    assert trials[0]["outcome"] == "Consistent"
    assert summaries[0]["p"] == "1959583"
    assert summaries[0]["route"] == "Consistent"
    assert progress[-1][0] == 1
    assert worker.report.factored


def test_factor_worker_cancel_before_run(app):
    worker = factor_job({"N": "2021027", "seed": "1"})
    cancelled, summaries = [], []
    worker.cancelled.connect(lambda: cancelled.append(True))
    worker.finished.connect(summaries.append)
    worker.cancel()
    worker.run()
    assert cancelled == [True]
    assert summaries[0]["cancelled"] is True


def test_smooth_lab_worker_rows(app):
    worker = smooth_lab_job({"x": "10000", "alpha": "0.7071", "beta": "1", "theta_grid": "0,2"})
    rows = []
    worker.finished.connect(rows.append)
    worker.run()
    assert [r["theta"] for r in rows[0]] == ["0", "2"]
    assert all(r["x"] == "10000" for r in rows[0])
