import json
import math

import pytest

import bpire


def test_version():
    assert bpire.__version__ == "0.1.0"


def test_constant_environment_anchors():
    n = 10
    zeros = [0.0] * n
    assert bpire.no_survivor_prob(zeros) == pytest.approx(1.0 / (n + 1), abs=1e-12)
    for i in range(n):
        strict = bpire.clan_prob(zeros, i, bpire.Convention.strict)
        assert strict == pytest.approx(1.0 / ((n + 1) * (n - i)), abs=1e-12)
    assert bpire.clan_prob(zeros, 0) == pytest.approx(1.0 / (n * (n + 1)), abs=1e-12)
    assert bpire.clan_prob(zeros, 3) == pytest.approx(1.0 / (n * (n - 3)), abs=1e-12)


def test_invalid_inputs_raise():
    with pytest.raises(ValueError):
        bpire.IncrementLaw.gaussian(-1.0)
    with pytest.raises(ValueError):
        bpire.clan_prob([0.1, 0.2], 2)


def test_sparre_andersen():
    assert bpire.sparre_andersen_prob(1) == pytest.approx(0.5)
    assert bpire.sparre_andersen_prob(2) == pytest.approx(0.375)


def test_estimate_is_deterministic_across_workers():
    law = bpire.IncrementLaw.gaussian(1.0)
    target = bpire.SamplingTarget.fixed(50000)
    reg = bpire.Regime.fixed_gap(1)
    a = bpire.estimate_event_prob(law, reg, 32, target, seed=7, workers=1)
    b = bpire.estimate_event_prob(law, reg, 32, target, seed=7, workers=4)
    assert a.mean == b.mean and a.std_error == b.std_error
    assert 0.0 < a.mean < 1.0
    assert a.nsamples == 50000


def test_sweep_and_fit():
    law = bpire.IncrementLaw.gaussian(1.0)
    series = bpire.scaling_sweep(law, bpire.Regime.fixed_gap(1), [16, 32, 64, 128],
                                 bpire.SamplingTarget.fixed(40000), seed=3)
    assert [r.n for r in series.rows] == [16, 32, 64, 128]
    assert series.to_csv().splitlines()[0] == "n,i,estimate,stderr,nsamples,seed"
    fit = bpire.fit_log_slope(series)
    assert fit.points == 4
    assert -0.8 < fit.slope < -0.2
    assert math.isfinite(fit.ci95) and fit.ci95 > 0


def test_run_experiment(tmp_path):
    cfg = tmp_path / "sweep.toml"
    cfg.write_text(
        'kind = "sweep"\n'
        'law = { family = "gaussian", sigma = 1.0 }\n'
        'regime = { kind = "fixed_gap", N = 1 }\n'
        "n_grid = [8, 16, 32]\n"
        "seed = 11\n"
        "precision = { nsamples = 20000 }\n"
    )
    res = bpire.run_experiment(str(cfg), out_dir=str(tmp_path / "out"))
    assert res.exit_code == 0, res.message
    slope = json.loads((tmp_path / "out" / "slope.json").read_text())
    assert set(["slope", "intercept", "ci95", "r2", "points"]) <= set(slope)
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "sweep"\nlaw = { family = "gaussian", sigma = 1.0 }\nbogus = 1\n')
    assert bpire.run_experiment(str(bad)).exit_code == 1
