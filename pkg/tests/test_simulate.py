import numpy as np
import pytest

from dyadreg.fit import fit_poisson_pml
from dyadreg.simulate import (
    SimConfig,
    _unit_mean_lognormal,
    gen_dataset,
    rep_rng,
    run_coverage,
    run_replication,
)

SLOPES = slice(1, 4)  # default design leads with the intercept


def test_noiseless_design_recovers_truth():
    cfg = SimConfig(n_nodes=30, sigma=0.0, sigma_a=0.0, n_reps=1)
    ds, theta = gen_dataset(cfg, 1)
    np.testing.assert_allclose(ds.y, np.exp(ds.X @ theta), rtol=1e-14)
    np.testing.assert_allclose(fit_poisson_pml(ds).theta_hat, theta, atol=1e-8)


def test_no_intercept_design():
    cfg = SimConfig(n_nodes=30, sigma=0.0, sigma_a=0.0, intercept=False)
    ds, theta = gen_dataset(cfg, 1)
    assert ds.regressor_names == ("distance", "w3_ego", "w3_alter")
    np.testing.assert_allclose(fit_poisson_pml(ds).theta_hat, theta, atol=1e-8)


def test_distance_symmetric_and_node_columns():
    ds, _ = gen_dataset(SimConfig(n_nodes=12), 3)
    X = ds.dense_X()
    np.testing.assert_array_equal(X[:, :, 1], X[:, :, 1].T)
    assert np.all(X[:, :, 1] <= np.sqrt(2))
    off = ~np.eye(12, dtype=bool)
    np.testing.assert_array_equal(X[:, :, 2][off], X[:, :, 3].T[off])


@pytest.mark.parametrize("scale", [0.25, 1.0])
def test_unit_mean_lognormal(scale):
    draws = _unit_mean_lognormal(rep_rng(9, 9), scale, 10**6)
    sd = np.sqrt(np.exp(scale**2) - 1)
    assert abs(draws.mean() - 1) <= 3 * sd / 1e3


def test_replication_shape_and_determinism():
    cfg = SimConfig(n_nodes=40, n_reps=1, master_seed=5)
    a, b = run_replication(cfg, 7), run_replication(cfg, 7)
    assert a.failure is None
    for est in ("huber", "dyad", "fg"):
        assert a.hits[est].shape == (4,)
        np.testing.assert_array_equal(a.hits[est], b.hits[est])
        np.testing.assert_array_equal(a.se[est], b.se[est])
    np.testing.assert_array_equal(a.theta_hat, b.theta_hat)
    c = run_replication(SimConfig(n_nodes=40, n_reps=1, master_seed=6), 7)
    assert not np.array_equal(a.theta_hat, c.theta_hat)


def test_single_rep_report():
    cfg = SimConfig(n_nodes=40, n_reps=1, master_seed=5)
    rep = run_replication(cfg, 1)
    rpt = run_coverage(cfg)
    assert rpt.n_included == 1
    for est in cfg.estimators:
        np.testing.assert_array_equal(rpt.coverage[est], rep.hits[est].astype(float))
        np.testing.assert_array_equal(rpt.mc_se[est], 0.0)


def test_threads_do_not_change_report():
    cfg = SimConfig(n_nodes=25, n_reps=6, master_seed=3)
    assert run_coverage(cfg, threads=1).to_dict() == run_coverage(cfg, threads=3).to_dict()


def test_weak_noise_no_dependence():
    cfg = SimConfig(n_nodes=50, sigma=0.05, sigma_a=0.0, n_reps=60, master_seed=8)
    rpt = run_coverage(cfg)
    covs = np.array([rpt.coverage[e][SLOPES] for e in cfg.estimators])
    assert np.all(covs >= 0.8)
    assert np.ptp(covs, axis=0).max() <= 0.1


def test_independence_se_ratio():
    cfg = SimConfig(n_nodes=100, sigma_a=0.0, n_reps=200, master_seed=11)
    rpt = run_coverage(cfg)
    ok = [r for r in rpt.replications if r.failure is None]
    mean_se = {e: np.mean([r.se[e] for r in ok], axis=0) for e in cfg.estimators}
    for e in ("huber", "fg"):
        ratio = mean_se[e] / mean_se["dyad"]
        assert np.all((ratio >= 0.8) & (ratio <= 1.25)), (e, ratio)


@pytest.mark.slow
def test_independence_coverage():
    cfg = SimConfig(n_nodes=100, sigma_a=0.0, n_reps=500, master_seed=12)
    rpt = run_coverage(cfg)
    # per-estimator coverage averaged over the three slopes; a single
    # parameter at 500 reps has MC se ~0.01, so the band is only ~2 se wide
    for e in cfg.estimators:
        cov = rpt.coverage[e][SLOPES].mean()
        assert 0.92 <= cov <= 0.97, (e, rpt.coverage[e])


@pytest.mark.slow
def test_fg_exceeds_dyad_at_reference_config(reference_coverage):
    ok = [r for r in reference_coverage.replications if r.failure is None]
    fg = np.array([r.se["fg"] for r in ok])[:, SLOPES]
    dy = np.array([r.se["dyad"] for r in ok])[:, SLOPES]
    assert np.all((fg > dy).mean(axis=0) >= 0.95)


def test_config_validation():
    for bad in (dict(n_nodes=2), dict(sigma=-1), dict(nominal_level=1.0), dict(n_reps=0), dict(estimators=("x",))):
        with pytest.raises(ValueError):
            SimConfig(**bad)
