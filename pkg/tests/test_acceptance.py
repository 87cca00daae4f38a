"""Exit criteria for the package; each test prints one PASS/FAIL line.

Criterion 2 needs the Log of Gravity data as CSV. Point
``DYADREG_GRAVITY_CSV`` at a file with columns exporter, importer, trade,
lyex, lyim, ldist (one row per ordered country pair); otherwise it is
skipped.
"""

import math
import os

import numpy as np
import pytest
from helpers import random_dataset, rel_err

from dyadreg.cli import main
from dyadreg.data import dataset_from_dense, relabel_nodes
from dyadreg.fit import FitOptions, fit_poisson_pml
from dyadreg.io import load_dyads_csv
from dyadreg.pml import composite_hessian, composite_loglik, composite_score
from dyadreg.simulate import SimConfig, gen_dataset
from dyadreg.vcov import SymScoreSet, assemble_vcov, sigma1_fast, sigma1_naive, sym_scores


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {title}" + (f" | {detail}" if detail else ""))
        assert ok, detail

    return emit


def test_1_monte_carlo_coverage(reference_coverage, verdict):
    rpt = reference_coverage
    slopes = [rpt.parameter_names.index(n) for n in ("distance", "w3_ego", "w3_alter")]
    fg = rpt.coverage["fg"][slopes]
    dyad = rpt.coverage["dyad"][slopes]
    ok = bool(np.all((fg >= 0.92) & (fg <= 0.97)) and dyad[0] <= 0.85 and np.all(dyad[1:] <= 0.70))
    detail = f"fg={np.round(fg, 3).tolist()} dyad={np.round(dyad, 3).tolist()} excluded={rpt.excluded} n={rpt.n_included}"
    verdict(1, "coverage experiment (N=200, 1000 reps)", ok, detail)


GRAVITY = os.environ.get("DYADREG_GRAVITY_CSV")


@pytest.mark.skipif(not (GRAVITY and os.path.exists(GRAVITY)), reason="DYADREG_GRAVITY_CSV not provided")
def test_2_gravity_reproduction(verdict):
    ds = load_dyads_csv(GRAVITY, "trade", ["lyex", "lyim", "ldist"], "exporter", "importer", intercept=True)
    assert (ds.n_nodes, ds.n_dyads) == (136, 18360)
    # trade values are large; absolute score tolerance scales with the outcome level
    tol = max(1e-10, 1e-12 * float(np.mean(ds.y)) * float(np.abs(ds.X).max()))
    fit = fit_poisson_pml(ds, FitOptions(gradient_tolerance=tol))
    vc = assemble_vcov(fit, sym_scores(ds, fit.theta_hat), sigma1_denominator="printed")
    theta_ok = np.all(np.abs(fit.theta_hat - [-5.688, 0.9047, 0.8941, -0.5676]) <= 0.001)
    dyad_ok = np.all(np.abs(vc.se_dyad / [1.9382, 0.0750, 0.0668, 0.0982] - 1) <= 0.02)
    fg_ok = np.all(np.abs(vc.se_fg / [3.6781, 0.1319, 0.1345, 0.2191] - 1) <= 0.02)
    detail = f"theta={np.round(fit.theta_hat, 4).tolist()} se_dyad={np.round(vc.se_dyad, 4).tolist()} se_fg={np.round(vc.se_fg, 4).tolist()}"
    verdict(2, "gravity estimates and SEs", bool(theta_ok and dyad_ok and fg_ok), detail)


def test_3_sigma1_oracle(verdict):
    worst = 0.0
    for n in range(2, 13):
        for p in (1, 2, 4):
            for seed in range(50):
                rng = np.random.default_rng([n, p, seed])
                sym = SymScoreSet.from_symmetric(rng.normal(size=(n, n, p)))
                fast, naive = sigma1_fast(sym), sigma1_naive(sym)
                err = 0.0 if (n == 2 and not fast.any() and not naive.any()) else rel_err(fast, naive)
                worst = max(worst, err)
    verdict(3, "sigma1_fast == sigma1_naive", worst <= 1e-10, f"max rel Frobenius error {worst:.2e}")


def _fd(f, theta):
    cols = []
    for k in range(theta.size):
        h = 1e-6 * max(1.0, abs(theta[k]))
        e = np.zeros_like(theta)
        e[k] = h
        cols.append((np.asarray(f(theta + e)) - np.asarray(f(theta - e))) / (2 * h))
    return np.array(cols)


def test_4_derivatives(verdict):
    worst_s = worst_h = 0.0
    for inst in range(20):
        rng = np.random.default_rng([4, inst])
        n = 3 + inst % 6
        p = int(rng.integers(1, 5))
        ds = random_dataset(rng, n, p, intercept=bool(inst % 2))
        theta = rng.normal(scale=0.3, size=p)
        worst_s = max(worst_s, rel_err(composite_score(ds, theta), _fd(lambda t: composite_loglik(ds, t), theta)))
        worst_h = max(worst_h, rel_err(composite_hessian(ds, theta), _fd(lambda t: composite_score(ds, t), theta)))
    verdict(4, "score/Hessian vs finite differences", worst_s <= 1e-5 and worst_h <= 1e-4, f"score {worst_s:.2e}, Hessian {worst_h:.2e}")


def test_5_degenerate_inputs(verdict):
    rng = np.random.default_rng(5)
    y = rng.exponential(3.0, size=(9, 9))
    ds = dataset_from_dense(y, np.ones((9, 9, 1)), regressor_names=["intercept"])
    err_int = abs(fit_poisson_pml(ds).theta_hat[0] - math.log(ds.y.mean()))

    noiseless = SimConfig(n_nodes=60, sigma=0.0, sigma_a=0.0)
    sds, theta = gen_dataset(noiseless, 1)
    err_sim = float(np.max(np.abs(fit_poisson_pml(sds).theta_hat - theta)))

    sym2 = SymScoreSet.from_symmetric(rng.normal(size=(2, 2, 3)))
    zero = not sigma1_fast(sym2).any() and not sigma1_naive(sym2).any()
    ok = err_int <= 1e-10 and err_sim <= 1e-8 and zero
    verdict(5, "degenerate-input exactness", ok, f"intercept err {err_int:.1e}, noiseless err {err_sim:.1e}, N=2 Sigma1 zero={zero}")


def test_6_invariance(verdict):
    failures = []
    for seed in range(3):
        rng = np.random.default_rng([6, seed])
        ds = random_dataset(rng, 20, 3, node_effect=0.7)
        order = rng.permutation(20)
        out = []
        for d in (ds, relabel_nodes(ds, order)):
            fit = fit_poisson_pml(d)
            out.append((fit, assemble_vcov(fit, sym_scores(d, fit.theta_hat))))
        (fa, va), (fb, vb) = out
        if rel_err(fb.theta_hat, fa.theta_hat) > 1e-10:
            failures.append("theta")
        for name in ("sigma1_hat", "sigma23_hat", "se_fg", "se_dyad", "se_huber"):
            if rel_err(getattr(vb, name), getattr(va, name)) > 1e-10:
                failures.append(name)
        if np.linalg.eigvalsh(va.sigma23_hat).min() < -1e-12 * np.trace(va.sigma23_hat):
            failures.append("sigma23 PSD")
        if np.linalg.eigvalsh(fa.gamma_hat).min() <= 0:
            failures.append("gamma PD")
        for c in (0.1, 7.0):
            sc = dataset_from_dense(c * ds.dense_y(), ds.dense_X(), ds.node_labels, ds.regressor_names)
            th = fit_poisson_pml(sc, FitOptions(gradient_tolerance=1e-10 * max(1, c))).theta_hat
            if abs(th[0] - fa.theta_hat[0] - math.log(c)) > 1e-8 or np.max(np.abs(th[1:] - fa.theta_hat[1:])) > 1e-8:
                failures.append(f"scale c={c}")
    verdict(6, "relabeling, scale covariance, PSD", not failures, ", ".join(failures) or "all invariants hold")


def test_7_determinism(tmp_path, verdict):
    blobs = []
    for k, threads in enumerate(("1", "1", "2", "3")):
        out = tmp_path / f"rep{k}.json"
        code = main(["simulate", "--n", "40", "--reps", "9", "--seed", "2024", "--threads", threads, "--out", str(out)])
        assert code == 0
        blobs.append(out.read_bytes())
    verdict(7, "byte-identical simulate reports", all(b == blobs[0] for b in blobs), f"{len(blobs)} runs, threads 1/1/2/3")
