"""Poisson composite log-likelihood, score and Hessian.

Per directed dyad, up to a term not depending on theta::

    l_ij(theta) = y_ij * r_ij'theta - exp(r_ij'theta)

Aggregates average over all N(N-1) ordered pairs; the normalization is
applied once, after summation.
"""

import numpy as np

from .errors import NonFiniteLikelihood

__all__ = [
    "ETA_CAP",
    "loglik_dyad",
    "score_dyad",
    "hessian_dyad",
    "linear_predictor",
    "fitted_mean",
    "dyad_scores",
    "composite_loglik",
    "composite_score",
    "composite_hessian",
]

# exp(709.78) overflows a double
ETA_CAP = 700.0


def _safe_exp(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any(eta > ETA_CAP) or not np.all(np.isfinite(eta)):
        raise NonFiniteLikelihood(f"linear predictor exceeds {ETA_CAP:g} (max {np.max(eta):.6g})")
    return np.exp(eta)


def loglik_dyad(y, r, theta):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    eta = float(r @ np.asarray(theta, dtype=float))
    return y * eta - float(_safe_exp(eta))


def score_dyad(y, r, theta):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    eta = float(r @ np.asarray(theta, dtype=float))
    return (y - float(_safe_exp(eta))) * r


def hessian_dyad(r, theta):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    eta = float(r @ np.asarray(theta, dtype=float))
    return -float(_safe_exp(eta)) * np.outer(r, r)


def linear_predictor(dataset, theta):
    return dataset.X @ np.asarray(theta, dtype=float)


def fitted_mean(dataset, theta):
    """exp(r_ij'theta) for every ordered pair, in storage order."""
    return _safe_exp(linear_predictor(dataset, theta))


def dyad_scores(dataset, theta):
    """``(N(N-1), p)`` array of per-directed-dyad scores (y - mu) r."""
    mu = fitted_mean(dataset, theta)
    return (dataset.y - mu)[:, None] * dataset.X


def composite_loglik(dataset, theta):
    eta = linear_predictor(dataset, theta)
    mu = _safe_exp(eta)
    return float(np.sum(dataset.y * eta - mu)) / dataset.n_dyads


def composite_score(dataset, theta):
    return dyad_scores(dataset, theta).sum(axis=0) / dataset.n_dyads


def composite_hessian(dataset, theta):
    mu = fitted_mean(dataset, theta)
    X = dataset.X
    H = -((X * mu[:, None]).T @ X) / dataset.n_dyads
    return (H + H.T) / 2
