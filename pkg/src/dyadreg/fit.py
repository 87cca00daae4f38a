"""Damped Newton maximization of the Poisson composite log-likelihood."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZeroOutcomes, NonFiniteLikelihood, NotConverged, SingularHessian
from .pml import ETA_CAP, composite_hessian, composite_loglik, composite_score, linear_predictor

__all__ = ["FitOptions", "FitResult", "fit_poisson_pml", "loglik_gain", "psd_pinv", "starting_values"]

PINV_RTOL = 1e-12


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 100
    gradient_tolerance: float = 1e-10
    step_halving_max: int = 30
    initial_theta: np.ndarray | None = None

    def __post_init__(self):
        if self.max_iterations < 1 or self.step_halving_max < 0:
            raise ValueError("iteration caps must be positive")
        if not self.gradient_tolerance > 0:
            raise ValueError("gradient_tolerance must be > 0")


@dataclass(frozen=True, eq=False)
class FitResult:
    theta_hat: np.ndarray
    converged: bool
    iterations: int
    final_score_norm: float
    gamma_hat: np.ndarray
    loglik_at_optimum: float
    regressor_names: tuple = ()
    loglik_path: tuple = field(default=(), repr=False)
    warnings: tuple = ()

    @property
    def singular(self) -> bool:
        return any(w.startswith("SingularHessian") for w in self.warnings)


def psd_pinv(A, rtol=PINV_RTOL):
    """Moore-Penrose inverse of a symmetric PSD matrix by eigendecomposition.

    Returns ``(A_plus, rank_deficient)``. Eigenvalues at or below
    ``rtol * max eigenvalue`` are treated as zero.
    """
    w, V = np.linalg.eigh((A + A.T) / 2)
    top = w.max() if w.size else 0.0
    keep = w > rtol * top if top > 0 else np.zeros_like(w, dtype=bool)
    inv_w = np.zeros_like(w)
    inv_w[keep] = 1.0 / w[keep]
    return (V * inv_w) @ V.T, not keep.all()


def loglik_gain(dataset, theta, cand):
    """composite_loglik(cand) - composite_loglik(theta), computed without cancellation.

    With ``d = X (cand - theta)`` the gain is ``mean(y d - mu expm1(d))``,
    which stays accurate when the step is far below the rounding level of
    the objective itself.
    """
    eta = linear_predictor(dataset, theta)
    d = linear_predictor(dataset, np.asarray(cand) - np.asarray(theta))
    if np.any(eta + d > ETA_CAP) or not np.all(np.isfinite(d)):
        raise NonFiniteLikelihood(f"linear predictor exceeds {ETA_CAP:g}")
    mu = np.exp(eta)
    return float(np.sum(dataset.y * d - mu * np.expm1(d))) / dataset.n_dyads


def starting_values(dataset):
    """Zero slopes; log mean outcome for an ``intercept`` column when present."""
    theta = np.zeros(dataset.n_regressors)
    names = dataset.regressor_names
    if "intercept" in names:
        ybar = float(np.mean(dataset.y))
        if ybar <= 0:
            raise AllZeroOutcomes("all outcomes are zero; the intercept start log(mean y) is undefined")
        theta[names.index("intercept")] = np.log(ybar)
    return theta


def fit_poisson_pml(dataset, options: FitOptions | None = None, raise_on_failure: bool = True) -> FitResult:
    """Maximize the composite Poisson log-likelihood by damped Newton.

    Each iteration proposes ``theta - H^+ S`` and halves the step until the
    objective does not decrease, as judged by :func:`loglik_gain`.
    Convergence is declared only when the infinity norm of the average score
    falls below the tolerance.

    With ``raise_on_failure=False`` a non-converged :class:`FitResult` is
    returned instead of raising :class:`NotConverged`.
    """
    opts = options or FitOptions()
    if opts.initial_theta is not None:
        theta = np.array(opts.initial_theta, dtype=float)
        if theta.shape != (dataset.n_regressors,):
            raise ValueError("initial_theta has the wrong length")
    else:
        theta = starting_values(dataset)

    notes = []
    ll = composite_loglik(dataset, theta)
    path = [ll]
    converged = False
    stalled = False
    it = 0
    while True:
        score = composite_score(dataset, theta)
        norm = float(np.max(np.abs(score)))
        if norm <= opts.gradient_tolerance:
            converged = True
            break
        if it >= opts.max_iterations:
            break
        neg_hess = -composite_hessian(dataset, theta)
        hinv, deficient = psd_pinv(neg_hess)
        if deficient:
            notes.append(f"SingularHessian: rank-deficient Hessian at iteration {it}")
        step = hinv @ score

        t = 1.0
        accepted = False
        saw_finite = False
        for _ in range(opts.step_halving_max + 1):
            cand = theta + t * step
            try:
                gain = loglik_gain(dataset, theta, cand)
            except NonFiniteLikelihood:
                t *= 0.5
                continue
            saw_finite = True
            if gain >= 0:
                accepted = True
                break
            t *= 0.5
        it += 1
        if not accepted:
            if not saw_finite:
                raise NonFiniteLikelihood(f"no finite step found after {opts.step_halving_max} halvings at iteration {it}")
            stalled = True
            notes.append(f"line search stalled at iteration {it} (score norm {norm:.3e})")
            break
        theta = cand
        ll = composite_loglik(dataset, theta)
        path.append(ll)

    gamma = -composite_hessian(dataset, theta)
    _, deficient = psd_pinv(gamma)
    if deficient:
        msg = "SingularHessian: Hessian is singular at the final iterate; variance estimation will fail"
        notes.append(msg)
        warnings.warn(msg, SingularHessian, stacklevel=2)

    result = FitResult(
        theta_hat=theta,
        converged=converged,
        iterations=it,
        final_score_norm=norm,
        gamma_hat=gamma,
        loglik_at_optimum=ll,
        regressor_names=tuple(dataset.regressor_names),
        loglik_path=tuple(path),
        warnings=tuple(dict.fromkeys(notes)),
    )
    if not converged and raise_on_failure:
        reason = "line search stalled" if stalled else f"iteration cap {opts.max_iterations} reached"
        raise NotConverged(f"Newton iteration did not converge: {reason}; score norm {norm:.3e}", result=result)
    return result
