"""Sandwich variance estimators for dyadic PPML.

Three coefficient covariances are assembled from the fitted Jacobian
``Gamma = -H_N(theta_hat)`` and the symmetric dyad scores
``t_ij = s_ij + s_ji``:

* ``huber``: every directed dyad treated as an independent observation.
* ``dyad``: clusters on unordered dyads ``{i, j}``.
* ``fg``: dyadic-robust (Fafchamps-Gubert), adding covariance between all
  pairs of dyads that share one agent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.stats import norm

from .errors import NegativeVarianceEstimate, SingularGamma
from .fit import FitResult
from .pml import dyad_scores

__all__ = [
    "ESTIMATORS",
    "SIGMA1_DENOMINATORS",
    "SymScoreSet",
    "VcovSet",
    "sym_scores",
    "sigma1_naive",
    "sigma1_fast",
    "sigma23",
    "assemble_vcov",
    "wald_ci",
]

ESTIMATORS = ("huber", "dyad", "fg")
SIGMA1_DENOMINATORS = ("printed", "n-2")


@dataclass(frozen=True, eq=False)
class SymScoreSet:
    """Scores at theta_hat arranged by node pair.

    ``s[i, j]`` is the directed score of ``(i, j)``, ``t[i, j] = s[i, j] +
    s[j, i]`` and ``g[i] = sum_j t[i, j]``. Diagonals are zero.
    """

    s: np.ndarray
    t: np.ndarray
    g: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.t.shape[0]

    @property
    def p(self) -> int:
        return self.t.shape[2]

    @classmethod
    def from_directed(cls, s):
        s = np.array(s, dtype=float)
        idx = np.arange(s.shape[0])
        s[idx, idx] = 0.0
        t = s + s.transpose(1, 0, 2)
        return cls(s=s, t=t, g=t.sum(axis=1))

    @classmethod
    def from_symmetric(cls, t):
        """Wrap arbitrary symmetric scores (upper triangle wins); ``s`` is set to ``t/2``."""
        t = np.array(t, dtype=float)
        if t.ndim == 2:
            t = t[:, :, None]
        iu = np.triu_indices(t.shape[0], 1)
        full = np.zeros_like(t)
        full[iu] = t[iu]
        full = full + full.transpose(1, 0, 2)
        return cls(s=full / 2, t=full, g=full.sum(axis=1))


@dataclass(frozen=True, eq=False)
class VcovSet:
    sigma1_hat: np.ndarray
    sigma23_hat: np.ndarray
    vcov_fg: np.ndarray | None = None
    vcov_dyad: np.ndarray | None = None
    vcov_huber: np.ndarray | None = None
    se_fg: np.ndarray | None = None
    se_dyad: np.ndarray | None = None
    se_huber: np.ndarray | None = None
    sigma1_denominator: str = "printed"
    warnings: tuple = field(default=())

    def vcov(self, estimator):
        return getattr(self, f"vcov_{estimator}")

    def se(self, estimator):
        return getattr(self, f"se_{estimator}")


def sym_scores(dataset, theta_hat) -> SymScoreSet:
    n = dataset.n_nodes
    s = np.zeros((n, n, dataset.n_regressors))
    s[dataset.ego, dataset.alter] = dyad_scores(dataset, theta_hat)
    return SymScoreSet.from_directed(s)


def _sigma1_scale(n, denominator):
    if denominator == "printed":
        d = n * (n - 1) * (n - 1)
    elif denominator == "n-2":
        d = n * (n - 1) * (n - 2)
    else:
        raise ValueError(f"unknown Sigma1 denominator {denominator!r}; expected one of {SIGMA1_DENOMINATORS}")
    return 0.25 * 2.0 / d if d > 0 else 0.0


def sigma1_naive(sym: SymScoreSet, denominator: str = "printed") -> np.ndarray:
    """Triad loop: each triad contributes its three dyad pairs sharing an agent."""
    n, p = sym.n_nodes, sym.p
    t = sym.t
    M = np.zeros((p, p))
    for i, j, k in combinations(range(n), 3):
        M += np.outer(t[i, j], t[i, k]) + np.outer(t[i, j], t[j, k]) + np.outer(t[i, k], t[j, k])
    M = (M + M.T) / 2
    return _sigma1_scale(n, denominator) * M


def sigma1_fast(sym: SymScoreSet, denominator: str = "printed") -> np.ndarray:
    """O(N^2 p^2) form of :func:`sigma1_naive`.

    Summing ``g_i g_i' - sum_j t_ij t_ij'`` over nodes counts every ordered
    pair of distinct dyads sharing node ``i``, i.e. twice the symmetrized
    triad sum.
    """
    n = sym.n_nodes
    t = sym.t.reshape(-1, sym.p)
    pair_sum = sym.g.T @ sym.g - t.T @ t
    M = 0.5 * pair_sum
    M = (M + M.T) / 2
    return _sigma1_scale(n, denominator) * M


def sigma23(sym: SymScoreSet) -> np.ndarray:
    """Own-dyad variance term; sums ``t_ij t_ij'`` over unordered dyads."""
    n = sym.n_nodes
    t = sym.t.reshape(-1, sym.p)
    # full (i, j) sum counts each unordered dyad twice
    M = 0.5 * (t.T @ t)
    M = (M + M.T) / 2
    return 0.25 * 2.0 / (n * (n - 1)) * M


def _sandwich(bread, meat):
    V = bread @ meat @ bread.T
    return (V + V.T) / 2


def _se(V, name):
    d = np.diag(V)
    bad = np.flatnonzero(~(d > 0))
    if bad.size:
        k = int(bad[0])
        raise NegativeVarianceEstimate(
            f"{name} variance estimate has non-positive diagonal entry {d[k]:.6g} at index {k}",
            estimator=name,
            index=k,
        )
    return np.sqrt(d)


def assemble_vcov(
    fit: FitResult,
    sym: SymScoreSet,
    estimators=ESTIMATORS,
    sigma1_denominator: str = "printed",
) -> VcovSet:
    """Coefficient covariances and standard errors for the requested estimators."""
    estimators = tuple(estimators)
    unknown = set(estimators) - set(ESTIMATORS)
    if unknown:
        raise ValueError(f"unknown estimators {sorted(unknown)}")
    n = sym.n_nodes
    n_dyads = n * (n - 1)
    gamma = np.asarray(fit.gamma_hat, dtype=float)

    w = np.linalg.eigvalsh(gamma)
    if not (w.min() > 1e-12 * max(w.max(), 0.0) and w.max() > 0):
        raise SingularGamma(f"Gamma_hat is not positive definite (eigenvalues {w.min():.3e} .. {w.max():.3e})")
    gamma_inv = np.linalg.inv(gamma)

    s1 = sigma1_fast(sym, sigma1_denominator)
    s23 = sigma23(sym)
    out = {}

    if "fg" in estimators:
        meat = 4 * s1 + (2.0 / (n - 1)) * (s23 - 2 * s1)
        out["vcov_fg"] = _sandwich(gamma_inv, meat) / n
        out["se_fg"] = _se(out["vcov_fg"], "fg")
    if "dyad" in estimators:
        out["vcov_dyad"] = (2.0 / n_dyads) * _sandwich(gamma_inv, s23)
        out["se_dyad"] = _se(out["vcov_dyad"], "dyad")
    if "huber" in estimators:
        s = sym.s.reshape(-1, sym.p)
        bread = gamma_inv / n_dyads
        out["vcov_huber"] = _sandwich(bread, s.T @ s)
        out["se_huber"] = _se(out["vcov_huber"], "huber")

    return VcovSet(sigma1_hat=s1, sigma23_hat=s23, sigma1_denominator=sigma1_denominator, **out)


def wald_ci(theta_hat, se, level: float = 0.95):
    """Return ``(lower, upper)`` arrays: estimate -/+ z_{(1+level)/2} * se."""
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    theta_hat = np.asarray(theta_hat, dtype=float)
    se = np.asarray(se, dtype=float)
    if np.any(se < 0):
        raise ValueError("standard errors must be non-negative")
    z = norm.ppf(0.5 + level / 2)
    return theta_hat - z * se, theta_hat + z * se
