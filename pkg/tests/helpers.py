import numpy as np

from dyadreg.data import dataset_from_dense


def random_dataset(rng, n, p, intercept=True, scale=0.5, theta=None, node_effect=0.0):
    """Random complete panel with Poisson-ish non-integer outcomes.

    Node-level draws make the design dyadic (shared ego/alter attributes);
    ``node_effect`` adds unobserved lognormal agent effects to the mean,
    which makes dyads sharing an agent positively correlated.
    """
    k = p - 1 if intercept else p
    w = rng.normal(size=(n, k))
    X = np.zeros((n, n, p))
    if intercept:
        X[:, :, 0] = 1.0
    X[:, :, p - k :] = scale * (w[:, None, :] + rng.normal(size=(n, n, k)))
    if theta is None:
        theta = rng.normal(scale=0.3, size=p)
    mu = np.exp(X @ theta)
    if node_effect:
        a = np.exp(node_effect * rng.normal(size=n))
        mu = mu * a[:, None] * a[None, :]
    y = rng.poisson(mu) * rng.uniform(0.5, 1.5, size=(n, n))
    names = (["intercept"] if intercept else []) + [f"x{j}" for j in range(k)]
    return dataset_from_dense(y, X, [f"n{i}" for i in range(n)], names)


def rel_err(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)
