import pytest

from dyadreg.simulate import SimConfig, run_coverage

REFERENCE_CONFIG = SimConfig(n_nodes=200, theta_true=(-1.0, -0.5, 0.5), sigma=1.0, sigma_a=0.25, n_reps=1000, master_seed=42)


@pytest.fixture(scope="session")
def reference_coverage():
    """The full N=200, 1000-replication experiment; runs once per session."""
    return run_coverage(REFERENCE_CONFIG)
