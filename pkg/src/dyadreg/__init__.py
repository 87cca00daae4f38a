"""Dyadic Poisson pseudo-maximum-likelihood regression with dyadic-robust inference."""

__version__ = "0.1.0"

from .data import (
    DyadDataset,
    NodeTable,
    add_intercept,
    build_dataset,
    dataset_from_dense,
    expand_node_covariates,
    relabel_nodes,
)
from .fit import FitOptions, FitResult, fit_poisson_pml
from .pml import composite_hessian, composite_loglik, composite_score
from .simulate import CoverageReport, SimConfig, gen_dataset, run_coverage, run_replication
from .vcov import (
    SymScoreSet,
    VcovSet,
    assemble_vcov,
    sigma1_fast,
    sigma1_naive,
    sigma23,
    sym_scores,
    wald_ci,
)

__all__ = [
    "DyadDataset",
    "NodeTable",
    "add_intercept",
    "build_dataset",
    "dataset_from_dense",
    "expand_node_covariates",
    "relabel_nodes",
    "FitOptions",
    "FitResult",
    "fit_poisson_pml",
    "composite_loglik",
    "composite_score",
    "composite_hessian",
    "SymScoreSet",
    "VcovSet",
    "sym_scores",
    "sigma1_naive",
    "sigma1_fast",
    "sigma23",
    "assemble_vcov",
    "wald_ci",
    "SimConfig",
    "CoverageReport",
    "gen_dataset",
    "run_replication",
    "run_coverage",
]
