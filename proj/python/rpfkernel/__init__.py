"""Random projection forest kernel, spectral clustering and baselines."""

from ._core import (
    ConfigError,
    Error,
    NumericalError,
    ParseError,
    clustering_accuracy,
    cluster,
    cocluster_accuracy,
    eigengap,
    evaluate,
    fiedler_bipartition,
    gaussian_kernel,
    kmeans,
    load_csv,
    mean_abs_cosine,
    ncut_objective,
    ncut_recursive,
    njw_cluster,
    principal_stretch,
    rescale_kernel,
    rpf_kernel,
    separation_probability,
    sigma_search,
    threshold_kernel,
    tree_leaves,
)

__all__ = [
    "ConfigError",
    "Error",
    "NumericalError",
    "ParseError",
    "clustering_accuracy",
    "cluster",
    "cocluster_accuracy",
    "eigengap",
    "evaluate",
    "fiedler_bipartition",
    "gaussian_kernel",
    "kmeans",
    "load_csv",
    "mean_abs_cosine",
    "ncut_objective",
    "ncut_recursive",
    "njw_cluster",
    "principal_stretch",
    "rescale_kernel",
    "rpf_kernel",
    "separation_probability",
    "sigma_search",
    "threshold_kernel",
    "tree_leaves",
]
