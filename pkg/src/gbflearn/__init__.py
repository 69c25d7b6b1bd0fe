"""Spectral graph-kernel learning.

Build graphs and their generalized Laplacians, generate positive definite
kernels from spectral multipliers, augment them entrywise with feature
kernels, and classify graph nodes by regularized least squares. Vertex
indices are 1-based throughout the public API; arrays are positional.
"""

from .graphs import (
    Graph,
    LaplacianKind,
    ProductGraph,
    build_graph,
    cartesian_product,
    graph_from_laplacian,
    load_graph,
    save_graph,
    validate_generalized_laplacian,
)
from .spectral import (
    Spectrum,
    algebra_norm,
    convolve,
    eigendecompose,
    gft,
    igft,
    product_spectrum,
    unity_element,
)
from .kernels import (
    Gbf,
    KernelMatrix,
    diffusion_gbf,
    gbf_from_filter,
    is_positive_definite,
    kernel_matrix,
    native_inner,
    native_norm,
    polynomial_gbf,
    polynomial_kernel_columns,
    spline_gbf,
    tensor_gbf,
)
from .features import (
    AugmentedKernel,
    FeatureSpec,
    augment_kernel,
    binary_feature,
    binary_feature_gbf,
    binary_feature_kernel,
    similarity_feature,
    similarity_feature_kernel,
    spectral_bipartition,
)
from .rls import (
    LabeledSet,
    RlsModel,
    accuracy,
    classify,
    fit,
    labeled_set,
    predict,
)
from .analysis import (
    consistency_check,
    diagnostics_report,
    error_bound,
    power_function,
    power_invariance_check,
)
from .datasets import (
    DatasetSchema,
    PointCloud,
    complete_similarity_graph,
    epsilon_graph,
    gen_slashed_o,
    gen_two_moon,
    geometric_prior,
    load_csv,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
