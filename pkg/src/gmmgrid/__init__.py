"""Learning mixtures of identical spherical Gaussians by projected KDE grid search."""

from .gridsearch import (
    ParameterGrid,
    SearchResult,
    enumerate_grid,
    resolve_threads,
    search,
    theoretical_grid_size,
)
from .kde import KdeEstimate, bandwidth_rule, build_kde
from .l2 import (
    gaussian_inner,
    gram_matrix,
    l2_distance_sq,
    l2_norm_sq,
    project_to_direction,
    quadrature_l2_distance_sq,
)
from .mixtures import (
    MatchResult,
    SampleMatrix,
    SignedMixture,
    SphericalMixture,
    hausdorff,
    match_components,
    sample,
)
from .projection import ProjectionBasis, fit_basis, lift, project
from .experiment import ExperimentConfig, ExperimentRecord, generate_instance, run_experiment
from .identities import (
    DirectionSearchError,
    VandermondeInstance,
    find_separating_direction,
    fourier_norm_check,
    lower_bound_probe,
    run_lemma_suite,
    vandermonde_minor_det,
    vandermonde_norm_bound,
)
from .variance import (
    HankelPolynomialMatrix,
    HermiteMomentTable,
    build_hankel,
    determinant_function,
    estimate_variance,
    estimate_variance_from_moments,
    hermite_polynomial,
    leading_hankel_coefficient,
)

__version__ = "0.1.0"

__all__ = [
    "SphericalMixture",
    "SignedMixture",
    "SampleMatrix",
    "MatchResult",
    "sample",
    "hausdorff",
    "match_components",
    "gaussian_inner",
    "gram_matrix",
    "l2_norm_sq",
    "l2_distance_sq",
    "quadrature_l2_distance_sq",
    "project_to_direction",
    "ProjectionBasis",
    "fit_basis",
    "project",
    "lift",
    "KdeEstimate",
    "bandwidth_rule",
    "build_kde",
    "ParameterGrid",
    "SearchResult",
    "theoretical_grid_size",
    "enumerate_grid",
    "search",
    "resolve_threads",
    "HermiteMomentTable",
    "HankelPolynomialMatrix",
    "hermite_polynomial",
    "build_hankel",
    "leading_hankel_coefficient",
    "determinant_function",
    "estimate_variance",
    "estimate_variance_from_moments",
    "VandermondeInstance",
    "DirectionSearchError",
    "vandermonde_minor_det",
    "vandermonde_norm_bound",
    "find_separating_direction",
    "fourier_norm_check",
    "lower_bound_probe",
    "run_lemma_suite",
    "ExperimentConfig",
    "ExperimentRecord",
    "generate_instance",
    "run_experiment",
    "__version__",
]
