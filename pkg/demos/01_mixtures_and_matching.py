"""
Spherical mixtures: construction, sampling, and label-free comparison
=====================================================================

Builds a 3-component mixture in 5 dimensions, draws points from it, and
shows the two ways the package compares mean sets without knowing which
estimated component corresponds to which true one: Hausdorff distance
and optimal matching.
"""
import numpy as np

from gmmgrid import SphericalMixture, hausdorff, match_components, sample

truth = SphericalMixture(
    means=np.array([[1.0, 0, 0, 0, 0], [-1.0, 0.5, 0, 0, 0], [0, -1.0, 0.5, 0, 0]]),
    weights=np.array([0.5, 0.3, 0.2]),
    sigma=0.4,
)
print("k =", truth.k, " dim =", truth.dim, " min separation =", round(truth.min_pairwise_distance(), 3))

points = sample(truth, 5000, seed=0)
print("sampled", points.n, "points; empirical mean of first coord:", round(points.data[:, 0].mean(), 3))

# a slightly perturbed estimate, with components listed in a different order
estimate = SphericalMixture(
    means=truth.means[[2, 0, 1]] + 0.05,
    weights=truth.weights[[2, 0, 1]],
    sigma=0.4,
)

print("hausdorff(truth means, estimate means) =", round(hausdorff(truth.means, estimate.means), 4))

match = match_components(truth, estimate)
print("matching permutation:", list(match.permutation))
print("per-component mean errors:", np.round(match.mean_errors, 4))
print("max weight error:", round(match.max_weight_error, 4))
